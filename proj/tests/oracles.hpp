#pragma once

// Reference implementations used as independent oracles in tests. These stay
// deliberately naive and share no code with the library.

#include <algorithm>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace oracle {

// Exhaustive edit-sequence search over insert/delete/replace.
inline double brute_force_edit_cost(std::string_view a, std::string_view b,
                                    double ins = 1.0, double del = 1.0,
                                    double rep = 2.0) {
  if (a.empty()) return static_cast<double>(b.size()) * ins;
  if (b.empty()) return static_cast<double>(a.size()) * del;
  double best = brute_force_edit_cost(a.substr(1), b, ins, del, rep) + del;
  best = std::min(best,
                  brute_force_edit_cost(a, b.substr(1), ins, del, rep) + ins);
  best = std::min(best,
                  brute_force_edit_cost(a.substr(1), b.substr(1), ins, del,
                                        rep) +
                      (a.front() == b.front() ? 0.0 : rep));
  return best;
}

inline std::size_t lcs_length(std::string_view a, std::string_view b) {
  std::vector<std::vector<std::size_t>> dp(a.size() + 1,
                                           std::vector<std::size_t>(b.size() + 1, 0));
  for (std::size_t i = 1; i <= a.size(); ++i)
    for (std::size_t j = 1; j <= b.size(); ++j)
      dp[i][j] = a[i - 1] == b[j - 1]
                     ? dp[i - 1][j - 1] + 1
                     : std::max(dp[i - 1][j], dp[i][j - 1]);
  return dp[a.size()][b.size()];
}

inline std::string random_string(std::mt19937_64& rng, std::size_t max_len,
                                 std::string_view alphabet = "abcdefgh") {
  std::uniform_int_distribution<std::size_t> len(0, max_len);
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
  std::string s;
  const std::size_t n = len(rng);
  for (std::size_t i = 0; i < n; ++i) s += alphabet[pick(rng)];
  return s;
}

// All strings up to max_len over the given alphabet, shortest first.
inline std::vector<std::string> all_strings(std::string_view alphabet,
                                            std::size_t max_len) {
  std::vector<std::string> out{""};
  std::size_t begin = 0;
  for (std::size_t l = 1; l <= max_len; ++l) {
    const std::size_t end = out.size();
    for (std::size_t i = begin; i < end; ++i)
      for (char c : alphabet) out.push_back(out[i] + c);
    begin = end;
  }
  return out;
}

}  // namespace oracle
