#include "simenc/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace simenc {

std::vector<char32_t> decode_utf8(const std::string& s) {
  std::vector<char32_t> out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    const unsigned char c = static_cast<unsigned char>(s[i]);
    std::size_t len = 1;
    char32_t cp = c;
    if (c >= 0xF0)
      len = 4, cp = c & 0x07;
    else if (c >= 0xE0)
      len = 3, cp = c & 0x0F;
    else if (c >= 0xC0)
      len = 2, cp = c & 0x1F;
    if (i + len > s.size()) len = 1, cp = c;
    bool valid = true;
    for (std::size_t j = 1; j < len; ++j) {
      const unsigned char cc = static_cast<unsigned char>(s[i + j]);
      if ((cc & 0xC0) != 0x80) {
        valid = false;
        break;
      }
      cp = (cp << 6) | (cc & 0x3F);
    }
    if (!valid) len = 1, cp = c;
    out.push_back(cp);
    i += len;
  }
  return out;
}

std::size_t char_length(const std::string& s) { return decode_utf8(s).size(); }

namespace {

// Byte offsets of each code point boundary, including s.size() as sentinel.
std::vector<std::size_t> utf8_boundaries(const std::string& s) {
  std::vector<std::size_t> bounds;
  bounds.push_back(0);
  std::size_t i = 0;
  while (i < s.size()) {
    const unsigned char c = static_cast<unsigned char>(s[i]);
    std::size_t len = 1;
    if (c >= 0xF0)
      len = 4;
    else if (c >= 0xE0)
      len = 3;
    else if (c >= 0xC0)
      len = 2;
    if (i + len > s.size()) len = 1;
    for (std::size_t j = 1; j < len; ++j) {
      if ((static_cast<unsigned char>(s[i + j]) & 0xC0) != 0x80) {
        len = 1;
        break;
      }
    }
    i += len;
    bounds.push_back(i);
  }
  return bounds;
}

}  // namespace

NGramSet ngrams(const std::string& s, int n) {
  if (n < 1) throw std::invalid_argument("ngrams: n must be >= 1");
  NGramSet set;
  set.n = n;
  const auto bounds = utf8_boundaries(s);
  const std::size_t chars = bounds.size() - 1;
  if (chars < static_cast<std::size_t>(n)) return set;
  set.grams.reserve(chars - n + 1);
  for (std::size_t i = 0; i + n <= chars; ++i)
    set.grams.push_back(s.substr(bounds[i], bounds[i + n] - bounds[i]));
  std::sort(set.grams.begin(), set.grams.end());
  set.grams.erase(std::unique(set.grams.begin(), set.grams.end()),
                  set.grams.end());
  return set;
}

std::size_t intersection_size(const NGramSet& a, const NGramSet& b) {
  std::size_t count = 0;
  auto ia = a.grams.begin();
  auto ib = b.grams.begin();
  while (ia != a.grams.end() && ib != b.grams.end()) {
    if (*ia < *ib)
      ++ia;
    else if (*ib < *ia)
      ++ib;
    else
      ++count, ++ia, ++ib;
  }
  return count;
}

namespace {

double levenshtein_impl(const std::vector<char32_t>& a,
                        const std::vector<char32_t>& b,
                        const EditWeights& w) {
  const std::size_t m = a.size(), n = b.size();
  std::vector<double> prev(n + 1), cur(n + 1);
  for (std::size_t j = 0; j <= n; ++j) prev[j] = j * w.insert;
  for (std::size_t i = 1; i <= m; ++i) {
    cur[0] = i * w.del;
    for (std::size_t j = 1; j <= n; ++j) {
      const double sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0.0 : w.replace);
      cur[j] = std::min({prev[j] + w.del, cur[j - 1] + w.insert, sub});
    }
    std::swap(prev, cur);
  }
  return prev[n];
}

double jaro_impl(const std::vector<char32_t>& a,
                 const std::vector<char32_t>& b) {
  if (a.empty() && b.empty()) return 1.0;
  if (a.empty() || b.empty()) return 0.0;
  const std::ptrdiff_t la = static_cast<std::ptrdiff_t>(a.size());
  const std::ptrdiff_t lb = static_cast<std::ptrdiff_t>(b.size());
  const std::ptrdiff_t window = std::max<std::ptrdiff_t>(
      std::max(la, lb) / 2 - 1, 0);
  std::vector<bool> a_matched(a.size(), false), b_matched(b.size(), false);
  std::ptrdiff_t matches = 0;
  for (std::ptrdiff_t i = 0; i < la; ++i) {
    const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, i - window);
    const std::ptrdiff_t hi = std::min(lb - 1, i + window);
    for (std::ptrdiff_t j = lo; j <= hi; ++j) {
      if (!b_matched[j] && a[i] == b[j]) {
        a_matched[i] = b_matched[j] = true;
        ++matches;
        break;
      }
    }
  }
  if (matches == 0) return 0.0;
  // Transpositions: compare matched characters in order.
  std::ptrdiff_t transpositions = 0, j = 0;
  for (std::ptrdiff_t i = 0; i < la; ++i) {
    if (!a_matched[i]) continue;
    while (!b_matched[j]) ++j;
    if (a[i] != b[j]) ++transpositions;
    ++j;
  }
  transpositions /= 2;
  const double m = static_cast<double>(matches);
  return (m / la + m / lb + (m - transpositions) / m) / 3.0;
}

}  // namespace

double levenshtein_distance(const std::string& s1, const std::string& s2,
                            const EditWeights& w) {
  return levenshtein_impl(decode_utf8(s1), decode_utf8(s2), w);
}

double sim_levenshtein_ratio(const std::string& s1, const std::string& s2) {
  const auto a = decode_utf8(s1);
  const auto b = decode_utf8(s2);
  const std::size_t total = a.size() + b.size();
  if (total == 0) return 1.0;
  return 1.0 - levenshtein_impl(a, b, EditWeights{}) / total;
}

double jaro(const std::string& s1, const std::string& s2) {
  return jaro_impl(decode_utf8(s1), decode_utf8(s2));
}

double sim_jaro_winkler(const std::string& s1, const std::string& s2,
                        double p) {
  if (p < 0.0 || p > 0.25)
    throw std::invalid_argument("jaro_winkler: p must be in [0, 0.25]");
  const auto a = decode_utf8(s1);
  const auto b = decode_utf8(s2);
  const double j = jaro_impl(a, b);
  std::size_t prefix = 0;
  const std::size_t max_prefix = std::min({a.size(), b.size(), std::size_t{4}});
  while (prefix < max_prefix && a[prefix] == b[prefix]) ++prefix;
  return j + prefix * p * (1.0 - j);
}

double sim_ngram(const std::string& s1, const std::string& s2, int n) {
  const NGramSet g1 = ngrams(s1, n);
  const NGramSet g2 = ngrams(s2, n);
  if (g1.grams.empty() && g2.grams.empty()) return s1 == s2 ? 1.0 : 0.0;
  const std::size_t inter = intersection_size(g1, g2);
  return static_cast<double>(inter) /
         static_cast<double>(g1.size() + g2.size() - inter);
}

SimilarityMeasure SimilarityMeasure::levenshtein_ratio() {
  return {Kind::LevenshteinRatio, 0.1, 3};
}
SimilarityMeasure SimilarityMeasure::jaro_winkler(double p) {
  if (p < 0.0 || p > 0.25)
    throw std::invalid_argument("jaro_winkler: p must be in [0, 0.25]");
  return {Kind::JaroWinkler, p, 3};
}
SimilarityMeasure SimilarityMeasure::ngram(int n) {
  if (n < 1) throw std::invalid_argument("ngram: n must be >= 1");
  return {Kind::Ngram, 0.1, n};
}
SimilarityMeasure SimilarityMeasure::exact_match() {
  return {Kind::ExactMatch, 0.1, 3};
}

double SimilarityMeasure::operator()(const std::string& s1,
                                     const std::string& s2) const {
  switch (kind) {
    case Kind::LevenshteinRatio:
      return sim_levenshtein_ratio(s1, s2);
    case Kind::JaroWinkler:
      return sim_jaro_winkler(s1, s2, jw_prefix_scale);
    case Kind::Ngram:
      return sim_ngram(s1, s2, ngram_n);
    case Kind::ExactMatch:
      return s1 == s2 ? 1.0 : 0.0;
  }
  return 0.0;
}

std::string SimilarityMeasure::name() const {
  switch (kind) {
    case Kind::LevenshteinRatio:
      return "lev_ratio";
    case Kind::JaroWinkler: {
      char buf[40];
      std::snprintf(buf, sizeof(buf), "jaro_winkler:%.17g", jw_prefix_scale);
      return buf;
    }
    case Kind::Ngram:
      return "ngram:" + std::to_string(ngram_n);
    case Kind::ExactMatch:
      return "exact";
  }
  return "exact";
}

SimilarityMeasure SimilarityMeasure::parse(const std::string& tag) {
  if (tag == "lev_ratio" || tag == "levenshtein" || tag == "lev")
    return levenshtein_ratio();
  if (tag == "exact" || tag == "exact_match") return exact_match();
  if (tag == "jaro_winkler" || tag == "jw") return jaro_winkler();
  if (tag.rfind("jaro_winkler:", 0) == 0)
    return jaro_winkler(std::stod(tag.substr(13)));
  if (tag.rfind("ngram:", 0) == 0) return ngram(std::stoi(tag.substr(6)));
  // shorthand like "ngram3"
  if (tag.rfind("ngram", 0) == 0 && tag.size() > 5)
    return ngram(std::stoi(tag.substr(5)));
  if (tag == "ngram") return ngram(3);
  throw std::invalid_argument("unknown similarity measure: " + tag);
}

SimilarityScorer::SimilarityScorer(SimilarityMeasure measure,
                                   std::vector<std::string> targets)
    : measure_(measure), targets_(std::move(targets)) {
  if (measure_.kind == SimilarityMeasure::Kind::Ngram) {
    target_grams_.reserve(targets_.size());
    for (const auto& t : targets_)
      target_grams_.push_back(ngrams(t, measure_.ngram_n));
  }
}

Vector SimilarityScorer::score(const std::string& v) const {
  Vector out(static_cast<Eigen::Index>(targets_.size()));
  if (measure_.kind == SimilarityMeasure::Kind::Ngram) {
    const NGramSet gv = ngrams(v, measure_.ngram_n);
    for (std::size_t j = 0; j < targets_.size(); ++j) {
      const NGramSet& gt = target_grams_[j];
      if (gv.grams.empty() && gt.grams.empty()) {
        out[j] = v == targets_[j] ? 1.0 : 0.0;
      } else {
        const std::size_t inter = intersection_size(gv, gt);
        out[j] = static_cast<double>(inter) /
                 static_cast<double>(gv.size() + gt.size() - inter);
      }
    }
  } else {
    for (std::size_t j = 0; j < targets_.size(); ++j)
      out[j] = measure_(v, targets_[j]);
  }
  return out;
}

FeatureMatrix pairwise_similarity(const std::vector<std::string>& rows,
                                  const std::vector<std::string>& cols,
                                  const SimilarityMeasure& m) {
  if (cols.empty())
    throw std::invalid_argument("pairwise_similarity: empty column list");
  SimilarityScorer scorer(m, cols);
  FeatureMatrix fm;
  fm.values.resize(static_cast<Eigen::Index>(rows.size()),
                   static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    fm.values.row(static_cast<Eigen::Index>(i)) =
        scorer.score(rows[i]).transpose();
  fm.columns.reserve(cols.size());
  for (const auto& c : cols) fm.columns.push_back("sim:" + c);
  return fm;
}

double implicit_kernel(const std::string& d_i, const std::string& d_j,
                       const std::vector<std::string>& domain,
                       const SimilarityMeasure& m) {
  if (domain.empty()) throw std::invalid_argument("implicit_kernel: empty domain");
  double acc = 0.0;
  for (const auto& d : domain) acc += m(d_i, d) * m(d_j, d);
  return acc;
}

SimilarityHistogram similarity_histogram(
    const std::vector<std::string>& categories, const SimilarityMeasure& m,
    std::size_t n_pairs, std::uint64_t seed, int n_bins) {
  std::vector<std::string> distinct = categories;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()),
                 distinct.end());
  if (distinct.size() < 2)
    throw std::invalid_argument("degenerate vocabulary");
  if (n_pairs < 1)
    throw std::invalid_argument("similarity_histogram: n_pairs must be >= 1");

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, distinct.size() - 1);
  std::vector<double> sims;
  sims.reserve(n_pairs);
  for (std::size_t s = 0; s < n_pairs; ++s) {
    std::size_t i = pick(rng), j = pick(rng);
    while (j == i) j = pick(rng);
    sims.push_back(m(distinct[i], distinct[j]));
  }

  SimilarityHistogram hist;
  hist.bin_edges.resize(n_bins + 1);
  for (int b = 0; b <= n_bins; ++b)
    hist.bin_edges[b] = static_cast<double>(b) / n_bins;
  hist.counts.assign(n_bins, 0);
  for (double v : sims) {
    int b = std::min(static_cast<int>(v * n_bins), n_bins - 1);
    ++hist.counts[b];
  }
  std::sort(sims.begin(), sims.end());
  const std::size_t n = sims.size();
  hist.median = n % 2 == 1 ? sims[n / 2]
                           : 0.5 * (sims[n / 2 - 1] + sims[n / 2]);
  return hist;
}

}  // namespace simenc
