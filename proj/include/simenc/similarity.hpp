#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "simenc/feature_matrix.hpp"

namespace simenc {

/// Decodes UTF-8 into Unicode scalar values. Invalid bytes are passed
/// through as single code points so the functions stay total.
std::vector<char32_t> decode_utf8(const std::string& s);

/// Number of Unicode scalar values in s.
std::size_t char_length(const std::string& s);

/// Deduplicated set of all length-n contiguous character windows of s,
/// kept sorted. Empty when s has fewer than n characters.
struct NGramSet {
  int n = 1;
  std::vector<std::string> grams;  // sorted, unique, each exactly n chars

  std::size_t size() const { return grams.size(); }
};

NGramSet ngrams(const std::string& s, int n);

std::size_t intersection_size(const NGramSet& a, const NGramSet& b);

struct EditWeights {
  double insert = 1.0;
  double del = 1.0;
  double replace = 2.0;
};

double levenshtein_distance(const std::string& s1, const std::string& s2,
                            const EditWeights& w = {});

/// 1 - d_lev(s1, s2) / (|s1| + |s2|) with default weights.
/// Two empty strings are identical categories and score 1.
double sim_levenshtein_ratio(const std::string& s1, const std::string& s2);

/// Jaro similarity with match window floor(max(|s1|,|s2|)/2) - 1.
/// Returns 0 when there are no matching characters, 1 for two empty strings.
double jaro(const std::string& s1, const std::string& s2);

/// jaro + l * p * (1 - jaro), common prefix l capped at 4.
double sim_jaro_winkler(const std::string& s1, const std::string& s2,
                        double p = 0.1);

/// |ngrams(s1) ∩ ngrams(s2)| / |ngrams(s1) ∪ ngrams(s2)|; falls back to the
/// exact-match indicator when both gram sets are empty.
double sim_ngram(const std::string& s1, const std::string& s2, int n);

struct SimilarityMeasure {
  enum class Kind { LevenshteinRatio, JaroWinkler, Ngram, ExactMatch };

  Kind kind = Kind::ExactMatch;
  double jw_prefix_scale = 0.1;  // p in [0, 0.25]
  int ngram_n = 3;

  static SimilarityMeasure levenshtein_ratio();
  static SimilarityMeasure jaro_winkler(double p = 0.1);
  static SimilarityMeasure ngram(int n);
  static SimilarityMeasure exact_match();

  double operator()(const std::string& s1, const std::string& s2) const;

  /// Stable textual tag, e.g. "ngram:3"; parse() is its inverse.
  std::string name() const;
  static SimilarityMeasure parse(const std::string& tag);

  bool operator==(const SimilarityMeasure&) const = default;
};

/// Precomputes the representation of a fixed target list so that scoring
/// many left-hand strings against it is cheap. Pure and immutable.
class SimilarityScorer {
 public:
  SimilarityScorer(SimilarityMeasure measure, std::vector<std::string> targets);

  /// [sim(v, t_1), ..., sim(v, t_k)]
  Vector score(const std::string& v) const;

  const std::vector<std::string>& targets() const { return targets_; }
  const SimilarityMeasure& measure() const { return measure_; }

 private:
  SimilarityMeasure measure_;
  std::vector<std::string> targets_;
  std::vector<NGramSet> target_grams_;  // only for Kind::Ngram
};

/// Entry (i, j) = sim(rows[i], cols[j]).
FeatureMatrix pairwise_similarity(const std::vector<std::string>& rows,
                                  const std::vector<std::string>& cols,
                                  const SimilarityMeasure& m);

/// Sum over the domain of sim(d_i, d_l) * sim(d_j, d_l); the dot product of
/// the two similarity-encoded vectors.
double implicit_kernel(const std::string& d_i, const std::string& d_j,
                       const std::vector<std::string>& domain,
                       const SimilarityMeasure& m);

struct SimilarityHistogram {
  std::vector<double> bin_edges;  // n_bins + 1 edges spanning [0, 1]
  std::vector<std::int64_t> counts;
  double median = 0.0;
};

/// Similarities of n_pairs seeded uniform samples (with replacement) of
/// unordered pairs of distinct categories. Throws std::invalid_argument
/// ("degenerate vocabulary") with fewer than 2 distinct categories.
SimilarityHistogram similarity_histogram(
    const std::vector<std::string>& categories, const SimilarityMeasure& m,
    std::size_t n_pairs, std::uint64_t seed, int n_bins = 20);

}  // namespace simenc
