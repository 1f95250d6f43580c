#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "simenc/encoders.hpp"
#include "simenc/feature_matrix.hpp"

namespace simenc {

/// Seeded Gaussian projection matrix, entries i.i.d. N(0, 1/d).
struct ProjectionMatrix {
  Matrix entries;  // p x d
  std::uint64_t seed = 0;

  static ProjectionMatrix gaussian(Eigen::Index p, Eigen::Index d,
                                   std::uint64_t seed);
};

/// X * R with R = ProjectionMatrix::gaussian(cols(X), d, seed).
FeatureMatrix random_projection(const FeatureMatrix& X, Eigen::Index d,
                                std::uint64_t seed);

enum class PrototypeMethod { MostFrequent, KMeans };

/// Ordered list of d distinct categories drawn from a training domain.
struct PrototypeSet {
  std::vector<std::string> prototypes;
  PrototypeMethod method = PrototypeMethod::MostFrequent;
};

/// The d highest-frequency categories; frequency ties break lexicographically.
PrototypeSet most_frequent_prototypes(const CategoryDomain& domain,
                                      std::size_t d);

struct KMeansModel {
  int k = 0;
  Matrix centers;                // k x p
  std::vector<int> assignments;  // point -> center index
  double inertia = 0.0;
  std::uint64_t seed = 0;
  int max_iter = 100;
};

/// Lloyd iterations from greedy farthest-point seeding. Empty clusters are
/// re-seeded from the point farthest from its center, so exactly k centers
/// always come back.
KMeansModel kmeans(const Matrix& points, int k, std::uint64_t seed,
                   int max_iter = 100,
                   std::vector<double>* inertia_trace = nullptr);

/// Clusters similarity-encoding rows of up to `subsample` category instances
/// (seeded-uniform over the training occurrences) and returns, per cluster,
/// the domain category whose row is nearest the center.
PrototypeSet kmeans_prototypes(const CategoryDomain& domain,
                               const SimilarityMeasure& m, std::size_t d,
                               std::size_t subsample = 3000,
                               std::uint64_t seed = 0);

/// Row i = [sim(values[i], p_1), ..., sim(values[i], p_d)].
FeatureMatrix reduce_by_prototypes(const std::vector<std::string>& values,
                                   const PrototypeSet& protos,
                                   const SimilarityMeasure& m);

/// Partitions the domain into d clusters by k-means on similarity rows and
/// returns the matching cluster-indicator encoder.
FittedEncoder dedup_merge_encoder(const CategoryDomain& domain,
                                  const SimilarityMeasure& m, std::size_t d,
                                  std::uint64_t seed = 0,
                                  std::size_t subsample = 3000);

}  // namespace simenc
