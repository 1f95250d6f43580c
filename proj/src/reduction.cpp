#include "simenc/reduction.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

namespace simenc {

ProjectionMatrix ProjectionMatrix::gaussian(Eigen::Index p, Eigen::Index d,
                                            std::uint64_t seed) {
  if (d < 1) throw std::invalid_argument("projection: d must be >= 1");
  ProjectionMatrix pm;
  pm.seed = seed;
  pm.entries.resize(p, d);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  for (Eigen::Index i = 0; i < p; ++i)
    for (Eigen::Index j = 0; j < d; ++j) pm.entries(i, j) = gauss(rng) * scale;
  return pm;
}

FeatureMatrix random_projection(const FeatureMatrix& X, Eigen::Index d,
                                std::uint64_t seed) {
  const ProjectionMatrix R = ProjectionMatrix::gaussian(X.cols(), d, seed);
  FeatureMatrix out;
  out.values = X.values * R.entries;
  out.columns.reserve(static_cast<std::size_t>(d));
  for (Eigen::Index j = 0; j < d; ++j)
    out.columns.push_back("proj:" + std::to_string(j));
  return out;
}

PrototypeSet most_frequent_prototypes(const CategoryDomain& domain,
                                      std::size_t d) {
  if (d < 1 || d > domain.k())
    throw std::invalid_argument("most_frequent_prototypes: need 1 <= d <= k");
  std::vector<std::size_t> order(domain.k());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (domain.frequencies[a] != domain.frequencies[b])
      return domain.frequencies[a] > domain.frequencies[b];
    return domain.categories[a] < domain.categories[b];
  });
  PrototypeSet ps;
  ps.method = PrototypeMethod::MostFrequent;
  ps.prototypes.reserve(d);
  for (std::size_t i = 0; i < d; ++i)
    ps.prototypes.push_back(domain.categories[order[i]]);
  return ps;
}

namespace {

// Squared distance of every row of X to every row of C, via the expansion
// ||x||^2 - 2 x.c + ||c||^2. Negative round-off is clamped at 0.
Matrix squared_distances(const Matrix& X, const Matrix& C) {
  const Vector x2 = X.rowwise().squaredNorm();
  const Vector c2 = C.rowwise().squaredNorm();
  Matrix d = -2.0 * (X * C.transpose());
  d.colwise() += x2;
  d.rowwise() += c2.transpose();
  return d.cwiseMax(0.0);
}

std::vector<int> nearest_center(const Matrix& dists) {
  std::vector<int> out(static_cast<std::size_t>(dists.rows()));
  for (Eigen::Index i = 0; i < dists.rows(); ++i) {
    int best = 0;
    for (int j = 1; j < dists.cols(); ++j)
      if (dists(i, j) < dists(i, best)) best = j;
    out[static_cast<std::size_t>(i)] = best;
  }
  return out;
}

}  // namespace

KMeansModel kmeans(const Matrix& points, int k, std::uint64_t seed,
                   int max_iter, std::vector<double>* inertia_trace) {
  const Eigen::Index n = points.rows();
  if (k < 1 || k > n) throw std::invalid_argument("kmeans: need 1 <= k <= n");
  if (max_iter < 1) throw std::invalid_argument("kmeans: max_iter must be >= 1");

  KMeansModel model;
  model.k = k;
  model.seed = seed;
  model.max_iter = max_iter;
  model.centers.resize(k, points.cols());

  // Greedy farthest-point seeding from a seeded uniform start.
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
  model.centers.row(0) = points.row(pick(rng));
  Vector min_dist =
      (points.rowwise() - model.centers.row(0)).rowwise().squaredNorm();
  for (int c = 1; c < k; ++c) {
    Eigen::Index far = 0;
    for (Eigen::Index i = 1; i < n; ++i)
      if (min_dist[i] > min_dist[far]) far = i;
    model.centers.row(c) = points.row(far);
    min_dist = min_dist.cwiseMin(
        (points.rowwise() - model.centers.row(c)).rowwise().squaredNorm());
  }

  std::vector<int> assignments(static_cast<std::size_t>(n), -1);
  for (int iter = 0; iter < max_iter; ++iter) {
    Matrix dists = squared_distances(points, model.centers);
    std::vector<int> next = nearest_center(dists);

    // Re-seed empty clusters from the point farthest from its center.
    std::vector<Eigen::Index> counts(static_cast<std::size_t>(k), 0);
    for (int a : next) ++counts[static_cast<std::size_t>(a)];
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) continue;
      Eigen::Index far = 0;
      double far_d = -1.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        const double d = dists(i, next[static_cast<std::size_t>(i)]);
        if (d > far_d && counts[static_cast<std::size_t>(
                             next[static_cast<std::size_t>(i)])] > 1) {
          far_d = d;
          far = i;
        }
      }
      --counts[static_cast<std::size_t>(next[static_cast<std::size_t>(far)])];
      next[static_cast<std::size_t>(far)] = c;
      counts[static_cast<std::size_t>(c)] = 1;
      model.centers.row(c) = points.row(far);
    }

    const bool stable = next == assignments;
    assignments = std::move(next);
    if (inertia_trace != nullptr) {
      // Recomputed directly since a reseed may have moved a center.
      double inertia = 0.0;
      for (Eigen::Index i = 0; i < n; ++i)
        inertia += (points.row(i) -
                    model.centers.row(assignments[static_cast<std::size_t>(i)]))
                       .squaredNorm();
      inertia_trace->push_back(inertia);
    }

    // Update step: centers become the mean of their members.
    Matrix sums = Matrix::Zero(k, points.cols());
    std::vector<Eigen::Index> sizes(static_cast<std::size_t>(k), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      sums.row(assignments[static_cast<std::size_t>(i)]) += points.row(i);
      ++sizes[static_cast<std::size_t>(assignments[static_cast<std::size_t>(i)])];
    }
    for (int c = 0; c < k; ++c)
      if (sizes[static_cast<std::size_t>(c)] > 0)
        model.centers.row(c) =
            sums.row(c) / static_cast<double>(sizes[static_cast<std::size_t>(c)]);

    if (stable) break;
  }

  // Final assignment against the final centers.
  Matrix dists = squared_distances(points, model.centers);
  model.assignments = nearest_center(dists);
  model.inertia = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    model.inertia += dists(i, model.assignments[static_cast<std::size_t>(i)]);
  return model;
}

namespace {

// Similarity rows of every domain category against the full domain.
Matrix category_similarity_rows(const CategoryDomain& domain,
                                const SimilarityMeasure& m) {
  SimilarityScorer scorer(m, domain.categories);
  Matrix rows(static_cast<Eigen::Index>(domain.k()),
              static_cast<Eigen::Index>(domain.k()));
  for (std::size_t i = 0; i < domain.k(); ++i)
    rows.row(static_cast<Eigen::Index>(i)) =
        scorer.score(domain.categories[i]).transpose();
  return rows;
}

// Similarity rows of up to `subsample` seeded-uniform category instances
// (instances are training occurrences, so frequent categories weigh more).
Matrix instance_similarity_rows(const CategoryDomain& domain,
                                const Matrix& category_rows,
                                std::size_t subsample, std::uint64_t seed) {
  const std::int64_t total =
      std::accumulate(domain.frequencies.begin(), domain.frequencies.end(),
                      std::int64_t{0});
  std::vector<std::size_t> picked;
  if (static_cast<std::size_t>(total) <= subsample) {
    for (std::size_t c = 0; c < domain.k(); ++c)
      for (std::int64_t r = 0; r < domain.frequencies[c]; ++r)
        picked.push_back(c);
  } else {
    std::vector<std::int64_t> cumulative(domain.k());
    std::partial_sum(domain.frequencies.begin(), domain.frequencies.end(),
                     cumulative.begin());
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::int64_t> pick(0, total - 1);
    picked.reserve(subsample);
    for (std::size_t s = 0; s < subsample; ++s) {
      const std::int64_t inst = pick(rng);
      const auto it =
          std::upper_bound(cumulative.begin(), cumulative.end(), inst);
      picked.push_back(
          static_cast<std::size_t>(it - cumulative.begin()));
    }
  }
  Matrix rows(static_cast<Eigen::Index>(picked.size()), category_rows.cols());
  for (std::size_t i = 0; i < picked.size(); ++i)
    rows.row(static_cast<Eigen::Index>(i)) =
        category_rows.row(static_cast<Eigen::Index>(picked[i]));
  return rows;
}

}  // namespace

PrototypeSet kmeans_prototypes(const CategoryDomain& domain,
                               const SimilarityMeasure& m, std::size_t d,
                               std::size_t subsample, std::uint64_t seed) {
  if (d < 1 || d > domain.k())
    throw std::invalid_argument("kmeans_prototypes: need 1 <= d <= k");
  const Matrix cat_rows = category_similarity_rows(domain, m);
  const Matrix sample = instance_similarity_rows(domain, cat_rows, subsample, seed);
  const KMeansModel model =
      kmeans(sample, static_cast<int>(d), seed, 100);

  // Per cluster, the not-yet-chosen category nearest the center (ties go to
  // the lowest category index), so the prototype list stays distinct.
  const Matrix dists = squared_distances(cat_rows, model.centers);
  std::vector<bool> taken(domain.k(), false);
  PrototypeSet ps;
  ps.method = PrototypeMethod::KMeans;
  ps.prototypes.reserve(d);
  for (int c = 0; c < static_cast<int>(d); ++c) {
    Eigen::Index best = -1;
    for (Eigen::Index i = 0; i < dists.rows(); ++i) {
      if (taken[static_cast<std::size_t>(i)]) continue;
      if (best < 0 || dists(i, c) < dists(best, c)) best = i;
    }
    taken[static_cast<std::size_t>(best)] = true;
    ps.prototypes.push_back(domain.categories[static_cast<std::size_t>(best)]);
  }
  return ps;
}

FeatureMatrix reduce_by_prototypes(const std::vector<std::string>& values,
                                   const PrototypeSet& protos,
                                   const SimilarityMeasure& m) {
  if (protos.prototypes.empty())
    throw std::invalid_argument("reduce_by_prototypes: empty prototype set");
  return pairwise_similarity(values, protos.prototypes, m);
}

FittedEncoder dedup_merge_encoder(const CategoryDomain& domain,
                                  const SimilarityMeasure& m, std::size_t d,
                                  std::uint64_t seed, std::size_t subsample) {
  if (d < 1 || d > domain.k())
    throw std::invalid_argument("dedup_merge_encoder: need 1 <= d <= k");
  const Matrix cat_rows = category_similarity_rows(domain, m);
  const Matrix sample = instance_similarity_rows(domain, cat_rows, subsample, seed);
  const KMeansModel model =
      kmeans(sample, static_cast<int>(d), seed, 100);
  const Matrix dists = squared_distances(cat_rows, model.centers);
  std::vector<int> cluster_ids = nearest_center(dists);
  return FittedEncoder::from_cluster_map(domain, m, std::move(cluster_ids),
                                         static_cast<int>(d));
}

}  // namespace simenc
