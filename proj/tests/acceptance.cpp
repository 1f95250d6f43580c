#include <doctest.h>

#include <chrono>
#include <cstdio>
#include <random>

#include "oracles.hpp"
#include "simenc/pipeline.hpp"
#include "simenc/serialize.hpp"

using namespace simenc;

namespace {

// Each criterion reports a single line so a full run reads as a checklist.
struct Criterion {
  explicit Criterion(const char* name) : name_(name) {}
  ~Criterion() {
    std::printf("%s ... %s\n", name_, ok_ ? "pass" : "FAIL");
    std::fflush(stdout);
  }
  void expect(bool cond) {
    CHECK(cond);
    if (!cond) ok_ = false;
  }

 private:
  const char* name_;
  bool ok_ = true;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

DirtyCorpus desk_corpus() {
  DirtyCorpusSpec spec;
  spec.n_entities = 200;
  spec.samples = 5000;
  spec.corruption_prob = 0.3;
  spec.task = TaskKind::Regression;
  spec.seed = 20;
  return generate_dirty_corpus(spec);
}

}  // namespace

TEST_CASE("similarity axioms hold on random pairs") {
  Criterion c("similarity axioms (1000 random pairs per measure)");
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<SimilarityMeasure> measures = {
      SimilarityMeasure::levenshtein_ratio(),
      SimilarityMeasure::jaro_winkler(0.1), SimilarityMeasure::ngram(3),
      SimilarityMeasure::exact_match()};
  std::mt19937_64 rng(1);
  for (const auto& m : measures) {
    bool ok = true;
    for (int t = 0; t < 1000; ++t) {
      const std::string a = oracle::random_string(rng, 12);
      const std::string b = oracle::random_string(rng, 12);
      const double ab = m(a, b);
      ok = ok && ab == m(b, a) && ab >= 0.0 && ab <= 1.0 && m(a, a) == 1.0;
    }
    c.expect(ok);
  }
  c.expect(seconds_since(t0) < 5.0);
}

TEST_CASE("worked 3-gram example is exact") {
  Criterion c("3-gram similarity of paris/parisian is exactly 0.5");
  c.expect(sim_ngram("paris", "parisian", 3) == 0.5);
}

TEST_CASE("edit-distance oracle equivalence") {
  Criterion c("edit distance matches brute force and the LCS identity");
  const auto t0 = std::chrono::steady_clock::now();
  const auto strings = oracle::all_strings("abc", 5);
  bool brute_ok = true, lcs_ok = true;
  for (const auto& a : strings)
    for (const auto& b : strings) {
      const double d = levenshtein_distance(a, b);
      brute_ok = brute_ok && d == oracle::brute_force_edit_cost(a, b);
      lcs_ok = lcs_ok && d == static_cast<double>(a.size() + b.size()) -
                                  2.0 * static_cast<double>(
                                            oracle::lcs_length(a, b));
    }
  c.expect(brute_ok);
  c.expect(lcs_ok);
  c.expect(seconds_since(t0) < 60.0);
}

TEST_CASE("exact-match encoding degenerates to one-hot") {
  Criterion c("exact-match similarity is bit-identical to one-hot");
  const std::vector<std::vector<std::string>> fixtures = {
      {"a"},
      {"a", "b", "a", "c"},
      {"pfizer", "pfizer inc", "pfizer", "roche", "nan"},
      {"caf\xc3\xa9", "cafe", "with space", "with\ttab"},
  };
  for (const auto& column : fixtures) {
    const auto sim =
        fit(EncoderSpec::similarity(SimilarityMeasure::exact_match()), column);
    const auto oh = fit(EncoderSpec::one_hot(), column);
    std::vector<std::string> probes = column;
    probes.push_back("definitely unseen");
    probes.push_back("");
    const Matrix sm = sim.transform(probes).values;
    c.expect(sm == oh.transform(probes).values);
    c.expect(sm.row(sm.rows() - 2).isZero(0.0));  // unseen -> zero vector
  }
}

TEST_CASE("kernel identity on a random domain") {
  Criterion c("implicit kernel equals encoded-row dot products (1e-12)");
  std::mt19937_64 rng(17);
  std::vector<std::string> domain;
  while (domain.size() < 50) {
    std::string s = oracle::random_string(rng, 12);
    if (std::find(domain.begin(), domain.end(), s) == domain.end())
      domain.push_back(std::move(s));
  }
  const SimilarityMeasure m = SimilarityMeasure::ngram(3);
  const auto rows = pairwise_similarity(domain, domain, m);
  double worst = 0.0;
  for (std::size_t i = 0; i < domain.size(); ++i)
    for (std::size_t j = i; j < domain.size(); ++j) {
      const double dot = rows.values.row(static_cast<Eigen::Index>(i))
                             .dot(rows.values.row(static_cast<Eigen::Index>(j)));
      const double k = implicit_kernel(domain[i], domain[j], domain, m);
      worst = std::max(worst, std::abs(k - dot) / std::max(1.0, std::abs(dot)));
    }
  c.expect(worst <= 1e-12);
}

TEST_CASE("projection preserves distances") {
  Criterion c("random projection keeps 95% of squared distances within 20%");
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(23);
  std::normal_distribution<double> g(0.0, 1.0);
  FeatureMatrix X;
  X.values.resize(200, 2000);
  for (Eigen::Index i = 0; i < X.values.rows(); ++i) {
    for (Eigen::Index j = 0; j < X.values.cols(); ++j) X.values(i, j) = g(rng);
    X.values.row(i).normalize();
  }
  const auto P = random_projection(X, 1000, 6);
  int within = 0;
  for (Eigen::Index p = 0; p < 100; ++p) {
    const Eigen::Index i = 2 * p, j = 2 * p + 1;
    const double orig = (X.values.row(i) - X.values.row(j)).squaredNorm();
    const double proj = (P.values.row(i) - P.values.row(j)).squaredNorm();
    if (std::abs(proj - orig) <= 0.2 * orig) ++within;
  }
  c.expect(within >= 95);
  c.expect(seconds_since(t0) < 30.0);
}

TEST_CASE("test rows cannot leak into training state") {
  Criterion c("mutating test rows never changes fitted training state");
  DataTable table;
  table.dirty = {"alpha", "alphva", "beta", "betta", "gamma", "alpha",
                 "beta", "gamma", "delta", "delt a"};
  table.numeric.resize(10, 1);
  table.numeric.col(0) << 1, 2, 3, 4, 5, 6, 7, 8, 9, 10;
  table.numeric_names = {"x"};
  table.target.task = TaskKind::Regression;
  table.target.numeric = Vector::LinSpaced(10, 0.0, 9.0);
  SplitIndices idx;
  idx.train = {0, 1, 2, 3, 4, 5, 6};
  idx.test = {7, 8, 9};

  DataTable mutated = table;
  for (Eigen::Index i : idx.test) {
    mutated.dirty[static_cast<std::size_t>(i)] = "poisoned value";
    mutated.numeric(i, 0) = -1e9;
    mutated.target.numeric[i] = 1e9;
  }

  std::vector<MethodSpec> methods;
  {
    MethodSpec m;
    m.name = "one_hot";
    m.encoder = EncoderSpec::one_hot();
    methods.push_back(m);
    m.name = "sim";
    m.encoder = EncoderSpec::similarity(SimilarityMeasure::ngram(3));
    methods.push_back(m);
    m.name = "sim_mf";
    m.reduction = ReductionKind::MostFrequent;
    m.d = 3;
    methods.push_back(m);
    m.name = "sim_km";
    m.reduction = ReductionKind::KMeansProto;
    methods.push_back(m);
    m.name = "dedup";
    m.reduction = ReductionKind::DedupMerge;
    methods.push_back(m);
    m.name = "target";
    m.reduction = ReductionKind::None;
    m.encoder = EncoderSpec::target(1.0);
    methods.push_back(m);
  }
  for (const auto& method : methods) {
    const auto before = assemble_features(table, idx, method, 31);
    const auto after = assemble_features(mutated, idx, method, 31);
    c.expect(before.train == after.train);
    c.expect(before.columns == after.columns);
  }

  // The fitted encoder itself only ever sees train rows.
  const auto train_dirty = std::vector<std::string>(
      table.dirty.begin(), table.dirty.begin() + 7);
  const auto enc = fit(EncoderSpec::similarity(SimilarityMeasure::ngram(3)),
                       train_dirty);
  const std::string state = serialize_encoder(enc);
  (void)enc.transform({"poisoned value"});
  c.expect(serialize_encoder(enc) == state);
}

TEST_CASE("similarity encoding beats one-hot on a dirty corpus") {
  Criterion c("directional benchmark: 3-gram > one-hot, reduced 3-gram > one-hot");
  const auto t0 = std::chrono::steady_clock::now();
  const DataTable table = desk_corpus().to_table();

  BenchmarkConfig cfg;
  cfg.n_splits = 20;
  cfg.seed = 7;
  MethodSpec oh;
  oh.name = "one_hot";
  oh.encoder = EncoderSpec::one_hot();
  MethodSpec sim;
  sim.name = "sim_ngram3";
  sim.encoder = EncoderSpec::similarity(SimilarityMeasure::ngram(3));
  MethodSpec km = sim;
  km.name = "sim_ngram3_kmeans100";
  km.reduction = ReductionKind::KMeansProto;
  km.d = 100;
  cfg.methods = {oh, sim, km};

  const auto result = run_benchmark(table, cfg);
  std::printf("    medians: one_hot=%.4f sim_ngram3=%.4f kmeans100=%.4f\n",
              result.medians[0], result.medians[1], result.medians[2]);
  c.expect(result.medians[1] > result.medians[0]);
  c.expect(result.medians[2] > result.medians[0]);
  const double elapsed = seconds_since(t0);
  std::printf("    benchmark wall time: %.1f s\n", elapsed);
  c.expect(elapsed < 600.0);
}

TEST_CASE("3-gram histogram sits left of levenshtein-ratio") {
  Criterion c("median 3-gram similarity <= median levenshtein-ratio similarity");
  const auto corpus = desk_corpus();
  const auto ng = similarity_histogram(corpus.values,
                                       SimilarityMeasure::ngram(3), 10000, 13);
  const auto lev = similarity_histogram(
      corpus.values, SimilarityMeasure::levenshtein_ratio(), 10000, 13);
  c.expect(ng.median <= lev.median);
}

TEST_CASE("learner numerics") {
  Criterion c("ridge normal equations and logistic gradients check out");
  std::mt19937_64 rng(29);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int t = 0; t < 20; ++t) {
    const Eigen::Index n = 20 + t, p = 3 + t % 5;
    Matrix X(n, p);
    Vector y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < p; ++j) X(i, j) = g(rng);
      y[i] = g(rng);
    }
    const double lambda = 0.5 + t * 0.25;
    const auto fit = ridge_fit(X, y, {lambda}, 3, static_cast<std::uint64_t>(t));
    const Matrix Xc = X.rowwise() - X.colwise().mean();
    const Vector yc = y.array() - y.mean();
    const Vector lhs =
        (Xc.transpose() * Xc + lambda * Matrix::Identity(p, p)) * fit.weights;
    const Vector rhs = Xc.transpose() * yc;
    c.expect((lhs - rhs).norm() <= 1e-8 * std::max(1.0, rhs.norm()));
  }

  const int n = 15, p = 4, k = 3;
  Matrix X(n, p);
  std::vector<int> y_idx;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) X(i, j) = g(rng);
    y_idx.push_back(static_cast<int>(i) % k);
  }
  Matrix W(p, k);
  Vector b(k);
  for (Eigen::Index i = 0; i < p; ++i)
    for (Eigen::Index j = 0; j < k; ++j) W(i, j) = g(rng);
  for (Eigen::Index j = 0; j < k; ++j) b[j] = g(rng);
  Matrix grad_W;
  Vector grad_b;
  const Vector ones = Vector::Ones(n);
  logistic_loss_grad(X, y_idx, ones, k, W, b, 0.3, &grad_W, &grad_b);
  const double h = 1e-6;
  bool grad_ok = true;
  for (Eigen::Index i = 0; i < p; ++i)
    for (Eigen::Index j = 0; j < k; ++j) {
      Matrix Wp = W, Wm = W;
      Wp(i, j) += h;
      Wm(i, j) -= h;
      const double num =
          (logistic_loss_grad(X, y_idx, ones, k, Wp, b, 0.3, nullptr, nullptr) -
           logistic_loss_grad(X, y_idx, ones, k, Wm, b, 0.3, nullptr, nullptr)) /
          (2 * h);
      grad_ok = grad_ok && std::abs(grad_W(i, j) - num) <=
                               1e-5 * std::max(1.0, std::abs(num));
    }
  for (Eigen::Index j = 0; j < k; ++j) {
    Vector bp = b, bm = b;
    bp[j] += h;
    bm[j] -= h;
    const double num =
        (logistic_loss_grad(X, y_idx, ones, k, W, bp, 0.3, nullptr, nullptr) -
         logistic_loss_grad(X, y_idx, ones, k, W, bm, 0.3, nullptr, nullptr)) /
        (2 * h);
    grad_ok =
        grad_ok && std::abs(grad_b[j] - num) <= 1e-5 * std::max(1.0, std::abs(num));
  }
  c.expect(grad_ok);
}

TEST_CASE("benchmark runs are byte reproducible") {
  Criterion c("benchmark twice with one seed yields byte-identical reports");
  DirtyCorpusSpec spec;
  spec.n_entities = 40;
  spec.samples = 500;
  spec.seed = 3;
  const DataTable table = generate_dirty_corpus(spec).to_table();

  BenchmarkConfig cfg;
  cfg.n_splits = 6;
  cfg.seed = 77;
  MethodSpec oh;
  oh.name = "one_hot";
  oh.encoder = EncoderSpec::one_hot();
  MethodSpec sim;
  sim.name = "sim_ngram3";
  sim.encoder = EncoderSpec::similarity(SimilarityMeasure::ngram(3));
  cfg.methods = {oh, sim};

  const auto r1 = run_benchmark(table, cfg);
  const auto r2 = run_benchmark(table, cfg);
  c.expect(results_csv(r1) == results_csv(r2));
  c.expect(summary_csv(r1) == summary_csv(r2));
  c.expect(boxplot_csv(r1) == boxplot_csv(r2));
}
