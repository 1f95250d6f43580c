#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "simenc/reduction.hpp"

using namespace simenc;

TEST_CASE("random projection") {
  SUBCASE("identity hook leaves X unchanged") {
    FeatureMatrix X;
    X.values = Matrix::Random(4, 3);
    ProjectionMatrix identity;
    identity.entries = Matrix::Identity(3, 3);
    CHECK(X.values * identity.entries == X.values);
  }

  SUBCASE("zero input maps to zero output") {
    FeatureMatrix X;
    X.values = Matrix::Zero(5, 8);
    const auto out = random_projection(X, 4, 1);
    CHECK(out.values == Matrix::Zero(5, 4));
    CHECK(out.columns.size() == 4);
  }

  SUBCASE("deterministic and linear in the input for a fixed seed") {
    FeatureMatrix X, Y;
    X.values = Matrix::Random(6, 10);
    Y.values = Matrix::Random(6, 10);
    FeatureMatrix combo;
    combo.values = 2.0 * X.values + 3.0 * Y.values;
    const auto px = random_projection(X, 5, 9);
    const auto px2 = random_projection(X, 5, 9);
    const auto py = random_projection(Y, 5, 9);
    const auto pc = random_projection(combo, 5, 9);
    CHECK(px.values == px2.values);
    CHECK((pc.values - (2.0 * px.values + 3.0 * py.values)).cwiseAbs().maxCoeff() <
          1e-9);
  }

  SUBCASE("approximately preserves squared distances") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g(0.0, 1.0);
    FeatureMatrix X;
    X.values.resize(40, 400);
    for (Eigen::Index i = 0; i < X.values.rows(); ++i) {
      for (Eigen::Index j = 0; j < X.values.cols(); ++j)
        X.values(i, j) = g(rng);
      X.values.row(i).normalize();
    }
    const auto P = random_projection(X, 200, 17);
    int ok = 0;
    for (Eigen::Index i = 0; i + 1 < X.values.rows(); i += 2) {
      const double orig =
          (X.values.row(i) - X.values.row(i + 1)).squaredNorm();
      const double proj = (P.values.row(i) - P.values.row(i + 1)).squaredNorm();
      if (std::abs(proj - orig) <= 0.3 * orig) ++ok;
    }
    CHECK(ok >= 17);  // 20 pairs, generous tolerance at this small d
  }
}

TEST_CASE("most frequent prototypes") {
  CategoryDomain domain;
  domain.categories = {"c", "a", "b"};
  domain.frequencies = {1, 5, 3};
  for (std::size_t i = 0; i < domain.categories.size(); ++i)
    domain.index[domain.categories[i]] = i;

  CHECK(most_frequent_prototypes(domain, 2).prototypes ==
        std::vector<std::string>{"a", "b"});
  CHECK(most_frequent_prototypes(domain, 3).prototypes.size() == 3);
  CHECK_THROWS_AS(most_frequent_prototypes(domain, 4), std::invalid_argument);

  SUBCASE("frequency ties break lexicographically") {
    CategoryDomain tied;
    tied.categories = {"b", "a"};
    tied.frequencies = {2, 2};
    tied.index = {{"b", 0}, {"a", 1}};
    CHECK(most_frequent_prototypes(tied, 1).prototypes ==
          std::vector<std::string>{"a"});
  }
}

TEST_CASE("kmeans") {
  SUBCASE("k equals n gives zero inertia") {
    Matrix points = Matrix::Random(6, 2);
    const auto model = kmeans(points, 6, 0);
    CHECK(model.inertia == doctest::Approx(0.0));
  }

  SUBCASE("k = 1 center is the mean") {
    Matrix points(3, 2);
    points << 0, 0, 1, 0, 2, 3;
    const auto model = kmeans(points, 1, 0);
    CHECK((model.centers.row(0).transpose() -
           Vector{{1.0, 1.0}}).cwiseAbs().maxCoeff() < 1e-12);
  }

  SUBCASE("recovers two well-separated blobs") {
    std::mt19937_64 rng(21);
    std::normal_distribution<double> noise(0.0, 0.5);
    Matrix points(40, 2);
    for (Eigen::Index i = 0; i < 40; ++i) {
      const double cx = i < 20 ? 0.0 : 10.0;
      points(i, 0) = cx + noise(rng);
      points(i, 1) = noise(rng);
    }
    std::vector<double> trace;
    const auto model = kmeans(points, 2, 4, 100, &trace);
    for (Eigen::Index i = 1; i < 20; ++i)
      CHECK(model.assignments[static_cast<std::size_t>(i)] ==
            model.assignments[0]);
    for (Eigen::Index i = 21; i < 40; ++i)
      CHECK(model.assignments[static_cast<std::size_t>(i)] ==
            model.assignments[20]);
    CHECK(model.assignments[0] != model.assignments[20]);

    for (std::size_t t = 1; t < trace.size(); ++t)
      CHECK(trace[t] <= trace[t - 1] + 1e-9);

    // Final assignment maps every point to its nearest center.
    for (Eigen::Index i = 0; i < 40; ++i) {
      const double assigned =
          (points.row(i) -
           model.centers.row(model.assignments[static_cast<std::size_t>(i)]))
              .squaredNorm();
      for (int c = 0; c < 2; ++c)
        CHECK(assigned <= (points.row(i) - model.centers.row(c)).squaredNorm() +
                              1e-12);
    }
  }

  SUBCASE("argument validation") {
    CHECK_THROWS_AS(kmeans(Matrix::Random(3, 2), 4, 0), std::invalid_argument);
    CHECK_THROWS_AS(kmeans(Matrix::Random(3, 2), 2, 0, 0), std::invalid_argument);
  }
}

TEST_CASE("kmeans prototypes") {
  // Two families whose members share 2-grams within but not across.
  const auto domain = CategoryDomain::from_column({"aaa", "aab", "zzz", "zzy"});

  SUBCASE("d = k returns every category") {
    auto protos = kmeans_prototypes(domain, SimilarityMeasure::ngram(2), 4);
    std::sort(protos.prototypes.begin(), protos.prototypes.end());
    CHECK(protos.prototypes ==
          std::vector<std::string>{"aaa", "aab", "zzy", "zzz"});
  }

  SUBCASE("d = 2 splits the two letter families") {
    const auto protos =
        kmeans_prototypes(domain, SimilarityMeasure::ngram(2), 2);
    REQUIRE(protos.prototypes.size() == 2);
    int from_a = 0, from_z = 0;
    for (const auto& p : protos.prototypes) {
      if (p == "aaa" || p == "aab") ++from_a;
      if (p == "zzz" || p == "zzy") ++from_z;
    }
    CHECK(from_a == 1);
    CHECK(from_z == 1);
  }

  SUBCASE("deterministic under a fixed seed") {
    const auto p1 =
        kmeans_prototypes(domain, SimilarityMeasure::ngram(2), 2, 3000, 77);
    const auto p2 =
        kmeans_prototypes(domain, SimilarityMeasure::ngram(2), 2, 3000, 77);
    CHECK(p1.prototypes == p2.prototypes);
  }

  CHECK_THROWS_AS(kmeans_prototypes(domain, SimilarityMeasure::ngram(2), 5),
                  std::invalid_argument);
}

TEST_CASE("reduce by prototypes") {
  const std::vector<std::string> column = {"Paris", "Parisian", "Paris"};
  const auto domain = CategoryDomain::from_column(column);
  const SimilarityMeasure m = SimilarityMeasure::ngram(3);

  SUBCASE("whole-domain prototypes equal the full similarity encoding") {
    PrototypeSet full;
    full.prototypes = domain.categories;
    const auto reduced = reduce_by_prototypes(column, full, m);
    const auto enc = fit(EncoderSpec::similarity(m), column);
    CHECK(reduced.values == enc.transform(column).values);
  }

  SUBCASE("a prototype scores 1 in its own column") {
    PrototypeSet protos;
    protos.prototypes = {"Parisian"};
    const auto reduced = reduce_by_prototypes({"Parisian"}, protos, m);
    CHECK(reduced.values(0, 0) == 1.0);
  }

  SUBCASE("unseen value scores per measure") {
    PrototypeSet protos;
    protos.prototypes = {"Paris", "Parisian"};
    const auto reduced = reduce_by_prototypes({"Pariss"}, protos, m);
    CHECK(reduced.values(0, 0) == doctest::Approx(3.0 / 4.0));
    CHECK(reduced.values(0, 1) == doctest::Approx(3.0 / 7.0));
  }

  SUBCASE("prototype columns are column-subsets of the full encoding") {
    std::mt19937_64 rng(8);
    std::vector<std::string> col;
    for (int i = 0; i < 30; ++i)
      col.push_back(oracle::random_string(rng, 6, "abcd"));
    const auto dom = CategoryDomain::from_column(col);
    const auto protos = most_frequent_prototypes(dom, std::min<std::size_t>(5, dom.k()));
    const auto reduced = reduce_by_prototypes(col, protos, m);
    const auto full = fit(EncoderSpec::similarity(m), col).transform(col);
    for (std::size_t j = 0; j < protos.prototypes.size(); ++j) {
      const auto full_col = static_cast<Eigen::Index>(
          *dom.find(protos.prototypes[j]));
      CHECK(reduced.values.col(static_cast<Eigen::Index>(j)) ==
            full.values.col(full_col));
    }
  }
}

TEST_CASE("dedup merge encoder") {
  SUBCASE("groups spelling variants") {
    const auto domain =
        CategoryDomain::from_column({"midwest", "mid west", "southern"});
    const auto enc =
        dedup_merge_encoder(domain, SimilarityMeasure::ngram(3), 2);
    CHECK(enc.output_dim == 2);
    CHECK(enc.cluster_ids[0] == enc.cluster_ids[1]);  // midwest ~ mid west
    CHECK(enc.cluster_ids[0] != enc.cluster_ids[2]);
  }

  SUBCASE("d = k reduces to one-hot for in-domain values") {
    const std::vector<std::string> column = {"aa", "bb", "cc"};
    const auto domain = CategoryDomain::from_column(column);
    const auto enc =
        dedup_merge_encoder(domain, SimilarityMeasure::ngram(2), 3);
    const auto oh = fit(EncoderSpec::one_hot(), column);
    // Cluster ids may permute, so compare up to column permutation by
    // checking each value lands in its own singleton cluster.
    const auto tr = enc.transform(column);
    CHECK(tr.values.colwise().sum() == Matrix::Ones(1, 3));
    CHECK(tr.values.rowwise().sum() == Matrix::Ones(3, 1));
    CHECK(oh.transform(column).values.rows() == tr.values.rows());
  }
}
