#include <doctest.h>

#include <cstdio>

#include "simenc/serialize.hpp"

using namespace simenc;

namespace {

// Tab, newline, backslash and UTF-8 all have to survive the text format.
const std::vector<std::string> kNastyColumn = {
    "plain", "with\ttab", "with\nnewline", "back\\slash", "caf\xc3\xa9",
    "plain", "with\ttab"};

void check_round_trip(const FittedEncoder& enc) {
  const std::string text = serialize_encoder(enc);
  const FittedEncoder back = deserialize_encoder(text);
  CHECK(back == enc);
  CHECK(serialize_encoder(back) == text);  // byte-identical re-emission
  const std::vector<std::string> probes = {"plain", "caf\xc3\xa9", "unseen",
                                           ""};
  CHECK(back.transform(probes).values == enc.transform(probes).values);
  CHECK(back.column_labels() == enc.column_labels());
}

}  // namespace

TEST_CASE("encoder round trips") {
  SUBCASE("one hot") { check_round_trip(fit(EncoderSpec::one_hot(), kNastyColumn)); }

  SUBCASE("similarity") {
    for (const auto& m :
         {SimilarityMeasure::ngram(3), SimilarityMeasure::levenshtein_ratio(),
          SimilarityMeasure::jaro_winkler(0.05),
          SimilarityMeasure::exact_match()})
      check_round_trip(fit(EncoderSpec::similarity(m), kNastyColumn));
  }

  SUBCASE("hashing") {
    check_round_trip(fit(EncoderSpec::hashing(64), kNastyColumn));
  }

  SUBCASE("target, regression") {
    TargetColumn t;
    t.task = TaskKind::Regression;
    t.numeric = Vector{{1, 2, 3, 4, 5, 6, 7}};
    check_round_trip(fit(EncoderSpec::target(2.5), kNastyColumn, &t));
  }

  SUBCASE("target and mdv, classification") {
    TargetColumn t;
    t.task = TaskKind::MulticlassClf;
    t.labels = {"x", "y", "z", "x", "y", "z", "x"};
    check_round_trip(fit(EncoderSpec::target(1.0), kNastyColumn, &t));
    check_round_trip(fit(EncoderSpec::mdv(), kNastyColumn, &t));
  }

  SUBCASE("bag of ngrams") {
    check_round_trip(fit(EncoderSpec::bag_of_ngrams(2), kNastyColumn));
  }

  SUBCASE("cluster one hot") {
    const auto domain = CategoryDomain::from_column(kNastyColumn);
    check_round_trip(dedup_merge_encoder(domain, SimilarityMeasure::ngram(2), 3));
  }
}

TEST_CASE("prototype state round trips") {
  SerializedState state;
  state.type = SerializedState::Type::Prototypes;
  state.measure = SimilarityMeasure::ngram(3);
  state.prototypes.method = PrototypeMethod::KMeans;
  state.prototypes.prototypes = {"paris", "lon\tdon", "ber\\lin"};

  const std::string text = serialize_state(state);
  const SerializedState back = deserialize_state(text);
  CHECK(back.type == SerializedState::Type::Prototypes);
  CHECK(back.measure == state.measure);
  CHECK(back.prototypes.method == PrototypeMethod::KMeans);
  CHECK(back.prototypes.prototypes == state.prototypes.prototypes);
  CHECK(!back.reduction.has_value());
  CHECK(serialize_state(back) == text);
}

TEST_CASE("reduction annotation survives") {
  SerializedState state;
  state.encoder = fit(EncoderSpec::similarity(SimilarityMeasure::ngram(3)),
                      kNastyColumn);
  ReductionState red;
  red.kind = ReductionKind::Projection;
  red.d = 16;
  red.seed = 99;
  state.reduction = red;

  const std::string text = serialize_state(state);
  const SerializedState back = deserialize_state(text);
  REQUIRE(back.reduction.has_value());
  CHECK(back.reduction->kind == ReductionKind::Projection);
  CHECK(back.reduction->d == 16);
  CHECK(back.reduction->seed == 99);
  CHECK(serialize_state(back) == text);
}

TEST_CASE("format hygiene") {
  const std::string text =
      serialize_encoder(fit(EncoderSpec::one_hot(), {"a", "b"}));
  CHECK(text.rfind("simenc-encoder v1\n", 0) == 0);
  CHECK(text.substr(text.size() - 4) == "end\n");

  CHECK_THROWS_AS(deserialize_state("garbage\n"), std::runtime_error);
  CHECK_THROWS_AS(deserialize_state("simenc-encoder v1\nkind one_hot\n"),
                  std::runtime_error);  // truncated, no "end"
  CHECK_THROWS_AS(
      deserialize_state("simenc-encoder v1\nkind one_hot\nbogus 1\nend\n"),
      std::runtime_error);

  SUBCASE("doubles survive the 17-digit text representation exactly") {
    TargetColumn t;
    t.task = TaskKind::Regression;
    t.numeric = Vector{{1.0 / 3.0, 0.1, 2e-300, 12345.678901234567}};
    const auto enc =
        fit(EncoderSpec::target(1.0 / 7.0), {"a", "b", "a", "c"}, &t);
    const auto back = deserialize_encoder(serialize_encoder(enc));
    CHECK(back.stats.prior == enc.stats.prior);
    CHECK(back.stats.conditional == enc.stats.conditional);
    CHECK(back.stats.m_shrink == enc.stats.m_shrink);
  }
}

TEST_CASE("file save and load") {
  const std::string path = "serialize_test_state.tmp";
  SerializedState state;
  state.encoder = fit(EncoderSpec::bag_of_ngrams(3), kNastyColumn);
  save_state(state, path);
  const SerializedState back = load_state(path);
  CHECK(back.encoder == state.encoder);
  std::remove(path.c_str());

  CHECK_THROWS_AS(load_state("no/such/dir/state"), std::runtime_error);
  CHECK_THROWS_AS(save_state(state, "no/such/dir/state"), std::runtime_error);
}
