#pragma once

#include <optional>
#include <string>

#include "simenc/encoders.hpp"
#include "simenc/pipeline.hpp"
#include "simenc/reduction.hpp"

namespace simenc {

/// Optional reduction attached to a serialized encoder so a fit/transform
/// pair of CLI invocations can reproduce the reduced output.
struct ReductionState {
  ReductionKind kind = ReductionKind::None;
  std::size_t d = 0;
  std::uint64_t seed = 0;
};

/// Everything a serialized state file can hold: a fitted encoder or a
/// prototype set, plus the optional reduction annotation.
struct SerializedState {
  enum class Type { Encoder, Prototypes };

  Type type = Type::Encoder;
  FittedEncoder encoder;      // Type::Encoder
  PrototypeSet prototypes;    // Type::Prototypes
  SimilarityMeasure measure;  // Type::Prototypes
  std::optional<ReductionState> reduction;
};

/// Versioned, self-describing flat text format ("simenc-encoder v1").
/// serialize(deserialize(text)) == text for every well-formed file.
std::string serialize_state(const SerializedState& state);
SerializedState deserialize_state(const std::string& text);

std::string serialize_encoder(const FittedEncoder& enc);
FittedEncoder deserialize_encoder(const std::string& text);

void save_state(const SerializedState& state, const std::string& path);
SerializedState load_state(const std::string& path);

}  // namespace simenc
