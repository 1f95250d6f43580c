#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "simenc/feature_matrix.hpp"
#include "simenc/similarity.hpp"

namespace simenc {

enum class TaskKind { Regression, BinaryClf, MulticlassClf };

std::string task_kind_name(TaskKind t);
TaskKind parse_task_kind(const std::string& s);

/// Supervised target for encoders that need one. Classification tasks carry
/// string labels; regression carries numeric values.
struct TargetColumn {
  TaskKind task = TaskKind::Regression;
  Vector numeric;                   // regression only
  std::vector<std::string> labels;  // classification only

  std::size_t size() const {
    return task == TaskKind::Regression ? static_cast<std::size_t>(numeric.size())
                                        : labels.size();
  }
  /// Distinct class labels in sorted order; empty for regression.
  std::vector<std::string> classes() const;
};

/// Ordered training vocabulary of a categorical column. Order is first
/// appearance in the column; categories are distinct.
struct CategoryDomain {
  std::vector<std::string> categories;
  std::vector<std::int64_t> frequencies;
  std::unordered_map<std::string, std::size_t> index;

  static CategoryDomain from_column(const std::vector<std::string>& column);

  std::size_t k() const { return categories.size(); }
  /// Index of v in the domain, or nullopt for unseen strings.
  std::optional<std::size_t> find(const std::string& v) const;

  bool operator==(const CategoryDomain& o) const {
    return categories == o.categories && frequencies == o.frequencies;
  }
};

struct EncoderSpec {
  enum class Kind {
    OneHot,
    Similarity,
    Hashing,
    Target,
    Mdv,
    BagOfNgrams,
    ClusterOneHot
  };

  Kind kind = Kind::OneHot;
  SimilarityMeasure measure;  // Similarity / ClusterOneHot
  int hash_dim = 256;
  double m_shrink = 1.0;  // Target shrinkage, > 0
  int ngram_n = 3;        // BagOfNgrams
  int n_clusters = 0;     // ClusterOneHot

  static EncoderSpec one_hot();
  static EncoderSpec similarity(SimilarityMeasure m);
  static EncoderSpec hashing(int dim = 256);
  static EncoderSpec target(double m_shrink = 1.0);
  static EncoderSpec mdv();
  static EncoderSpec bag_of_ngrams(int n = 3);
  static EncoderSpec cluster_one_hot(int c, SimilarityMeasure m);

  bool requires_target() const {
    return kind == Kind::Target || kind == Kind::Mdv;
  }

  std::string kind_name() const;
  bool operator==(const EncoderSpec&) const = default;
};

/// Per-category target statistics (shrunk conditional means, or per-class
/// occurrence probabilities for MDV).
struct TargetStats {
  double m_shrink = 1.0;
  TaskKind task = TaskKind::Regression;
  std::vector<std::string> classes;  // empty for regression
  Vector prior;                      // length output dim
  Matrix conditional;                // k x output dim

  bool operator==(const TargetStats& o) const {
    return m_shrink == o.m_shrink && task == o.task && classes == o.classes &&
           prior == o.prior && conditional == o.conditional;
  }
};

/// Immutable state produced by fitting an EncoderSpec to a column. Transforms
/// any string, seen or unseen, into a vector of exactly output_dim values.
struct FittedEncoder {
  EncoderSpec spec;
  CategoryDomain domain;
  TargetStats stats;                    // Target / Mdv
  std::vector<std::string> gram_vocab;  // BagOfNgrams, first-appearance order
  std::vector<int> cluster_ids;         // ClusterOneHot, per category
  Eigen::Index output_dim = 0;

  Vector encode(const std::string& v) const;
  FeatureMatrix transform(const std::vector<std::string>& values) const;

  /// Provenance label of each output column.
  std::vector<std::string> column_labels() const;

  /// Assembles a cluster-indicator encoder from an externally computed
  /// partition of the domain (cluster id per category, ids in [0, c)).
  static FittedEncoder from_cluster_map(CategoryDomain domain,
                                        SimilarityMeasure m,
                                        std::vector<int> cluster_ids,
                                        int n_clusters);

  bool operator==(const FittedEncoder& o) const {
    return spec == o.spec && domain == o.domain && stats == o.stats &&
           gram_vocab == o.gram_vocab && cluster_ids == o.cluster_ids &&
           output_dim == o.output_dim;
  }

  /// Rebuilds the internal scorer / vocabulary lookups after the public
  /// fields change (fit and deserialization both call this).
  void build_caches();

 private:
  // Built at fit time; not part of the logical state.
  std::shared_ptr<const SimilarityScorer> scorer_;
  std::unordered_map<std::string, std::size_t> gram_index_;
};

/// Fits spec to a training column (and target, when the spec needs one).
/// Deterministic; throws std::invalid_argument on an empty column or a
/// missing/mismatched target.
FittedEncoder fit(const EncoderSpec& spec,
                  const std::vector<std::string>& column,
                  const TargetColumn* target = nullptr);

/// Unit vector at v's domain index, or all zeros for unseen v.
Vector encode_one_hot(const CategoryDomain& domain, const std::string& v);

/// [sim(v, d_1), ..., sim(v, d_k)] against the domain categories.
Vector encode_similarity(const CategoryDomain& domain,
                         const SimilarityMeasure& m, const std::string& v);

/// Hashing trick: single 1 at (MD5(v) as big-endian integer) mod dim.
/// Stateless and fit-free.
Vector encode_hashing(const std::string& v, int dim = 256);

std::size_t md5_mod(const std::string& v, std::size_t dim);

}  // namespace simenc
