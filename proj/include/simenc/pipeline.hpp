#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "simenc/csv.hpp"
#include "simenc/encoders.hpp"
#include "simenc/feature_matrix.hpp"
#include "simenc/learners.hpp"
#include "simenc/reduction.hpp"

namespace simenc {

/// Stable per-index seed derivation so every (split, component) cell draws
/// from its own stream.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

struct TaskSpec {
  std::string input_path;
  std::string target_column;
  std::string dirty_column;
  std::vector<std::string> other_categorical;
  std::vector<std::string> numerical;
  TaskKind task = TaskKind::Regression;
  std::size_t sample_cap = 0;  // 0 means no cap
  std::uint64_t seed = 0;
};

/// Typed, preprocessed table: dirty column lowercased with missing entries
/// replaced by "nan"; rows with a missing target or missing non-dirty
/// explanatory value dropped.
struct DataTable {
  std::vector<std::string> dirty;
  std::vector<std::vector<std::string>> other_cat;  // one vector per column
  std::vector<std::string> other_cat_names;
  Matrix numeric;  // n x #numerical
  std::vector<std::string> numeric_names;
  TargetColumn target;

  std::size_t n_rows() const { return dirty.size(); }
};

DataTable ingest_csv(const TaskSpec& spec);
DataTable ingest_table(const CsvTable& csv, const TaskSpec& spec);

struct SplitIndices {
  std::vector<Eigen::Index> train;
  std::vector<Eigen::Index> test;
};

/// Disjoint covering train/test split; stratified per class when labels are
/// given. Throws on a class with fewer than 2 members under stratification.
SplitIndices split(std::size_t n, double test_fraction,
                   const std::vector<std::string>* stratify_labels,
                   std::uint64_t seed);

enum class ReductionKind { None, Projection, MostFrequent, KMeansProto, DedupMerge };

std::string reduction_name(ReductionKind r);
ReductionKind parse_reduction(const std::string& s);

/// One benchmark arm: an encoder plus an optional reduction to d dimensions.
struct MethodSpec {
  std::string name;
  EncoderSpec encoder;
  ReductionKind reduction = ReductionKind::None;
  std::size_t d = 0;  // ignored when reduction == None
};

struct AssembleOptions {
  bool center = false;  // also subtract train means before scaling
  std::size_t kmeans_subsample = 3000;
};

struct AssembledFeatures {
  Matrix train;
  Matrix test;
  std::vector<std::string> columns;
  double unseen_rate = 0.0;  // test rows whose dirty value is not in train
};

/// Encoded dirty column (after optional reduction) ++ one-hot other
/// categoricals ++ raw numericals, every column scaled to unit sample
/// variance with factors learned on train only.
AssembledFeatures assemble_features(const DataTable& table,
                                    const SplitIndices& idx,
                                    const MethodSpec& method,
                                    std::uint64_t seed,
                                    const AssembleOptions& opts = {});

/// Step-wise average precision over the ranked list; score ties keep stable
/// input order. Throws when no positive labels are present.
double average_precision(const std::vector<std::string>& y_true,
                         const Vector& positive_scores,
                         const std::string& positive_class);

double accuracy(const std::vector<std::string>& y_true,
                const std::vector<std::string>& y_pred);

struct BenchmarkConfig {
  std::vector<MethodSpec> methods;
  int n_splits = 100;
  double test_fraction = 0.2;
  std::uint64_t seed = 0;
  int jobs = 1;
  AssembleOptions assemble;
  std::vector<double> lambda_grid = default_lambda_grid();
  ClassWeighting class_weighting = ClassWeighting::InverseFrequency;
};

struct BenchmarkResult {
  std::vector<std::string> method_names;
  Matrix scores;  // methods x splits
  std::vector<double> medians;
  std::vector<double> means;
  std::vector<double> avg_ranks;  // 1 = best median; ties share mean rank
  std::vector<double> unseen_rates;  // per split
};

/// Fits every (method, split) cell: encoders on train rows only, learner per
/// task kind, score on test. Deterministic given cfg.seed; cells may run in
/// parallel (cfg.jobs) without changing any output.
BenchmarkResult run_benchmark(const DataTable& table,
                              const BenchmarkConfig& cfg);

/// method,split,score rows.
std::string results_csv(const BenchmarkResult& r);
/// method,median,mean,average_rank rows.
std::string summary_csv(const BenchmarkResult& r);
/// Long-format method,split,score,unseen_rate rows for box plots.
std::string boxplot_csv(const BenchmarkResult& r);

double median(std::vector<double> values);

enum class CorruptionKind {
  Typo,
  Abbreviation,
  ExtraneousToken,
  SpecialCharacters,
  ConcatenatedHierarchy
};

struct DirtyCorpusSpec {
  int n_entities = 100;
  int samples = 1000;
  // Mix over {typo, abbreviation, extraneous, special chars, concatenated}.
  std::array<double, 5> corruption_mix{0.2, 0.2, 0.2, 0.2, 0.2};
  double corruption_prob = 0.3;
  std::uint64_t seed = 0;
  TaskKind task = TaskKind::Regression;
  int n_classes = 3;           // classification targets
  double entity_effect_sigma = 3.0;
  // Share of the entity-effect variance that is idiosyncratic; the rest is
  // additive over the words of the entity name, so string-similar entities
  // have similar targets (as real dirty categories do).
  double idiosyncratic_fraction = 0.1;
  double noise_sigma = 1.0;    // regression observation noise
  double label_noise = 0.05;   // classification label flip probability
};

struct DirtyCorpus {
  std::vector<std::string> values;
  std::vector<int> entity_ids;  // ground truth, one per row
  std::vector<std::string> entity_names;
  TargetColumn target;

  DataTable to_table() const;
};

/// Seeded synthetic corpus: generated entity names pushed through the dirty
/// taxonomy (typos, abbreviations, extraneous tokens, special characters,
/// concatenated hierarchy), with targets driven by the true entity.
DirtyCorpus generate_dirty_corpus(const DirtyCorpusSpec& spec);

/// Distinct-category counts over prefixes of the seeded-shuffled column.
std::vector<std::pair<std::size_t, std::size_t>> cardinality_curve(
    const std::vector<std::string>& column,
    const std::vector<std::size_t>& checkpoints, std::uint64_t seed);

}  // namespace simenc
