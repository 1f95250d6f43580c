#include "simenc/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <unordered_set>

namespace simenc {

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  // splitmix64 over the combined value.
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

namespace {

std::string to_lower_ascii(std::string s) {
  for (char& c : s)
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> gather_strings(const std::vector<std::string>& v,
                                        const std::vector<Eigen::Index>& idx) {
  std::vector<std::string> out;
  out.reserve(idx.size());
  for (Eigen::Index i : idx) out.push_back(v[static_cast<std::size_t>(i)]);
  return out;
}

TargetColumn gather_target(const TargetColumn& t,
                           const std::vector<Eigen::Index>& idx) {
  TargetColumn out;
  out.task = t.task;
  if (t.task == TaskKind::Regression) {
    out.numeric.resize(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i)
      out.numeric[static_cast<Eigen::Index>(i)] = t.numeric[idx[i]];
  } else {
    out.labels.reserve(idx.size());
    for (Eigen::Index i : idx)
      out.labels.push_back(t.labels[static_cast<std::size_t>(i)]);
  }
  return out;
}

}  // namespace

DataTable ingest_table(const CsvTable& csv, const TaskSpec& spec) {
  const std::size_t target_col = csv.column_index(spec.target_column);
  const std::size_t dirty_col = csv.column_index(spec.dirty_column);
  std::vector<std::size_t> cat_cols, num_cols;
  for (const auto& name : spec.other_categorical)
    cat_cols.push_back(csv.column_index(name));
  for (const auto& name : spec.numerical)
    num_cols.push_back(csv.column_index(name));

  DataTable table;
  table.other_cat.resize(cat_cols.size());
  table.other_cat_names = spec.other_categorical;
  table.numeric_names = spec.numerical;
  table.target.task = spec.task;
  std::vector<std::vector<double>> numeric_cols(num_cols.size());

  for (const auto& row : csv.rows) {
    if (row[target_col].empty()) continue;  // missing target: drop
    bool missing_explanatory = false;
    for (std::size_t c : cat_cols)
      if (row[c].empty()) missing_explanatory = true;
    for (std::size_t c : num_cols)
      if (row[c].empty()) missing_explanatory = true;
    if (missing_explanatory) continue;

    const std::string& dirty_raw = row[dirty_col];
    table.dirty.push_back(dirty_raw.empty() ? "nan" : to_lower_ascii(dirty_raw));
    for (std::size_t j = 0; j < cat_cols.size(); ++j)
      table.other_cat[j].push_back(row[cat_cols[j]]);
    for (std::size_t j = 0; j < num_cols.size(); ++j) {
      try {
        std::size_t pos = 0;
        const double v = std::stod(row[num_cols[j]], &pos);
        if (pos != row[num_cols[j]].size())
          throw std::invalid_argument("trailing");
        numeric_cols[j].push_back(v);
      } catch (const std::exception&) {
        throw std::runtime_error("unparseable numerical value '" +
                                 row[num_cols[j]] + "' in column " +
                                 spec.numerical[j]);
      }
    }
    table.target.labels.push_back(row[target_col]);  // parsed below for regression
  }

  const std::size_t n = table.dirty.size();
  if (n == 0) throw std::runtime_error("no usable rows after preprocessing");

  if (spec.task == TaskKind::Regression) {
    table.target.numeric.resize(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
      try {
        table.target.numeric[static_cast<Eigen::Index>(i)] =
            std::stod(table.target.labels[i]);
      } catch (const std::exception&) {
        throw std::runtime_error("unparseable regression target '" +
                                 table.target.labels[i] + "'");
      }
    }
    table.target.labels.clear();
  } else {
    const auto classes = table.target.classes();
    if (spec.task == TaskKind::BinaryClf && classes.size() != 2)
      throw std::runtime_error("binary-clf target must have exactly 2 classes");
    if (classes.size() < 2)
      throw std::runtime_error("classification target has a single class");
  }

  table.numeric.resize(static_cast<Eigen::Index>(n),
                       static_cast<Eigen::Index>(num_cols.size()));
  for (std::size_t j = 0; j < num_cols.size(); ++j)
    for (std::size_t i = 0; i < n; ++i)
      table.numeric(static_cast<Eigen::Index>(i),
                    static_cast<Eigen::Index>(j)) = numeric_cols[j][i];

  // Seeded subsample down to the cap.
  if (spec.sample_cap > 0 && n > spec.sample_cap) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(spec.seed);
    std::shuffle(order.begin(), order.end(), rng);
    order.resize(spec.sample_cap);
    std::sort(order.begin(), order.end());

    DataTable capped;
    capped.other_cat_names = table.other_cat_names;
    capped.numeric_names = table.numeric_names;
    capped.other_cat.resize(table.other_cat.size());
    capped.target.task = table.target.task;
    capped.numeric.resize(static_cast<Eigen::Index>(order.size()),
                          table.numeric.cols());
    if (table.target.task == TaskKind::Regression)
      capped.target.numeric.resize(static_cast<Eigen::Index>(order.size()));
    for (std::size_t i = 0; i < order.size(); ++i) {
      const std::size_t src = order[i];
      capped.dirty.push_back(table.dirty[src]);
      for (std::size_t j = 0; j < table.other_cat.size(); ++j)
        capped.other_cat[j].push_back(table.other_cat[j][src]);
      capped.numeric.row(static_cast<Eigen::Index>(i)) =
          table.numeric.row(static_cast<Eigen::Index>(src));
      if (table.target.task == TaskKind::Regression)
        capped.target.numeric[static_cast<Eigen::Index>(i)] =
            table.target.numeric[static_cast<Eigen::Index>(src)];
      else
        capped.target.labels.push_back(table.target.labels[src]);
    }
    return capped;
  }
  return table;
}

DataTable ingest_csv(const TaskSpec& spec) {
  return ingest_table(read_csv(spec.input_path), spec);
}

SplitIndices split(std::size_t n, double test_fraction,
                   const std::vector<std::string>* stratify_labels,
                   std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("split: need n >= 2");
  if (test_fraction <= 0.0 || test_fraction >= 1.0)
    throw std::invalid_argument("split: test_fraction must be in (0, 1)");

  SplitIndices out;
  std::mt19937_64 rng(seed);
  if (stratify_labels == nullptr) {
    std::vector<Eigen::Index> order(n);
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::shuffle(order.begin(), order.end(), rng);
    std::size_t n_test = static_cast<std::size_t>(
        std::lround(static_cast<double>(n) * test_fraction));
    n_test = std::clamp<std::size_t>(n_test, 1, n - 1);
    out.test.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_test));
    out.train.assign(order.begin() + static_cast<std::ptrdiff_t>(n_test), order.end());
  } else {
    if (stratify_labels->size() != n)
      throw std::invalid_argument("split: label length mismatch");
    std::vector<std::string> classes;
    {
      std::set<std::string> uniq(stratify_labels->begin(),
                                 stratify_labels->end());
      classes.assign(uniq.begin(), uniq.end());
    }
    for (const auto& cls : classes) {
      std::vector<Eigen::Index> members;
      for (std::size_t i = 0; i < n; ++i)
        if ((*stratify_labels)[i] == cls)
          members.push_back(static_cast<Eigen::Index>(i));
      if (members.size() < 2)
        throw std::runtime_error("split: class '" + cls +
                                 "' has fewer than 2 members");
      std::shuffle(members.begin(), members.end(), rng);
      std::size_t n_test_c = static_cast<std::size_t>(std::lround(
          static_cast<double>(members.size()) * test_fraction));
      n_test_c = std::clamp<std::size_t>(n_test_c, 1, members.size() - 1);
      out.test.insert(out.test.end(), members.begin(),
                      members.begin() + static_cast<std::ptrdiff_t>(n_test_c));
      out.train.insert(out.train.end(),
                       members.begin() + static_cast<std::ptrdiff_t>(n_test_c),
                       members.end());
    }
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

std::string reduction_name(ReductionKind r) {
  switch (r) {
    case ReductionKind::None:
      return "none";
    case ReductionKind::Projection:
      return "projection";
    case ReductionKind::MostFrequent:
      return "most_frequent";
    case ReductionKind::KMeansProto:
      return "kmeans";
    case ReductionKind::DedupMerge:
      return "dedup_merge";
  }
  return "none";
}

ReductionKind parse_reduction(const std::string& s) {
  if (s == "none" || s.empty()) return ReductionKind::None;
  if (s == "projection") return ReductionKind::Projection;
  if (s == "most_frequent") return ReductionKind::MostFrequent;
  if (s == "kmeans") return ReductionKind::KMeansProto;
  if (s == "dedup_merge") return ReductionKind::DedupMerge;
  throw std::invalid_argument("unknown reduction: " + s);
}

AssembledFeatures assemble_features(const DataTable& table,
                                    const SplitIndices& idx,
                                    const MethodSpec& method,
                                    std::uint64_t seed,
                                    const AssembleOptions& opts) {
  const std::vector<std::string> train_dirty = gather_strings(table.dirty, idx.train);
  const std::vector<std::string> test_dirty = gather_strings(table.dirty, idx.test);
  const TargetColumn train_target = gather_target(table.target, idx.train);

  Matrix dirty_train, dirty_test;
  std::vector<std::string> dirty_labels;
  const CategoryDomain train_domain = CategoryDomain::from_column(train_dirty);

  switch (method.reduction) {
    case ReductionKind::MostFrequent:
    case ReductionKind::KMeansProto: {
      if (method.encoder.kind != EncoderSpec::Kind::Similarity)
        throw std::invalid_argument(
            "prototype reduction requires a similarity encoder");
      const PrototypeSet protos =
          method.reduction == ReductionKind::MostFrequent
              ? most_frequent_prototypes(train_domain, method.d)
              : kmeans_prototypes(train_domain, method.encoder.measure,
                                  method.d, opts.kmeans_subsample, seed);
      FeatureMatrix tr =
          reduce_by_prototypes(train_dirty, protos, method.encoder.measure);
      FeatureMatrix te =
          reduce_by_prototypes(test_dirty, protos, method.encoder.measure);
      dirty_train = std::move(tr.values);
      dirty_test = std::move(te.values);
      dirty_labels = std::move(tr.columns);
      break;
    }
    case ReductionKind::DedupMerge: {
      const FittedEncoder enc =
          dedup_merge_encoder(train_domain, method.encoder.measure, method.d,
                              seed, opts.kmeans_subsample);
      FeatureMatrix tr = enc.transform(train_dirty);
      FeatureMatrix te = enc.transform(test_dirty);
      dirty_train = std::move(tr.values);
      dirty_test = std::move(te.values);
      dirty_labels = std::move(tr.columns);
      break;
    }
    case ReductionKind::None:
    case ReductionKind::Projection: {
      const FittedEncoder enc =
          fit(method.encoder, train_dirty,
              method.encoder.requires_target() ? &train_target : nullptr);
      FeatureMatrix tr = enc.transform(train_dirty);
      FeatureMatrix te = enc.transform(test_dirty);
      if (method.reduction == ReductionKind::Projection) {
        const ProjectionMatrix R = ProjectionMatrix::gaussian(
            enc.output_dim, static_cast<Eigen::Index>(method.d), seed);
        dirty_train = tr.values * R.entries;
        dirty_test = te.values * R.entries;
        for (std::size_t j = 0; j < method.d; ++j)
          dirty_labels.push_back("proj:" + std::to_string(j));
      } else {
        dirty_train = std::move(tr.values);
        dirty_test = std::move(te.values);
        dirty_labels = std::move(tr.columns);
      }
      break;
    }
  }

  // Other categorical columns are plain one-hot, fitted on train.
  std::vector<Matrix> extra_train, extra_test;
  std::vector<std::string> labels = std::move(dirty_labels);
  for (std::size_t j = 0; j < table.other_cat.size(); ++j) {
    const auto col_train = gather_strings(table.other_cat[j], idx.train);
    const auto col_test = gather_strings(table.other_cat[j], idx.test);
    const FittedEncoder enc = fit(EncoderSpec::one_hot(), col_train);
    extra_train.push_back(enc.transform(col_train).values);
    extra_test.push_back(enc.transform(col_test).values);
    for (const auto& c : enc.domain.categories)
      labels.push_back(table.other_cat_names[j] + ":" + c);
  }

  const Eigen::Index n_numeric = table.numeric.cols();
  for (Eigen::Index j = 0; j < n_numeric; ++j)
    labels.push_back("num:" + table.numeric_names[static_cast<std::size_t>(j)]);

  Eigen::Index total_cols = dirty_train.cols() + n_numeric;
  for (const auto& m : extra_train) total_cols += m.cols();

  AssembledFeatures out;
  out.columns = std::move(labels);
  out.train.resize(static_cast<Eigen::Index>(idx.train.size()), total_cols);
  out.test.resize(static_cast<Eigen::Index>(idx.test.size()), total_cols);

  Eigen::Index col = 0;
  out.train.middleCols(col, dirty_train.cols()) = dirty_train;
  out.test.middleCols(col, dirty_test.cols()) = dirty_test;
  col += dirty_train.cols();
  for (std::size_t j = 0; j < extra_train.size(); ++j) {
    out.train.middleCols(col, extra_train[j].cols()) = extra_train[j];
    out.test.middleCols(col, extra_test[j].cols()) = extra_test[j];
    col += extra_train[j].cols();
  }
  if (n_numeric > 0) {
    for (std::size_t i = 0; i < idx.train.size(); ++i)
      out.train.row(static_cast<Eigen::Index>(i)).segment(col, n_numeric) =
          table.numeric.row(idx.train[i]);
    for (std::size_t i = 0; i < idx.test.size(); ++i)
      out.test.row(static_cast<Eigen::Index>(i)).segment(col, n_numeric) =
          table.numeric.row(idx.test[i]);
  }

  // Scale-only standardization with train statistics; constant columns are
  // left untouched.
  const Eigen::Index n_train = out.train.rows();
  for (Eigen::Index j = 0; j < total_cols; ++j) {
    const double mean = out.train.col(j).mean();
    if (opts.center) {
      out.train.col(j).array() -= mean;
      out.test.col(j).array() -= mean;
    }
    const double center_for_var = opts.center ? 0.0 : mean;
    const double var =
        n_train > 1
            ? (out.train.col(j).array() - center_for_var).square().sum() /
                  static_cast<double>(n_train - 1)
            : 0.0;
    if (var > 0.0) {
      const double factor = 1.0 / std::sqrt(var);
      out.train.col(j) *= factor;
      out.test.col(j) *= factor;
    }
  }

  std::size_t unseen = 0;
  for (const auto& v : test_dirty)
    if (!train_domain.find(v)) ++unseen;
  out.unseen_rate = test_dirty.empty()
                        ? 0.0
                        : static_cast<double>(unseen) / test_dirty.size();
  return out;
}

double average_precision(const std::vector<std::string>& y_true,
                         const Vector& positive_scores,
                         const std::string& positive_class) {
  const std::size_t n = y_true.size();
  if (n == 0 || positive_scores.size() != static_cast<Eigen::Index>(n))
    throw std::invalid_argument("average_precision: length mismatch or empty");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return positive_scores[static_cast<Eigen::Index>(a)] >
                            positive_scores[static_cast<Eigen::Index>(b)];
                   });
  std::size_t total_pos = 0;
  for (const auto& y : y_true)
    if (y == positive_class) ++total_pos;
  if (total_pos == 0)
    throw std::runtime_error("average_precision: no positive labels");

  double ap = 0.0;
  std::size_t tp = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (y_true[order[k]] != positive_class) continue;
    ++tp;
    const double precision = static_cast<double>(tp) / (k + 1);
    ap += precision / static_cast<double>(total_pos);  // delta recall * P_k
  }
  return ap;
}

double accuracy(const std::vector<std::string>& y_true,
                const std::vector<std::string>& y_pred) {
  if (y_true.empty() || y_true.size() != y_pred.size())
    throw std::invalid_argument("accuracy: length mismatch or empty");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < y_true.size(); ++i)
    if (y_true[i] == y_pred[i]) ++correct;
  return static_cast<double>(correct) / y_true.size();
}

double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median: empty input");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2]
                    : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

namespace {

double run_cell(const DataTable& table, const BenchmarkConfig& cfg,
                const MethodSpec& method, const SplitIndices& idx,
                std::uint64_t split_seed) {
  const AssembledFeatures af =
      assemble_features(table, idx, method, split_seed, cfg.assemble);
  if (table.target.task == TaskKind::Regression) {
    const TargetColumn ytr = gather_target(table.target, idx.train);
    const TargetColumn yte = gather_target(table.target, idx.test);
    const RidgeModel model =
        ridge_fit(af.train, ytr.numeric, cfg.lambda_grid, 3, split_seed);
    return r2_score(yte.numeric, ridge_predict(model, af.test));
  }
  const TargetColumn ytr = gather_target(table.target, idx.train);
  const TargetColumn yte = gather_target(table.target, idx.test);
  LogisticOptions opts;
  opts.weighting = cfg.class_weighting;
  const LogisticModel model =
      logistic_fit(af.train, ytr.labels, cfg.lambda_grid, split_seed, opts);
  if (table.target.task == TaskKind::BinaryClf) {
    const std::string positive = table.target.classes()[1];
    Eigen::Index pos_col = 0;
    for (std::size_t c = 0; c < model.classes.size(); ++c)
      if (model.classes[c] == positive)
        pos_col = static_cast<Eigen::Index>(c);
    const Matrix proba = logistic_predict_proba(model, af.test);
    return average_precision(yte.labels, proba.col(pos_col), positive);
  }
  return accuracy(yte.labels, logistic_predict(model, af.test));
}

}  // namespace

BenchmarkResult run_benchmark(const DataTable& table,
                              const BenchmarkConfig& cfg) {
  if (cfg.methods.empty())
    throw std::invalid_argument("run_benchmark: no methods configured");
  if (cfg.n_splits < 1)
    throw std::invalid_argument("run_benchmark: n_splits must be >= 1");
  const std::size_t n = table.n_rows();
  const std::size_t n_methods = cfg.methods.size();

  BenchmarkResult result;
  for (const auto& m : cfg.methods) result.method_names.push_back(m.name);
  result.scores.resize(static_cast<Eigen::Index>(n_methods), cfg.n_splits);
  result.unseen_rates.assign(static_cast<std::size_t>(cfg.n_splits), 0.0);

  const bool stratify = table.target.task == TaskKind::BinaryClf;

  auto run_split = [&](int s) {
    const std::uint64_t split_seed =
        derive_seed(cfg.seed, static_cast<std::uint64_t>(s));
    const SplitIndices idx =
        split(n, cfg.test_fraction, stratify ? &table.target.labels : nullptr,
              split_seed);
    // The unseen rate is a property of the split, not the method.
    {
      const auto train_dirty = gather_strings(table.dirty, idx.train);
      const auto test_dirty = gather_strings(table.dirty, idx.test);
      const CategoryDomain dom = CategoryDomain::from_column(train_dirty);
      std::size_t unseen = 0;
      for (const auto& v : test_dirty)
        if (!dom.find(v)) ++unseen;
      result.unseen_rates[static_cast<std::size_t>(s)] =
          test_dirty.empty() ? 0.0
                             : static_cast<double>(unseen) / test_dirty.size();
    }
    for (std::size_t m = 0; m < n_methods; ++m) {
      try {
        result.scores(static_cast<Eigen::Index>(m), s) =
            run_cell(table, cfg, cfg.methods[m], idx, split_seed);
      } catch (const std::exception& e) {
        throw std::runtime_error("method '" + cfg.methods[m].name +
                                 "', split " + std::to_string(s) + ": " +
                                 e.what());
      }
    }
  };

  const int jobs = std::max(1, cfg.jobs);
  if (jobs == 1 || cfg.n_splits == 1) {
    for (int s = 0; s < cfg.n_splits; ++s) run_split(s);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> workers;
    std::vector<std::exception_ptr> errors(
        static_cast<std::size_t>(jobs), nullptr);
    for (int t = 0; t < jobs; ++t) {
      workers.emplace_back([&, t] {
        try {
          for (int s = next.fetch_add(1); s < cfg.n_splits;
               s = next.fetch_add(1))
            run_split(s);
        } catch (...) {
          errors[static_cast<std::size_t>(t)] = std::current_exception();
        }
      });
    }
    for (auto& w : workers) w.join();
    for (const auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  result.medians.resize(n_methods);
  result.means.resize(n_methods);
  for (std::size_t m = 0; m < n_methods; ++m) {
    const auto row = result.scores.row(static_cast<Eigen::Index>(m));
    result.medians[m] =
        median(std::vector<double>(row.begin(), row.end()));
    result.means[m] = row.mean();
  }

  // Rank by median, 1 = best; equal medians share the mean of their ranks.
  result.avg_ranks.assign(n_methods, 0.0);
  std::vector<std::size_t> order(n_methods);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return result.medians[a] > result.medians[b];
  });
  std::size_t i = 0;
  while (i < n_methods) {
    std::size_t j = i;
    while (j + 1 < n_methods &&
           result.medians[order[j + 1]] == result.medians[order[i]])
      ++j;
    const double shared_rank = (static_cast<double>(i + 1) + (j + 1)) / 2.0;
    for (std::size_t t = i; t <= j; ++t)
      result.avg_ranks[order[t]] = shared_rank;
    i = j + 1;
  }
  return result;
}

std::string results_csv(const BenchmarkResult& r) {
  std::ostringstream os;
  os << "method,split,score\n";
  for (std::size_t m = 0; m < r.method_names.size(); ++m)
    for (Eigen::Index s = 0; s < r.scores.cols(); ++s) {
      os << csv_escape(r.method_names[m]) << ',' << s << ','
         << format_double(r.scores(static_cast<Eigen::Index>(m), s)) << '\n';
    }
  return os.str();
}

std::string summary_csv(const BenchmarkResult& r) {
  std::ostringstream os;
  os << "method,median,mean,average_rank\n";
  for (std::size_t m = 0; m < r.method_names.size(); ++m) {
    os << csv_escape(r.method_names[m]) << ',' << format_double(r.medians[m])
       << ',' << format_double(r.means[m]) << ','
       << format_double(r.avg_ranks[m]) << '\n';
  }
  return os.str();
}

std::string boxplot_csv(const BenchmarkResult& r) {
  std::ostringstream os;
  os << "method,split,score,unseen_rate\n";
  for (std::size_t m = 0; m < r.method_names.size(); ++m)
    for (Eigen::Index s = 0; s < r.scores.cols(); ++s) {
      os << csv_escape(r.method_names[m]) << ',' << s << ','
         << format_double(r.scores(static_cast<Eigen::Index>(m), s)) << ','
         << format_double(r.unseen_rates[static_cast<std::size_t>(s)]) << '\n';
    }
  return os.str();
}

namespace {

const char* const kConsonants = "bcdfghklmnprstvz";
const char* const kVowels = "aeiou";

std::string random_word(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> n_syllables(2, 4);
  std::uniform_int_distribution<int> consonant(0, 15);
  std::uniform_int_distribution<int> vowel(0, 4);
  std::string word;
  const int syllables = n_syllables(rng);
  for (int s = 0; s < syllables; ++s) {
    word += kConsonants[consonant(rng)];
    word += kVowels[vowel(rng)];
  }
  return word;
}

int pick_from_mix(const std::array<double, 5>& mix, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double u = unit(rng);
  double acc = 0.0;
  for (int i = 0; i < 5; ++i) {
    acc += mix[i];
    if (u < acc) return i;
  }
  return 4;
}

std::string corrupt(const std::string& name, CorruptionKind kind,
                    std::mt19937_64& rng) {
  static const std::vector<std::string> kTitles = {"inc",  "llc", "ltd",
                                                   "corp", "dr",  "co"};
  static const std::vector<std::string> kRegions = {"north", "south", "east",
                                                    "west", "central"};
  static const std::string kSpecials = "-:()_";
  std::uniform_int_distribution<std::size_t> pos(0, name.size() - 1);
  switch (kind) {
    case CorruptionKind::Typo: {
      std::string s = name;
      std::uniform_int_distribution<int> coin(0, 1);
      if (coin(rng) == 0 && s.size() >= 2) {
        std::uniform_int_distribution<std::size_t> p(0, s.size() - 2);
        const std::size_t i = p(rng);
        std::swap(s[i], s[i + 1]);
      } else {
        std::uniform_int_distribution<int> letter(0, 25);
        s[pos(rng)] = static_cast<char>('a' + letter(rng));
      }
      return s;
    }
    case CorruptionKind::Abbreviation: {
      const std::size_t space = name.find(' ');
      const std::size_t word_len = space == std::string::npos ? name.size() : space;
      const std::size_t keep = std::min<std::size_t>(3, word_len);
      std::string s = name.substr(0, keep) + ".";
      if (space != std::string::npos) s += name.substr(space);
      return s;
    }
    case CorruptionKind::ExtraneousToken: {
      std::uniform_int_distribution<std::size_t> t(0, kTitles.size() - 1);
      return name + " " + kTitles[t(rng)];
    }
    case CorruptionKind::SpecialCharacters: {
      std::uniform_int_distribution<std::size_t> c(0, kSpecials.size() - 1);
      std::string s = name;
      s.insert(s.begin() + static_cast<std::ptrdiff_t>(pos(rng)),
               kSpecials[c(rng)]);
      return s;
    }
    case CorruptionKind::ConcatenatedHierarchy: {
      std::uniform_int_distribution<std::size_t> r(0, kRegions.size() - 1);
      return kRegions[r(rng)] + "-" + name;
    }
  }
  return name;
}

}  // namespace

DirtyCorpus generate_dirty_corpus(const DirtyCorpusSpec& spec) {
  if (spec.n_entities < 1 || spec.samples < 1)
    throw std::invalid_argument("generate_dirty_corpus: need entities and samples");
  double mix_sum = 0.0;
  for (double m : spec.corruption_mix) mix_sum += m;
  if (std::abs(mix_sum - 1.0) > 1e-9)
    throw std::invalid_argument("generate_dirty_corpus: corruption mix must sum to 1");
  const int n_classes =
      spec.task == TaskKind::BinaryClf ? 2 : spec.n_classes;
  if (spec.task != TaskKind::Regression && n_classes < 2)
    throw std::invalid_argument("generate_dirty_corpus: need >= 2 classes");

  const double idio =
      std::clamp(spec.idiosyncratic_fraction, 0.0, 1.0);

  std::mt19937_64 rng(spec.seed);
  DirtyCorpus corpus;
  corpus.target.task = spec.task;

  // Entity names combine two words from a shared pool, so distinct entities
  // overlap in n-grams the way real dirty categories (titles, company names)
  // do. The pool is sized so enough distinct pairs exist.
  std::size_t pool_size = std::max<std::size_t>(
      4, static_cast<std::size_t>(
             std::ceil(1.5 * std::sqrt(static_cast<double>(spec.n_entities)))));
  while (pool_size * (pool_size - 1) <
         static_cast<std::size_t>(spec.n_entities))
    ++pool_size;
  std::vector<std::string> pool;
  std::unordered_set<std::string> used_words;
  while (pool.size() < pool_size) {
    std::string w = random_word(rng);
    if (used_words.insert(w).second) pool.push_back(std::move(w));
  }

  std::uniform_int_distribution<std::size_t> word_pick(0, pool_size - 1);
  std::vector<std::pair<std::size_t, std::size_t>> entity_words;
  std::unordered_set<std::string> used;
  while (corpus.entity_names.size() <
         static_cast<std::size_t>(spec.n_entities)) {
    const std::size_t a = word_pick(rng);
    const std::size_t b = word_pick(rng);
    if (a == b) continue;
    std::string name = pool[a] + " " + pool[b];
    if (!used.insert(name).second) continue;
    corpus.entity_names.push_back(std::move(name));
    entity_words.emplace_back(a, b);
  }

  // Entity effect = additive word effects + idiosyncratic remainder, with the
  // total variance held at entity_effect_sigma^2.
  const double word_sigma =
      spec.entity_effect_sigma * std::sqrt((1.0 - idio) / 2.0);
  const double idio_sigma = spec.entity_effect_sigma * std::sqrt(idio);
  std::normal_distribution<double> word_effect_dist(0.0, word_sigma);
  std::normal_distribution<double> idio_dist(0.0, idio_sigma);
  std::vector<double> word_effects(pool_size);
  for (auto& w : word_effects) w = word_effect_dist(rng);
  std::vector<double> effects(static_cast<std::size_t>(spec.n_entities));
  for (std::size_t e = 0; e < effects.size(); ++e)
    effects[e] = word_effects[entity_words[e].first] +
                 word_effects[entity_words[e].second] + idio_dist(rng);

  std::uniform_int_distribution<int> entity_pick(0, spec.n_entities - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, spec.noise_sigma);
  std::uniform_int_distribution<int> class_pick(0, n_classes - 1);

  if (spec.task == TaskKind::Regression)
    corpus.target.numeric.resize(spec.samples);
  for (int i = 0; i < spec.samples; ++i) {
    const int e = entity_pick(rng);
    corpus.entity_ids.push_back(e);
    std::string value = corpus.entity_names[static_cast<std::size_t>(e)];
    if (unit(rng) < spec.corruption_prob)
      value = corrupt(value,
                      static_cast<CorruptionKind>(
                          pick_from_mix(spec.corruption_mix, rng)),
                      rng);
    corpus.values.push_back(std::move(value));
    if (spec.task == TaskKind::Regression) {
      corpus.target.numeric[i] =
          effects[static_cast<std::size_t>(e)] + noise(rng);
    } else {
      int cls = e % n_classes;
      if (unit(rng) < spec.label_noise) cls = class_pick(rng);
      corpus.target.labels.push_back("c" + std::to_string(cls));
    }
  }
  return corpus;
}

DataTable DirtyCorpus::to_table() const {
  DataTable table;
  table.dirty = values;
  table.numeric.resize(static_cast<Eigen::Index>(values.size()), 0);
  table.target = target;
  return table;
}

std::vector<std::pair<std::size_t, std::size_t>> cardinality_curve(
    const std::vector<std::string>& column,
    const std::vector<std::size_t>& checkpoints, std::uint64_t seed) {
  if (!std::is_sorted(checkpoints.begin(), checkpoints.end()))
    throw std::invalid_argument("cardinality_curve: checkpoints must ascend");
  if (!checkpoints.empty() && checkpoints.back() > column.size())
    throw std::invalid_argument("cardinality_curve: checkpoint exceeds column length");

  std::vector<std::string> shuffled = column;
  std::mt19937_64 rng(seed);
  std::shuffle(shuffled.begin(), shuffled.end(), rng);

  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::unordered_set<std::string> seen;
  std::size_t next_checkpoint = 0;
  for (std::size_t i = 0; i <= shuffled.size(); ++i) {
    while (next_checkpoint < checkpoints.size() &&
           checkpoints[next_checkpoint] == i) {
      out.emplace_back(i, seen.size());
      ++next_checkpoint;
    }
    if (i < shuffled.size()) seen.insert(shuffled[i]);
  }
  return out;
}

}  // namespace simenc
