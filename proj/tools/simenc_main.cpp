// simenc: similarity encoding toolkit for dirty categorical columns.

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "simenc/pipeline.hpp"
#include "simenc/serialize.hpp"

using namespace simenc;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << content;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Flat key-value config with [section] headers and # comments. Section order
// is preserved so method arms run in the order they were written.
struct ConfigFile {
  std::vector<std::pair<std::string, std::map<std::string, std::string>>>
      sections;

  static ConfigFile parse(const std::string& path) {
    ConfigFile cfg;
    std::istringstream in(read_text(path));
    std::string line;
    std::string current = "";
    cfg.sections.emplace_back(current, std::map<std::string, std::string>{});
    while (std::getline(in, line)) {
      const auto first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos) continue;
      const auto last = line.find_last_not_of(" \t\r");
      line = line.substr(first, last - first + 1);
      if (line[0] == '#') continue;
      if (line.front() == '[' && line.back() == ']') {
        current = line.substr(1, line.size() - 2);
        cfg.sections.emplace_back(current,
                                  std::map<std::string, std::string>{});
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw std::invalid_argument("config: expected key = value, got: " + line);
      auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t");
        const auto e = s.find_last_not_of(" \t");
        return b == std::string::npos ? std::string{}
                                      : s.substr(b, e - b + 1);
      };
      cfg.sections.back().second[trim(line.substr(0, eq))] =
          trim(line.substr(eq + 1));
    }
    return cfg;
  }

  const std::map<std::string, std::string>* find(const std::string& name) const {
    for (const auto& [sec, kv] : sections)
      if (sec == name) return &kv;
    return nullptr;
  }
};

std::string config_get(const ConfigFile* cfg, const std::string& section,
                       const std::string& key, const std::string& fallback) {
  if (cfg == nullptr) return fallback;
  const auto* kv = cfg->find(section);
  if (kv == nullptr) return fallback;
  const auto it = kv->find(key);
  return it == kv->end() ? fallback : it->second;
}

std::uint64_t resolve_seed(bool seed_given, std::uint64_t flag_seed,
                           const std::string& config_seed) {
  if (seed_given) return flag_seed;
  if (!config_seed.empty()) return std::stoull(config_seed);
  if (const char* env = std::getenv("DIRTY_ENCODE_SEED"))
    return std::stoull(env);
  return 0;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

EncoderSpec make_encoder(const std::string& kind, const std::string& measure,
                         int hash_dim, double m_shrink, int ngram_n) {
  if (kind == "one_hot") return EncoderSpec::one_hot();
  if (kind == "similarity")
    return EncoderSpec::similarity(SimilarityMeasure::parse(measure));
  if (kind == "hashing") return EncoderSpec::hashing(hash_dim);
  if (kind == "target") return EncoderSpec::target(m_shrink);
  if (kind == "mdv") return EncoderSpec::mdv();
  if (kind == "bag_of_ngrams") return EncoderSpec::bag_of_ngrams(ngram_n);
  throw std::invalid_argument("unknown encoder kind: " + kind);
}

// Default arm set. MDV only applies to classification, so
// regression runs skip it.
std::vector<MethodSpec> default_methods(TaskKind task) {
  std::vector<MethodSpec> out;
  auto add = [&](std::string name, EncoderSpec spec) {
    MethodSpec m;
    m.name = std::move(name);
    m.encoder = std::move(spec);
    out.push_back(std::move(m));
  };
  add("one_hot", EncoderSpec::one_hot());
  add("hashing256", EncoderSpec::hashing(256));
  add("target", EncoderSpec::target(1.0));
  if (task != TaskKind::Regression) add("mdv", EncoderSpec::mdv());
  add("bag_of_ngrams3", EncoderSpec::bag_of_ngrams(3));
  add("sim_lev_ratio",
      EncoderSpec::similarity(SimilarityMeasure::levenshtein_ratio()));
  add("sim_jaro_winkler",
      EncoderSpec::similarity(SimilarityMeasure::jaro_winkler(0.1)));
  add("sim_ngram3", EncoderSpec::similarity(SimilarityMeasure::ngram(3)));
  return out;
}

std::string features_csv(const FeatureMatrix& fm) {
  std::ostringstream os;
  for (std::size_t j = 0; j < fm.columns.size(); ++j) {
    if (j > 0) os << ',';
    os << csv_escape(fm.columns[j]);
  }
  os << '\n';
  for (Eigen::Index i = 0; i < fm.values.rows(); ++i) {
    for (Eigen::Index j = 0; j < fm.values.cols(); ++j) {
      if (j > 0) os << ',';
      os << g17(fm.values(i, j));
    }
    os << '\n';
  }
  return os.str();
}

// Shared dirty-column preprocessing for subcommands that take a raw column:
// missing becomes "nan", everything is lowercased.
std::vector<std::string> read_dirty_column(const std::string& input,
                                           const std::string& column) {
  const CsvTable csv = read_csv(input);
  const std::size_t ci = csv.column_index(column);
  std::vector<std::string> out;
  out.reserve(csv.rows.size());
  for (const auto& row : csv.rows) {
    std::string v = row[ci];
    if (v.empty()) {
      out.emplace_back("nan");
      continue;
    }
    for (char& c : v)
      c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    out.push_back(std::move(v));
  }
  if (out.empty()) throw std::runtime_error("no rows in input");
  return out;
}

void log_kv(const std::string& key, const std::string& value) {
  std::cerr << "  " << key << " = " << value << '\n';
}

struct EncodeArgs {
  std::string input, column, target, task = "regression";
  std::string method = "similarity", measure = "ngram3", reduce = "none";
  std::size_t d = 0;
  int hash_dim = 256, ngram_n = 3;
  double m_shrink = 1.0;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string out_dir = ".";
};

int cmd_encode(const EncodeArgs& a) {
  const std::uint64_t seed = resolve_seed(a.seed_given, a.seed, "");
  std::cerr << "encode:\n";
  log_kv("input", a.input);
  log_kv("column", a.column);
  log_kv("method", a.method);
  log_kv("measure", a.measure);
  log_kv("reduce", a.reduce);
  log_kv("d", std::to_string(a.d));
  log_kv("seed", std::to_string(seed));

  const EncoderSpec spec =
      make_encoder(a.method, a.measure, a.hash_dim, a.m_shrink, a.ngram_n);
  const ReductionKind reduction = parse_reduction(a.reduce);
  if (reduction != ReductionKind::None && a.d == 0)
    throw std::invalid_argument("--reduce needs --d");

  std::vector<std::string> values = read_dirty_column(a.input, a.column);
  TargetColumn target;
  const TargetColumn* target_ptr = nullptr;
  if (spec.requires_target()) {
    if (a.target.empty())
      throw std::invalid_argument("encoder '" + a.method + "' needs --target");
    const CsvTable csv = read_csv(a.input);
    const std::size_t ti = csv.column_index(a.target);
    target.task = parse_task_kind(a.task);
    std::vector<std::string> kept;
    for (std::size_t i = 0; i < csv.rows.size(); ++i) {
      if (csv.rows[i][ti].empty()) continue;  // mirror ingest: drop missing
      kept.push_back(values[i]);
      target.labels.push_back(csv.rows[i][ti]);  // parsed below for regression
    }
    if (target.task == TaskKind::Regression) {
      target.numeric.resize(static_cast<Eigen::Index>(target.labels.size()));
      for (std::size_t i = 0; i < target.labels.size(); ++i) {
        try {
          target.numeric[static_cast<Eigen::Index>(i)] =
              std::stod(target.labels[i]);
        } catch (const std::exception&) {
          throw std::runtime_error("unparseable regression target '" +
                                   target.labels[i] + "'");
        }
      }
      target.labels.clear();
    }
    values = std::move(kept);
    target_ptr = &target;
  }

  const CategoryDomain domain = CategoryDomain::from_column(values);
  FeatureMatrix features;
  SerializedState state;
  switch (reduction) {
    case ReductionKind::MostFrequent:
    case ReductionKind::KMeansProto: {
      if (spec.kind != EncoderSpec::Kind::Similarity)
        throw std::invalid_argument(
            "prototype reduction requires --method similarity");
      const PrototypeSet protos =
          reduction == ReductionKind::MostFrequent
              ? most_frequent_prototypes(domain, a.d)
              : kmeans_prototypes(domain, spec.measure, a.d, 3000, seed);
      features = reduce_by_prototypes(values, protos, spec.measure);
      state.type = SerializedState::Type::Prototypes;
      state.prototypes = protos;
      state.measure = spec.measure;
      state.reduction = ReductionState{reduction, a.d, seed};
      break;
    }
    case ReductionKind::DedupMerge: {
      if (spec.kind != EncoderSpec::Kind::Similarity)
        throw std::invalid_argument(
            "dedup_merge reduction requires --method similarity");
      const FittedEncoder enc =
          dedup_merge_encoder(domain, spec.measure, a.d, seed);
      features = enc.transform(values);
      state.encoder = enc;
      state.reduction = ReductionState{reduction, a.d, seed};
      break;
    }
    case ReductionKind::Projection: {
      const FittedEncoder enc = fit(spec, values, target_ptr);
      FeatureMatrix full = enc.transform(values);
      features = random_projection(full, static_cast<Eigen::Index>(a.d), seed);
      state.encoder = enc;
      state.reduction = ReductionState{reduction, a.d, seed};
      break;
    }
    case ReductionKind::None: {
      const FittedEncoder enc = fit(spec, values, target_ptr);
      features = enc.transform(values);
      state.encoder = enc;
      break;
    }
  }

  std::filesystem::create_directories(a.out_dir);
  const std::string features_path = a.out_dir + "/features.csv";
  const std::string state_path = a.out_dir + "/encoder.simenc";
  write_text(features_path, features_csv(features));
  save_state(state, state_path);
  std::cout << "wrote " << features_path << " (" << features.values.rows()
            << " rows x " << features.values.cols() << " columns)\n";
  std::cout << "wrote " << state_path << '\n';
  return 0;
}

struct BenchmarkArgs {
  std::string config;
  std::string input, column, target, task;
  std::string method, measure = "ngram3", reduce;
  std::size_t d = 0;
  bool d_given = false;
  int splits = -1;
  double test_frac = -1.0;
  std::uint64_t seed = 0;
  bool seed_given = false;
  int jobs = -1;
  bool center = false;
  std::string out_dir = ".";
};

int cmd_benchmark(const BenchmarkArgs& a) {
  std::unique_ptr<ConfigFile> cfg;
  if (!a.config.empty())
    cfg = std::make_unique<ConfigFile>(ConfigFile::parse(a.config));

  TaskSpec task;
  task.input_path =
      !a.input.empty() ? a.input : config_get(cfg.get(), "data", "input", "");
  task.dirty_column =
      !a.column.empty() ? a.column : config_get(cfg.get(), "data", "column", "");
  task.target_column =
      !a.target.empty() ? a.target : config_get(cfg.get(), "data", "target", "");
  task.task = parse_task_kind(
      !a.task.empty() ? a.task
                      : config_get(cfg.get(), "data", "task", "regression"));
  task.other_categorical =
      split_list(config_get(cfg.get(), "data", "other_categorical", ""));
  task.numerical = split_list(config_get(cfg.get(), "data", "numerical", ""));
  task.sample_cap =
      std::stoull(config_get(cfg.get(), "data", "sample_cap", "0"));
  if (task.input_path.empty() || task.dirty_column.empty() ||
      task.target_column.empty())
    throw std::invalid_argument("benchmark needs --input, --column, --target");

  BenchmarkConfig bench;
  bench.n_splits =
      a.splits >= 0
          ? a.splits
          : std::stoi(config_get(cfg.get(), "benchmark", "splits", "100"));
  bench.test_fraction =
      a.test_frac >= 0.0
          ? a.test_frac
          : std::stod(config_get(cfg.get(), "benchmark", "test_frac", "0.2"));
  bench.seed = resolve_seed(a.seed_given, a.seed,
                            config_get(cfg.get(), "benchmark", "seed", ""));
  bench.jobs = a.jobs >= 1
                   ? a.jobs
                   : std::stoi(config_get(cfg.get(), "benchmark", "jobs", "1"));
  bench.assemble.center =
      a.center || config_get(cfg.get(), "benchmark", "center", "no") == "yes";
  task.seed = bench.seed;

  const DataTable table = ingest_csv(task);
  const std::size_t cardinality = CategoryDomain::from_column(table.dirty).k();

  // Method arms: explicit [method ...] config sections win, then a --method
  // flag (optionally swept over the d-grid), then the default panel.
  if (cfg) {
    for (const auto& [sec, kv] : cfg->sections) {
      if (sec.rfind("method ", 0) != 0) continue;
      MethodSpec m;
      m.name = sec.substr(7);
      auto get = [&kv = kv](const std::string& key, const std::string& fb) {
        const auto it = kv.find(key);
        return it == kv.end() ? fb : it->second;
      };
      m.encoder = make_encoder(get("kind", "similarity"),
                               get("measure", "ngram3"),
                               std::stoi(get("hash_dim", "256")),
                               std::stod(get("m_shrink", "1")),
                               std::stoi(get("ngram_n", "3")));
      m.reduction = parse_reduction(get("reduce", "none"));
      m.d = std::stoull(get("d", "0"));
      bench.methods.push_back(std::move(m));
    }
  }
  if (bench.methods.empty() && !a.method.empty()) {
    MethodSpec base;
    base.name = a.method;
    base.encoder = make_encoder(a.method, a.measure, 256, 1.0, 3);
    if (base.encoder.kind == EncoderSpec::Kind::Similarity)
      base.name += "_" + base.encoder.measure.name();
    if (!a.reduce.empty() && parse_reduction(a.reduce) != ReductionKind::None) {
      const ReductionKind red = parse_reduction(a.reduce);
      if (a.d_given) {
        MethodSpec m = base;
        m.name += "_" + a.reduce + std::to_string(a.d);
        m.reduction = red;
        m.d = a.d;
        bench.methods.push_back(std::move(m));
      } else {
        // Sweep: d in {30, 100, 300} plus the full encoding. Sweep
        // points at or above the column cardinality are dropped since the
        // full arm already covers them.
        for (std::size_t d : {std::size_t{30}, std::size_t{100},
                              std::size_t{300}}) {
          if (d >= cardinality) {
            std::cerr << "note: skipping d=" << d << " (column has "
                      << cardinality << " categories)\n";
            continue;
          }
          MethodSpec m = base;
          m.name += "_" + a.reduce + std::to_string(d);
          m.reduction = red;
          m.d = d;
          bench.methods.push_back(std::move(m));
        }
        MethodSpec full = base;
        full.name += "_full";
        bench.methods.push_back(std::move(full));
      }
    } else {
      bench.methods.push_back(std::move(base));
    }
  }
  if (bench.methods.empty()) bench.methods = default_methods(task.task);

  std::cerr << "benchmark:\n";
  log_kv("input", task.input_path);
  log_kv("column", task.dirty_column);
  log_kv("target", task.target_column);
  log_kv("task", task_kind_name(task.task));
  log_kv("splits", std::to_string(bench.n_splits));
  log_kv("test_frac", g17(bench.test_fraction));
  log_kv("seed", std::to_string(bench.seed));
  log_kv("jobs", std::to_string(bench.jobs));
  log_kv("center", bench.assemble.center ? "yes" : "no");
  for (const auto& m : bench.methods) log_kv("method", m.name);
  std::cerr << "  rows = " << table.n_rows()
            << ", cardinality = " << cardinality << '\n';
  const BenchmarkResult result = run_benchmark(table, bench);

  std::filesystem::create_directories(a.out_dir);
  write_text(a.out_dir + "/results.csv", results_csv(result));
  write_text(a.out_dir + "/summary.csv", summary_csv(result));
  write_text(a.out_dir + "/boxplot.csv", boxplot_csv(result));
  std::cout << summary_csv(result);
  std::cout << "wrote " << a.out_dir << "/results.csv, summary.csv, boxplot.csv\n";
  return 0;
}

struct HistogramArgs {
  std::string input, column, measure = "ngram3";
  std::size_t pairs = 10000;
  int bins = 20;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string out_dir = ".";
};

int cmd_histogram(const HistogramArgs& a) {
  const std::uint64_t seed = resolve_seed(a.seed_given, a.seed, "");
  std::cerr << "histogram:\n";
  log_kv("input", a.input);
  log_kv("column", a.column);
  log_kv("measure", a.measure);
  log_kv("pairs", std::to_string(a.pairs));
  log_kv("seed", std::to_string(seed));

  const auto values = read_dirty_column(a.input, a.column);
  const auto hist = similarity_histogram(
      values, SimilarityMeasure::parse(a.measure), a.pairs, seed, a.bins);

  std::ostringstream os;
  os << "bin_left\tbin_right\tcount\n";
  for (std::size_t b = 0; b < hist.counts.size(); ++b)
    os << g17(hist.bin_edges[b]) << '\t' << g17(hist.bin_edges[b + 1]) << '\t'
       << hist.counts[b] << '\n';
  os << "median\t" << g17(hist.median) << '\n';

  std::filesystem::create_directories(a.out_dir);
  const std::string path = a.out_dir + "/histogram.tsv";
  write_text(path, os.str());
  std::cout << "wrote " << path << " (median " << g17(hist.median) << ")\n";
  return 0;
}

struct CardinalityArgs {
  std::string input, column;
  std::vector<std::size_t> checkpoints;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string out_dir = ".";
};

int cmd_cardinality(const CardinalityArgs& a) {
  const std::uint64_t seed = resolve_seed(a.seed_given, a.seed, "");
  const auto values = read_dirty_column(a.input, a.column);

  std::vector<std::size_t> checkpoints = a.checkpoints;
  if (checkpoints.empty()) {
    // Log-spaced from 10 (or smaller) up to the full column.
    const std::size_t n = values.size();
    std::size_t c = std::min<std::size_t>(10, n);
    while (c < n) {
      checkpoints.push_back(c);
      c = std::max(c + 1, static_cast<std::size_t>(
                              std::llround(static_cast<double>(c) * 1.5)));
    }
    checkpoints.push_back(n);
  }
  std::cerr << "cardinality:\n";
  log_kv("input", a.input);
  log_kv("column", a.column);
  log_kv("seed", std::to_string(seed));
  log_kv("checkpoints", std::to_string(checkpoints.size()));

  const auto curve = cardinality_curve(values, checkpoints, seed);
  std::ostringstream os;
  os << "n_samples\tn_distinct\n";
  for (const auto& [n, k] : curve) os << n << '\t' << k << '\n';

  std::filesystem::create_directories(a.out_dir);
  const std::string path = a.out_dir + "/cardinality.tsv";
  write_text(path, os.str());
  std::cout << "wrote " << path << '\n';
  return 0;
}

struct GenerateArgs {
  int entities = 100;
  int samples = 1000;
  double corruption = 0.3;
  std::string task = "regression";
  int n_classes = 3;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string out_dir = ".";
};

int cmd_generate_dirty(const GenerateArgs& a) {
  DirtyCorpusSpec spec;
  spec.n_entities = a.entities;
  spec.samples = a.samples;
  spec.corruption_prob = a.corruption;
  spec.task = parse_task_kind(a.task);
  spec.n_classes = a.n_classes;
  spec.seed = resolve_seed(a.seed_given, a.seed, "");
  std::cerr << "generate-dirty:\n";
  log_kv("entities", std::to_string(spec.n_entities));
  log_kv("samples", std::to_string(spec.samples));
  log_kv("corruption", g17(spec.corruption_prob));
  log_kv("task", task_kind_name(spec.task));
  log_kv("seed", std::to_string(spec.seed));

  const DirtyCorpus corpus = generate_dirty_corpus(spec);
  std::ostringstream os;
  os << "name,entity_id,entity_name,y\n";
  for (std::size_t i = 0; i < corpus.values.size(); ++i) {
    const int e = corpus.entity_ids[i];
    os << csv_escape(corpus.values[i]) << ',' << e << ','
       << csv_escape(corpus.entity_names[static_cast<std::size_t>(e)]) << ',';
    if (spec.task == TaskKind::Regression)
      os << g17(corpus.target.numeric[static_cast<Eigen::Index>(i)]);
    else
      os << csv_escape(corpus.target.labels[i]);
    os << '\n';
  }

  std::filesystem::create_directories(a.out_dir);
  const std::string path = a.out_dir + "/dirty_corpus.csv";
  write_text(path, os.str());
  std::cout << "wrote " << path << " (" << corpus.values.size() << " rows, "
            << corpus.entity_names.size() << " entities)\n";
  return 0;
}

int cmd_inspect(const std::string& path) {
  const std::string original = read_text(path);
  const SerializedState state = deserialize_state(original);
  if (state.type == SerializedState::Type::Prototypes) {
    std::cout << "prototype set: " << state.prototypes.prototypes.size()
              << " prototypes, measure " << state.measure.name() << '\n';
  } else {
    std::cout << "encoder: " << state.encoder.spec.kind_name() << ", "
              << state.encoder.domain.k() << " categories, output dim "
              << state.encoder.output_dim << '\n';
  }
  if (state.reduction)
    std::cout << "reduction: " << reduction_name(state.reduction->kind)
              << " d=" << state.reduction->d << " seed=" << state.reduction->seed
              << '\n';
  if (serialize_state(state) != original)
    throw std::runtime_error("state file does not reserialize byte-identically");
  std::cout << "round-trip: byte-identical\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"similarity encoding for dirty categorical columns"};
  app.require_subcommand(1);

  EncodeArgs enc;
  auto* enc_cmd = app.add_subcommand(
      "encode", "fit an encoder on a CSV column and emit features");
  enc_cmd->add_option("--input", enc.input, "input CSV")->required();
  enc_cmd->add_option("--column", enc.column, "dirty column name")->required();
  enc_cmd->add_option("--target", enc.target, "target column (target/mdv)");
  enc_cmd->add_option("--task", enc.task, "regression|binary-clf|multiclass-clf");
  enc_cmd->add_option("--method", enc.method,
                      "one_hot|similarity|hashing|target|mdv|bag_of_ngrams");
  enc_cmd->add_option("--measure", enc.measure, "similarity measure tag");
  enc_cmd->add_option("--reduce", enc.reduce,
                      "none|projection|most_frequent|kmeans|dedup_merge");
  enc_cmd->add_option("--d", enc.d, "reduced dimension");
  enc_cmd->add_option("--hash-dim", enc.hash_dim, "hashing dimension");
  enc_cmd->add_option("--ngram-n", enc.ngram_n, "bag-of-ngrams n");
  enc_cmd->add_option("--m-shrink", enc.m_shrink, "target-encoding shrinkage");
  enc_cmd->add_option("--seed", enc.seed, "seed")
      ->each([&](const std::string&) { enc.seed_given = true; });
  enc_cmd->add_option("--out-dir", enc.out_dir, "output directory");

  BenchmarkArgs bm;
  auto* bm_cmd = app.add_subcommand(
      "benchmark", "run the split benchmark over encoder arms");
  bm_cmd->add_option("--config", bm.config, "key-value config file");
  bm_cmd->add_option("--input", bm.input, "input CSV");
  bm_cmd->add_option("--column", bm.column, "dirty column name");
  bm_cmd->add_option("--target", bm.target, "target column");
  bm_cmd->add_option("--task", bm.task, "regression|binary-clf|multiclass-clf");
  bm_cmd->add_option("--method", bm.method, "single encoder arm");
  bm_cmd->add_option("--measure", bm.measure, "similarity measure tag");
  bm_cmd->add_option("--reduce", bm.reduce, "reduction for the single arm");
  bm_cmd->add_option("--d", bm.d, "reduced dimension (omit for the d sweep)")
      ->each([&](const std::string&) { bm.d_given = true; });
  bm_cmd->add_option("--splits", bm.splits, "number of random splits");
  bm_cmd->add_option("--test-frac", bm.test_frac, "test fraction");
  bm_cmd->add_option("--seed", bm.seed, "seed")
      ->each([&](const std::string&) { bm.seed_given = true; });
  bm_cmd->add_option("--jobs", bm.jobs, "parallel split workers");
  bm_cmd->add_flag("--center", bm.center, "mean-center before scaling");
  bm_cmd->add_option("--out-dir", bm.out_dir, "output directory");

  HistogramArgs hist;
  auto* hist_cmd = app.add_subcommand(
      "histogram", "pairwise similarity histogram of a column");
  hist_cmd->add_option("--input", hist.input, "input CSV")->required();
  hist_cmd->add_option("--column", hist.column, "column name")->required();
  hist_cmd->add_option("--measure", hist.measure, "similarity measure tag");
  hist_cmd->add_option("--pairs", hist.pairs, "number of sampled pairs");
  hist_cmd->add_option("--bins", hist.bins, "histogram bins");
  hist_cmd->add_option("--seed", hist.seed, "seed")
      ->each([&](const std::string&) { hist.seed_given = true; });
  hist_cmd->add_option("--out-dir", hist.out_dir, "output directory");

  CardinalityArgs card;
  auto* card_cmd = app.add_subcommand(
      "cardinality", "distinct-category growth curve of a column");
  card_cmd->add_option("--input", card.input, "input CSV")->required();
  card_cmd->add_option("--column", card.column, "column name")->required();
  card_cmd->add_option("--checkpoints", card.checkpoints,
                       "sample counts (default log-spaced)");
  card_cmd->add_option("--seed", card.seed, "seed")
      ->each([&](const std::string&) { card.seed_given = true; });
  card_cmd->add_option("--out-dir", card.out_dir, "output directory");

  GenerateArgs gen;
  auto* gen_cmd = app.add_subcommand(
      "generate-dirty", "emit a seeded synthetic dirty corpus");
  gen_cmd->add_option("--entities", gen.entities, "number of entities");
  gen_cmd->add_option("--samples", gen.samples, "number of rows");
  gen_cmd->add_option("--corruption", gen.corruption, "corruption probability");
  gen_cmd->add_option("--task", gen.task, "regression|binary-clf|multiclass-clf");
  gen_cmd->add_option("--classes", gen.n_classes, "classes for classification");
  gen_cmd->add_option("--seed", gen.seed, "seed")
      ->each([&](const std::string&) { gen.seed_given = true; });
  gen_cmd->add_option("--out-dir", gen.out_dir, "output directory");

  std::string inspect_path;
  auto* inspect_cmd =
      app.add_subcommand("inspect", "summarize and verify a state file");
  inspect_cmd->add_option("state", inspect_path, "serialized state file")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (enc_cmd->parsed()) return cmd_encode(enc);
    if (bm_cmd->parsed()) return cmd_benchmark(bm);
    if (hist_cmd->parsed()) return cmd_histogram(hist);
    if (card_cmd->parsed()) return cmd_cardinality(card);
    if (gen_cmd->parsed()) return cmd_generate_dirty(gen);
    if (inspect_cmd->parsed()) return cmd_inspect(inspect_path);
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return 0;
}
