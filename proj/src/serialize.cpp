#include "simenc/serialize.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace simenc {

namespace {

constexpr const char* kMagic = "simenc-encoder v1";

std::string escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '\\':
        out += "\\\\";
        break;
      case '\t':
        out += "\\t";
        break;
      case '\n':
        out += "\\n";
        break;
      case '\r':
        out += "\\r";
        break;
      default:
        out += c;
    }
  }
  return out;
}

std::string unescape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '\\' || i + 1 == s.size()) {
      out += s[i];
      continue;
    }
    switch (s[++i]) {
      case '\\':
        out += '\\';
        break;
      case 't':
        out += '\t';
        break;
      case 'n':
        out += '\n';
        break;
      case 'r':
        out += '\r';
        break;
      default:
        throw std::runtime_error("encoder file: bad escape sequence");
    }
  }
  return out;
}

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_vector(std::ostringstream& os, const std::string& key,
                  const Vector& v) {
  os << key << ' ' << v.size();
  for (Eigen::Index i = 0; i < v.size(); ++i) os << ' ' << g17(v[i]);
  os << '\n';
}

void write_matrix(std::ostringstream& os, const std::string& key,
                  const Matrix& m) {
  os << key << ' ' << m.rows() << ' ' << m.cols() << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    os << "row";
    for (Eigen::Index j = 0; j < m.cols(); ++j) os << ' ' << g17(m(i, j));
    os << '\n';
  }
}

class LineReader {
 public:
  explicit LineReader(const std::string& text) : stream_(text) {}

  bool next(std::string& line) { return static_cast<bool>(std::getline(stream_, line)); }

  std::string expect() {
    std::string line;
    if (!next(line)) throw std::runtime_error("encoder file: truncated");
    return line;
  }

 private:
  std::istringstream stream_;
};

std::pair<std::string, std::string> split_key(const std::string& line) {
  const std::size_t sp = line.find(' ');
  if (sp == std::string::npos) return {line, ""};
  return {line.substr(0, sp), line.substr(sp + 1)};
}

Vector read_vector(const std::string& payload) {
  std::istringstream is(payload);
  Eigen::Index n = 0;
  is >> n;
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) is >> v[i];
  if (!is) throw std::runtime_error("encoder file: bad vector");
  return v;
}

Matrix read_matrix(LineReader& reader, const std::string& payload) {
  std::istringstream is(payload);
  Eigen::Index rows = 0, cols = 0;
  is >> rows >> cols;
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    std::istringstream row(reader.expect());
    std::string tag;
    row >> tag;
    if (tag != "row") throw std::runtime_error("encoder file: bad matrix row");
    for (Eigen::Index j = 0; j < cols; ++j) row >> m(i, j);
    if (!row) throw std::runtime_error("encoder file: bad matrix row");
  }
  return m;
}

void write_domain(std::ostringstream& os, const CategoryDomain& domain) {
  os << "domain " << domain.k() << '\n';
  for (std::size_t i = 0; i < domain.k(); ++i)
    os << "c " << escape(domain.categories[i]) << '\t'
       << domain.frequencies[i] << '\n';
}

CategoryDomain read_domain(LineReader& reader, const std::string& payload) {
  const std::size_t k = std::stoull(payload);
  CategoryDomain domain;
  for (std::size_t i = 0; i < k; ++i) {
    const std::string line = reader.expect();
    if (line.rfind("c ", 0) != 0)
      throw std::runtime_error("encoder file: bad category line");
    const std::size_t tab = line.rfind('\t');
    if (tab == std::string::npos)
      throw std::runtime_error("encoder file: bad category line");
    std::string cat = unescape(line.substr(2, tab - 2));
    domain.frequencies.push_back(std::stoll(line.substr(tab + 1)));
    domain.index[cat] = domain.categories.size();
    domain.categories.push_back(std::move(cat));
  }
  return domain;
}

}  // namespace

std::string serialize_state(const SerializedState& state) {
  std::ostringstream os;
  os << kMagic << '\n';

  if (state.type == SerializedState::Type::Prototypes) {
    os << "kind prototype_set\n";
    os << "measure " << state.measure.name() << '\n';
    os << "method "
       << (state.prototypes.method == PrototypeMethod::KMeans ? "kmeans"
                                                              : "most_frequent")
       << '\n';
    os << "prototypes " << state.prototypes.prototypes.size() << '\n';
    for (const auto& p : state.prototypes.prototypes)
      os << "p " << escape(p) << '\n';
  } else {
    const FittedEncoder& enc = state.encoder;
    os << "kind " << enc.spec.kind_name() << '\n';
    os << "output_dim " << enc.output_dim << '\n';
    switch (enc.spec.kind) {
      case EncoderSpec::Kind::Similarity:
        os << "measure " << enc.spec.measure.name() << '\n';
        break;
      case EncoderSpec::Kind::Hashing:
        os << "hash_dim " << enc.spec.hash_dim << '\n';
        break;
      case EncoderSpec::Kind::Target:
        os << "m_shrink " << g17(enc.spec.m_shrink) << '\n';
        break;
      case EncoderSpec::Kind::BagOfNgrams:
        os << "ngram_n " << enc.spec.ngram_n << '\n';
        break;
      case EncoderSpec::Kind::ClusterOneHot:
        os << "measure " << enc.spec.measure.name() << '\n';
        os << "n_clusters " << enc.spec.n_clusters << '\n';
        break;
      default:
        break;
    }
    write_domain(os, enc.domain);
    if (enc.spec.kind == EncoderSpec::Kind::Target ||
        enc.spec.kind == EncoderSpec::Kind::Mdv) {
      os << "task " << task_kind_name(enc.stats.task) << '\n';
      os << "classes " << enc.stats.classes.size() << '\n';
      for (const auto& c : enc.stats.classes) os << "cl " << escape(c) << '\n';
      write_vector(os, "prior", enc.stats.prior);
      write_matrix(os, "conditional", enc.stats.conditional);
    }
    if (enc.spec.kind == EncoderSpec::Kind::BagOfNgrams) {
      os << "vocab " << enc.gram_vocab.size() << '\n';
      for (const auto& g : enc.gram_vocab) os << "g " << escape(g) << '\n';
    }
    if (enc.spec.kind == EncoderSpec::Kind::ClusterOneHot) {
      os << "clusters";
      for (int id : enc.cluster_ids) os << ' ' << id;
      os << '\n';
    }
  }

  if (state.reduction) {
    os << "reduction " << reduction_name(state.reduction->kind) << ' '
       << state.reduction->d << ' ' << state.reduction->seed << '\n';
  }
  os << "end\n";
  return os.str();
}

SerializedState deserialize_state(const std::string& text) {
  LineReader reader(text);
  if (reader.expect() != kMagic)
    throw std::runtime_error("encoder file: bad magic / unsupported version");

  auto [kind_key, kind_name] = split_key(reader.expect());
  if (kind_key != "kind")
    throw std::runtime_error("encoder file: missing kind");

  SerializedState state;
  if (kind_name == "prototype_set") {
    state.type = SerializedState::Type::Prototypes;
    std::string line;
    while ((line = reader.expect()) != "end") {
      auto [key, payload] = split_key(line);
      if (key == "measure") {
        state.measure = SimilarityMeasure::parse(payload);
      } else if (key == "method") {
        state.prototypes.method = payload == "kmeans"
                                      ? PrototypeMethod::KMeans
                                      : PrototypeMethod::MostFrequent;
      } else if (key == "prototypes") {
        const std::size_t d = std::stoull(payload);
        for (std::size_t i = 0; i < d; ++i) {
          const std::string p_line = reader.expect();
          if (p_line.rfind("p ", 0) != 0)
            throw std::runtime_error("encoder file: bad prototype line");
          state.prototypes.prototypes.push_back(unescape(p_line.substr(2)));
        }
      } else if (key == "reduction") {
        std::istringstream is(payload);
        std::string name;
        ReductionState red;
        is >> name >> red.d >> red.seed;
        red.kind = parse_reduction(name);
        state.reduction = red;
      } else {
        throw std::runtime_error("encoder file: unknown key " + key);
      }
    }
    return state;
  }

  FittedEncoder& enc = state.encoder;
  if (kind_name == "one_hot")
    enc.spec = EncoderSpec::one_hot();
  else if (kind_name == "similarity")
    enc.spec.kind = EncoderSpec::Kind::Similarity;
  else if (kind_name == "hashing")
    enc.spec.kind = EncoderSpec::Kind::Hashing;
  else if (kind_name == "target")
    enc.spec.kind = EncoderSpec::Kind::Target;
  else if (kind_name == "mdv")
    enc.spec.kind = EncoderSpec::Kind::Mdv;
  else if (kind_name == "bag_of_ngrams")
    enc.spec.kind = EncoderSpec::Kind::BagOfNgrams;
  else if (kind_name == "cluster_one_hot")
    enc.spec.kind = EncoderSpec::Kind::ClusterOneHot;
  else
    throw std::runtime_error("encoder file: unknown kind " + kind_name);

  std::string line;
  while ((line = reader.expect()) != "end") {
    auto [key, payload] = split_key(line);
    if (key == "output_dim") {
      enc.output_dim = std::stoll(payload);
    } else if (key == "measure") {
      enc.spec.measure = SimilarityMeasure::parse(payload);
    } else if (key == "hash_dim") {
      enc.spec.hash_dim = std::stoi(payload);
    } else if (key == "m_shrink") {
      enc.spec.m_shrink = std::stod(payload);
      enc.stats.m_shrink = enc.spec.m_shrink;
    } else if (key == "ngram_n") {
      enc.spec.ngram_n = std::stoi(payload);
    } else if (key == "n_clusters") {
      enc.spec.n_clusters = std::stoi(payload);
    } else if (key == "domain") {
      enc.domain = read_domain(reader, payload);
    } else if (key == "task") {
      enc.stats.task = parse_task_kind(payload);
    } else if (key == "classes") {
      const std::size_t n = std::stoull(payload);
      for (std::size_t i = 0; i < n; ++i) {
        const std::string cl_line = reader.expect();
        if (cl_line.rfind("cl ", 0) != 0)
          throw std::runtime_error("encoder file: bad class line");
        enc.stats.classes.push_back(unescape(cl_line.substr(3)));
      }
    } else if (key == "prior") {
      enc.stats.prior = read_vector(payload);
    } else if (key == "conditional") {
      enc.stats.conditional = read_matrix(reader, payload);
    } else if (key == "vocab") {
      const std::size_t n = std::stoull(payload);
      for (std::size_t i = 0; i < n; ++i) {
        const std::string g_line = reader.expect();
        if (g_line.rfind("g ", 0) != 0)
          throw std::runtime_error("encoder file: bad vocab line");
        enc.gram_vocab.push_back(unescape(g_line.substr(2)));
      }
    } else if (key == "clusters") {
      std::istringstream is(payload);
      int id = 0;
      while (is >> id) enc.cluster_ids.push_back(id);
    } else if (key == "reduction") {
      std::istringstream is(payload);
      std::string name;
      ReductionState red;
      is >> name >> red.d >> red.seed;
      red.kind = parse_reduction(name);
      state.reduction = red;
    } else {
      throw std::runtime_error("encoder file: unknown key " + key);
    }
  }
  enc.build_caches();
  return state;
}

std::string serialize_encoder(const FittedEncoder& enc) {
  SerializedState state;
  state.type = SerializedState::Type::Encoder;
  state.encoder = enc;
  return serialize_state(state);
}

FittedEncoder deserialize_encoder(const std::string& text) {
  SerializedState state = deserialize_state(text);
  if (state.type != SerializedState::Type::Encoder)
    throw std::runtime_error("encoder file: expected an encoder, found prototypes");
  return state.encoder;
}

void save_state(const SerializedState& state, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << serialize_state(state);
}

SerializedState load_state(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return deserialize_state(buf.str());
}

}  // namespace simenc
