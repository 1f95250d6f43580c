#include "simenc/encoders.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include <openssl/evp.h>

namespace simenc {

std::string task_kind_name(TaskKind t) {
  switch (t) {
    case TaskKind::Regression:
      return "regression";
    case TaskKind::BinaryClf:
      return "binary-clf";
    case TaskKind::MulticlassClf:
      return "multiclass-clf";
  }
  return "regression";
}

TaskKind parse_task_kind(const std::string& s) {
  if (s == "regression") return TaskKind::Regression;
  if (s == "binary-clf" || s == "binary") return TaskKind::BinaryClf;
  if (s == "multiclass-clf" || s == "multiclass") return TaskKind::MulticlassClf;
  throw std::invalid_argument("unknown task kind: " + s);
}

std::vector<std::string> TargetColumn::classes() const {
  if (task == TaskKind::Regression) return {};
  std::set<std::string> uniq(labels.begin(), labels.end());
  return {uniq.begin(), uniq.end()};
}

CategoryDomain CategoryDomain::from_column(
    const std::vector<std::string>& column) {
  CategoryDomain d;
  for (const auto& v : column) {
    auto [it, inserted] = d.index.try_emplace(v, d.categories.size());
    if (inserted) {
      d.categories.push_back(v);
      d.frequencies.push_back(1);
    } else {
      ++d.frequencies[it->second];
    }
  }
  return d;
}

std::optional<std::size_t> CategoryDomain::find(const std::string& v) const {
  auto it = index.find(v);
  if (it == index.end()) return std::nullopt;
  return it->second;
}

EncoderSpec EncoderSpec::one_hot() { return {}; }
EncoderSpec EncoderSpec::similarity(SimilarityMeasure m) {
  EncoderSpec s;
  s.kind = Kind::Similarity;
  s.measure = m;
  return s;
}
EncoderSpec EncoderSpec::hashing(int dim) {
  if (dim < 1) throw std::invalid_argument("hashing: dim must be >= 1");
  EncoderSpec s;
  s.kind = Kind::Hashing;
  s.hash_dim = dim;
  return s;
}
EncoderSpec EncoderSpec::target(double m_shrink) {
  if (m_shrink <= 0.0)
    throw std::invalid_argument("target: m_shrink must be > 0");
  EncoderSpec s;
  s.kind = Kind::Target;
  s.m_shrink = m_shrink;
  return s;
}
EncoderSpec EncoderSpec::mdv() {
  EncoderSpec s;
  s.kind = Kind::Mdv;
  return s;
}
EncoderSpec EncoderSpec::bag_of_ngrams(int n) {
  if (n < 1) throw std::invalid_argument("bag_of_ngrams: n must be >= 1");
  EncoderSpec s;
  s.kind = Kind::BagOfNgrams;
  s.ngram_n = n;
  return s;
}
EncoderSpec EncoderSpec::cluster_one_hot(int c, SimilarityMeasure m) {
  if (c < 1) throw std::invalid_argument("cluster_one_hot: c must be >= 1");
  EncoderSpec s;
  s.kind = Kind::ClusterOneHot;
  s.n_clusters = c;
  s.measure = m;
  return s;
}

std::string EncoderSpec::kind_name() const {
  switch (kind) {
    case Kind::OneHot:
      return "one_hot";
    case Kind::Similarity:
      return "similarity";
    case Kind::Hashing:
      return "hashing";
    case Kind::Target:
      return "target";
    case Kind::Mdv:
      return "mdv";
    case Kind::BagOfNgrams:
      return "bag_of_ngrams";
    case Kind::ClusterOneHot:
      return "cluster_one_hot";
  }
  return "one_hot";
}

std::size_t md5_mod(const std::string& v, std::size_t dim) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int digest_len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_md5(), nullptr);
  EVP_DigestUpdate(ctx, v.data(), v.size());
  EVP_DigestFinal_ex(ctx, digest, &digest_len);
  EVP_MD_CTX_free(ctx);
  // Digest read as a big-endian integer, reduced byte by byte.
  std::size_t rem = 0;
  for (unsigned int i = 0; i < digest_len; ++i)
    rem = (rem * 256 + digest[i]) % dim;
  return rem;
}

Vector encode_one_hot(const CategoryDomain& domain, const std::string& v) {
  Vector out = Vector::Zero(static_cast<Eigen::Index>(domain.k()));
  if (auto idx = domain.find(v))
    out[static_cast<Eigen::Index>(*idx)] = 1.0;
  return out;
}

Vector encode_similarity(const CategoryDomain& domain,
                         const SimilarityMeasure& m, const std::string& v) {
  SimilarityScorer scorer(m, domain.categories);
  return scorer.score(v);
}

Vector encode_hashing(const std::string& v, int dim) {
  if (dim < 1) throw std::invalid_argument("hashing: dim must be >= 1");
  Vector out = Vector::Zero(dim);
  out[static_cast<Eigen::Index>(md5_mod(v, static_cast<std::size_t>(dim)))] =
      1.0;
  return out;
}

namespace {

// Grams of s in order of first appearance (deduplicated).
std::vector<std::string> grams_in_order(const std::string& s, int n) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  // ngrams() sorts, so walk the windows manually here.
  std::vector<std::size_t> bounds;
  bounds.push_back(0);
  {
    std::size_t i = 0;
    while (i < s.size()) {
      const unsigned char c = static_cast<unsigned char>(s[i]);
      std::size_t len = 1;
      if (c >= 0xF0)
        len = 4;
      else if (c >= 0xE0)
        len = 3;
      else if (c >= 0xC0)
        len = 2;
      if (i + len > s.size()) len = 1;
      for (std::size_t j = 1; j < len; ++j)
        if ((static_cast<unsigned char>(s[i + j]) & 0xC0) != 0x80) {
          len = 1;
          break;
        }
      i += len;
      bounds.push_back(i);
    }
  }
  const std::size_t chars = bounds.size() - 1;
  if (chars < static_cast<std::size_t>(n)) return out;
  for (std::size_t i = 0; i + n <= chars; ++i) {
    std::string g = s.substr(bounds[i], bounds[i + n] - bounds[i]);
    if (seen.insert(g).second) out.push_back(std::move(g));
  }
  return out;
}

// All windows with multiplicity.
std::vector<std::string> grams_with_multiplicity(const std::string& s, int n) {
  std::vector<std::string> out;
  std::vector<std::size_t> bounds;
  bounds.push_back(0);
  std::size_t i = 0;
  while (i < s.size()) {
    const unsigned char c = static_cast<unsigned char>(s[i]);
    std::size_t len = 1;
    if (c >= 0xF0)
      len = 4;
    else if (c >= 0xE0)
      len = 3;
    else if (c >= 0xC0)
      len = 2;
    if (i + len > s.size()) len = 1;
    for (std::size_t j = 1; j < len; ++j)
      if ((static_cast<unsigned char>(s[i + j]) & 0xC0) != 0x80) {
        len = 1;
        break;
      }
    i += len;
    bounds.push_back(i);
  }
  const std::size_t chars = bounds.size() - 1;
  if (chars < static_cast<std::size_t>(n)) return out;
  for (std::size_t w = 0; w + n <= chars; ++w)
    out.push_back(s.substr(bounds[w], bounds[w + n] - bounds[w]));
  return out;
}

TargetStats fit_target_stats(const CategoryDomain& domain,
                             const std::vector<std::string>& column,
                             const TargetColumn& target, double m_shrink) {
  TargetStats st;
  st.m_shrink = m_shrink;
  st.task = target.task;
  const std::size_t n = column.size();
  if (target.task == TaskKind::Regression) {
    st.prior = Vector::Zero(1);
    st.conditional = Matrix::Zero(static_cast<Eigen::Index>(domain.k()), 1);
    Vector sums = Vector::Zero(static_cast<Eigen::Index>(domain.k()));
    for (std::size_t i = 0; i < n; ++i) {
      const auto idx = static_cast<Eigen::Index>(*domain.find(column[i]));
      sums[idx] += target.numeric[static_cast<Eigen::Index>(i)];
      st.prior[0] += target.numeric[static_cast<Eigen::Index>(i)];
    }
    st.prior[0] /= static_cast<double>(n);
    for (std::size_t c = 0; c < domain.k(); ++c)
      st.conditional(static_cast<Eigen::Index>(c), 0) =
          sums[static_cast<Eigen::Index>(c)] /
          static_cast<double>(domain.frequencies[c]);
    return st;
  }
  st.classes = target.classes();
  // Binary classification encodes P(y = positive | d), one dimension; the
  // positive class is the lexicographically larger label.
  const bool binary = target.task == TaskKind::BinaryClf;
  if (binary && st.classes.size() != 2)
    throw std::invalid_argument("binary-clf target must have exactly 2 classes");
  const Eigen::Index dim =
      binary ? 1 : static_cast<Eigen::Index>(st.classes.size());
  st.prior = Vector::Zero(dim);
  st.conditional = Matrix::Zero(static_cast<Eigen::Index>(domain.k()), dim);
  std::unordered_map<std::string, Eigen::Index> class_index;
  for (std::size_t c = 0; c < st.classes.size(); ++c)
    class_index[st.classes[c]] = static_cast<Eigen::Index>(c);
  for (std::size_t i = 0; i < n; ++i) {
    const auto idx = static_cast<Eigen::Index>(*domain.find(column[i]));
    const Eigen::Index ci = class_index.at(target.labels[i]);
    if (binary) {
      const double y = ci == 1 ? 1.0 : 0.0;
      st.conditional(idx, 0) += y;
      st.prior[0] += y;
    } else {
      st.conditional(idx, ci) += 1.0;
      st.prior[ci] += 1.0;
    }
  }
  st.prior /= static_cast<double>(n);
  for (std::size_t c = 0; c < domain.k(); ++c)
    st.conditional.row(static_cast<Eigen::Index>(c)) /=
        static_cast<double>(domain.frequencies[c]);
  return st;
}

TargetStats fit_mdv_stats(const CategoryDomain& domain,
                          const std::vector<std::string>& column,
                          const TargetColumn& target) {
  if (target.task == TaskKind::Regression)
    throw std::invalid_argument("MDV requires classification");
  TargetStats st;
  st.task = target.task;
  st.classes = target.classes();
  const Eigen::Index n_classes = static_cast<Eigen::Index>(st.classes.size());
  st.prior = Vector::Zero(n_classes);
  st.conditional =
      Matrix::Zero(static_cast<Eigen::Index>(domain.k()), n_classes);
  std::unordered_map<std::string, Eigen::Index> class_index;
  for (std::size_t c = 0; c < st.classes.size(); ++c)
    class_index[st.classes[c]] = static_cast<Eigen::Index>(c);
  Vector class_counts = Vector::Zero(n_classes);
  for (std::size_t i = 0; i < column.size(); ++i) {
    const auto idx = static_cast<Eigen::Index>(*domain.find(column[i]));
    const Eigen::Index ci = class_index.at(target.labels[i]);
    st.conditional(idx, ci) += 1.0;
    class_counts[ci] += 1.0;
  }
  for (Eigen::Index c = 0; c < n_classes; ++c)
    if (class_counts[c] > 0) st.conditional.col(c) /= class_counts[c];
  return st;
}

}  // namespace

void FittedEncoder::build_caches() {
  if (spec.kind == EncoderSpec::Kind::Similarity ||
      spec.kind == EncoderSpec::Kind::ClusterOneHot) {
    scorer_ = std::make_shared<SimilarityScorer>(spec.measure,
                                                 domain.categories);
  }
  if (spec.kind == EncoderSpec::Kind::BagOfNgrams) {
    gram_index_.clear();
    for (std::size_t j = 0; j < gram_vocab.size(); ++j)
      gram_index_[gram_vocab[j]] = j;
  }
}

FittedEncoder fit(const EncoderSpec& spec,
                  const std::vector<std::string>& column,
                  const TargetColumn* target) {
  if (column.empty()) throw std::invalid_argument("fit: empty column");
  if (spec.requires_target()) {
    if (target == nullptr)
      throw std::invalid_argument("fit: " + spec.kind_name() +
                                  " requires a target");
    if (target->size() != column.size())
      throw std::invalid_argument("fit: target length mismatch");
  }
  if (spec.kind == EncoderSpec::Kind::ClusterOneHot)
    throw std::invalid_argument(
        "fit: cluster_one_hot encoders are built from a cluster map; "
        "see dedup_merge_encoder");

  FittedEncoder enc;
  enc.spec = spec;
  enc.domain = CategoryDomain::from_column(column);
  switch (spec.kind) {
    case EncoderSpec::Kind::OneHot:
    case EncoderSpec::Kind::Similarity:
      enc.output_dim = static_cast<Eigen::Index>(enc.domain.k());
      break;
    case EncoderSpec::Kind::Hashing:
      enc.output_dim = spec.hash_dim;
      break;
    case EncoderSpec::Kind::Target:
      enc.stats = fit_target_stats(enc.domain, column, *target, spec.m_shrink);
      enc.output_dim = enc.stats.prior.size();
      break;
    case EncoderSpec::Kind::Mdv:
      enc.stats = fit_mdv_stats(enc.domain, column, *target);
      enc.output_dim = enc.stats.prior.size();
      break;
    case EncoderSpec::Kind::BagOfNgrams: {
      std::set<std::string> seen;
      for (const auto& v : column)
        for (auto& g : grams_in_order(v, spec.ngram_n))
          if (seen.insert(g).second) enc.gram_vocab.push_back(std::move(g));
      enc.output_dim = static_cast<Eigen::Index>(enc.gram_vocab.size());
      break;
    }
    case EncoderSpec::Kind::ClusterOneHot:
      break;  // unreachable
  }
  enc.build_caches();
  return enc;
}

FittedEncoder FittedEncoder::from_cluster_map(CategoryDomain domain,
                                              SimilarityMeasure m,
                                              std::vector<int> cluster_ids,
                                              int n_clusters) {
  if (cluster_ids.size() != domain.k())
    throw std::invalid_argument("cluster map must cover the whole domain");
  for (int id : cluster_ids)
    if (id < 0 || id >= n_clusters)
      throw std::invalid_argument("cluster id out of range");
  FittedEncoder enc;
  enc.spec = EncoderSpec::cluster_one_hot(n_clusters, m);
  enc.domain = std::move(domain);
  enc.cluster_ids = std::move(cluster_ids);
  enc.output_dim = n_clusters;
  enc.build_caches();
  return enc;
}

Vector FittedEncoder::encode(const std::string& v) const {
  switch (spec.kind) {
    case EncoderSpec::Kind::OneHot:
      return encode_one_hot(domain, v);
    case EncoderSpec::Kind::Similarity:
      return scorer_ ? scorer_->score(v) : encode_similarity(domain, spec.measure, v);
    case EncoderSpec::Kind::Hashing:
      return encode_hashing(v, spec.hash_dim);
    case EncoderSpec::Kind::Target: {
      const auto idx = domain.find(v);
      const double n = idx ? static_cast<double>(domain.frequencies[*idx]) : 0.0;
      const double lambda = n / (n + spec.m_shrink);
      Vector cond = idx ? stats.conditional.row(static_cast<Eigen::Index>(*idx))
                              .transpose()
                        : Vector::Zero(output_dim).eval();
      return lambda * cond + (1.0 - lambda) * stats.prior;
    }
    case EncoderSpec::Kind::Mdv: {
      const auto idx = domain.find(v);
      if (!idx) return Vector::Zero(output_dim);
      return stats.conditional.row(static_cast<Eigen::Index>(*idx)).transpose();
    }
    case EncoderSpec::Kind::BagOfNgrams: {
      Vector out = Vector::Zero(output_dim);
      for (const auto& g : grams_with_multiplicity(v, spec.ngram_n)) {
        auto it = gram_index_.find(g);
        if (it != gram_index_.end())
          out[static_cast<Eigen::Index>(it->second)] += 1.0;
      }
      return out;
    }
    case EncoderSpec::Kind::ClusterOneHot: {
      Vector out = Vector::Zero(output_dim);
      auto idx = domain.find(v);
      if (!idx) {
        // Unseen strings join the cluster of the most similar training
        // category; ties go to the lowest category index.
        const Vector sims = scorer_->score(v);
        Eigen::Index best = 0;
        for (Eigen::Index j = 1; j < sims.size(); ++j)
          if (sims[j] > sims[best]) best = j;
        idx = static_cast<std::size_t>(best);
      }
      out[cluster_ids[*idx]] = 1.0;
      return out;
    }
  }
  return Vector::Zero(output_dim);
}

FeatureMatrix FittedEncoder::transform(
    const std::vector<std::string>& values) const {
  FeatureMatrix fm;
  fm.values.resize(static_cast<Eigen::Index>(values.size()), output_dim);
  std::unordered_map<std::string, Eigen::Index> cache_index;
  std::vector<Vector> cache;
  for (std::size_t i = 0; i < values.size(); ++i) {
    auto [it, inserted] =
        cache_index.try_emplace(values[i],
                                static_cast<Eigen::Index>(cache.size()));
    if (inserted) cache.push_back(encode(values[i]));
    fm.values.row(static_cast<Eigen::Index>(i)) = cache[it->second].transpose();
  }
  fm.columns = column_labels();
  return fm;
}

std::vector<std::string> FittedEncoder::column_labels() const {
  std::vector<std::string> labels;
  labels.reserve(static_cast<std::size_t>(output_dim));
  switch (spec.kind) {
    case EncoderSpec::Kind::OneHot:
      for (const auto& c : domain.categories) labels.push_back("onehot:" + c);
      break;
    case EncoderSpec::Kind::Similarity:
      for (const auto& c : domain.categories) labels.push_back("sim:" + c);
      break;
    case EncoderSpec::Kind::Hashing:
      for (Eigen::Index j = 0; j < output_dim; ++j)
        labels.push_back("hash:" + std::to_string(j));
      break;
    case EncoderSpec::Kind::Target:
      if (stats.task == TaskKind::MulticlassClf)
        for (const auto& c : stats.classes) labels.push_back("target:" + c);
      else
        labels.push_back("target:y");
      break;
    case EncoderSpec::Kind::Mdv:
      for (const auto& c : stats.classes) labels.push_back("mdv:" + c);
      break;
    case EncoderSpec::Kind::BagOfNgrams:
      for (const auto& g : gram_vocab) labels.push_back("gram:" + g);
      break;
    case EncoderSpec::Kind::ClusterOneHot:
      for (Eigen::Index j = 0; j < output_dim; ++j)
        labels.push_back("cluster:" + std::to_string(j));
      break;
  }
  return labels;
}

}  // namespace simenc
