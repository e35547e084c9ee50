#include "slu/model.hpp"

#include <stdexcept>

#include "slu/checkpoint.hpp"
#include "slu/util.hpp"

namespace slu {

SluModel::SluModel(Ontology ontology, Vocabulary vocab, Dims dims)
    : ontology_(std::move(ontology)), vocab_(std::move(vocab)), dims_(dims) {
  const int E = dims_.embedding;
  const int H2 = 2 * dims_.hidden;
  const int D = dims_.decoder_hidden;
  const int V = vocab_.size();
  const int A = static_cast<int>(ontology_.acts().size());
  const int S = static_cast<int>(ontology_.slots().size());
  if (E <= 0 || dims_.hidden <= 0 || D <= 0) throw std::runtime_error("model: dimensions must be positive");
  if (A == 0) throw std::runtime_error("model: ontology has no acts");

  word_emb = &store_.add_matrix("word_emb", V, E);
  act_emb = &store_.add_matrix("act_emb", A, E);
  slot_emb = &store_.add_matrix("slot_emb", std::max(S, 1), E);
  enc_fwd = make_lstm(store_, "enc_fwd", E, dims_.hidden);
  enc_bwd = make_lstm(store_, "enc_bwd", E, dims_.hidden);
  act_Wu = &store_.add_matrix("act_Wu", E, H2);
  act_bu = &store_.add_bias("act_bu", E);
  act_br = &store_.add_bias("act_br", A);
  slot_Wu = &store_.add_matrix("slot_Wu", E, H2 + E);
  slot_bu = &store_.add_bias("slot_bu", E);
  slot_br = &store_.add_bias("slot_br", std::max(S, 1));
  dec = make_lstm(store_, "dec", E, D);
  dec_init_W = &store_.add_matrix("dec_init_W", D, H2);
  dec_init_b = &store_.add_bias("dec_init_b", D);
  Ws = &store_.add_matrix("Ws", H2, D + 2 * E);
  bs = &store_.add_bias("bs", H2);
  Wc = &store_.add_matrix("Wc", D, 2 * H2);
  Wo = &store_.add_matrix("Wo", V, D);
  bo = &store_.add_bias("bo", V);
  wp = &store_.add_matrix("wp", 1, E + 2 * H2);
  bp = &store_.add_bias("bp", 1);
}

namespace {

// Greedy longest-match cover of `word` by file-lexicon words; empty on failure.
std::vector<std::string> segment_against(const std::string& word, const WordVectors& wv) {
  std::vector<std::string> out;
  size_t pos = 0;
  while (pos < word.size()) {
    size_t len = word.size() - pos;
    for (; len >= 1; --len) {
      if (wv.has(word.substr(pos, len))) break;
    }
    if (len == 0) return {};
    out.push_back(word.substr(pos, len));
    pos += len;
  }
  return out;
}

std::vector<std::string> label_words(const std::string& label, const WordVectors& wv,
                                     const std::map<std::string, std::vector<std::string>>& ov) {
  auto it = ov.find(label);
  if (it != ov.end()) return it->second;
  std::vector<std::string> words;
  for (const std::string& part : split_on(label, '_')) {
    if (part.empty()) continue;
    if (wv.has(part)) {
      words.push_back(part);
      continue;
    }
    auto segs = segment_against(part, wv);
    if (!segs.empty())
      words.insert(words.end(), segs.begin(), segs.end());
    else
      words.push_back(part);
  }
  return words;
}

// Mean of the component vectors present in the file; count reports how many were.
std::pair<Eigen::VectorXd, int> mean_of_found(const std::vector<std::string>& words,
                                              const WordVectors& wv) {
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(wv.dim);
  int found = 0;
  for (const auto& w : words) {
    auto it = wv.table.find(w);
    if (it == wv.table.end()) continue;
    sum += it->second;
    ++found;
  }
  if (found > 0) sum /= static_cast<double>(found);
  return {sum, found};
}

}  // namespace

InitReport SluModel::init(uint64_t seed, const WordVectors* vectors,
                          const std::map<std::string, std::vector<std::string>>& label_components) {
  std::mt19937_64 rng(seed);
  store_.init(rng);

  InitReport report;
  report.vocab_words_total = std::max(vocab_.size() - 4, 0);
  report.labels_total =
      static_cast<int>(ontology_.acts().size() + ontology_.slots().size());
  if (!vectors) {
    report.labels_without_vectors.reserve(report.labels_total);
    for (const auto& a : ontology_.acts()) report.labels_without_vectors.push_back(a);
    for (const auto& s : ontology_.slots()) report.labels_without_vectors.push_back(s);
    return report;
  }
  if (vectors->dim != dims_.embedding)
    throw std::runtime_error("word vectors have dimension " + std::to_string(vectors->dim) +
                             " but the model embedding dimension is " +
                             std::to_string(dims_.embedding));

  for (int id = 4; id < vocab_.size(); ++id) {
    auto it = vectors->table.find(vocab_.token(id));
    if (it == vectors->table.end()) continue;
    word_emb->value.row(id) = it->second.transpose();
    ++report.vocab_words_found;
  }

  auto fill_labels = [&](const std::vector<std::string>& labels, Param& table) {
    for (size_t i = 0; i < labels.size(); ++i) {
      auto [mean, found] = mean_of_found(label_words(labels[i], *vectors, label_components),
                                         *vectors);
      if (found > 0) {
        table.value.row(static_cast<Eigen::Index>(i)) = mean.transpose();
        ++report.labels_found;
      } else {
        report.labels_without_vectors.push_back(labels[i]);
      }
    }
  };
  fill_labels(ontology_.acts(), *act_emb);
  fill_labels(ontology_.slots(), *slot_emb);
  return report;
}

std::vector<Eigen::MatrixXd> SluModel::snapshot_values() const {
  std::vector<Eigen::MatrixXd> out;
  out.reserve(store_.size());
  for (int i = 0; i < store_.size(); ++i) out.push_back(store_.at(i).value);
  return out;
}

void SluModel::load_values(const std::vector<Eigen::MatrixXd>& values) {
  if (static_cast<int>(values.size()) != store_.size())
    throw std::runtime_error("model: snapshot size mismatch");
  for (int i = 0; i < store_.size(); ++i) {
    auto& val = store_.at(i).value;
    if (values[i].rows() != val.rows() || values[i].cols() != val.cols())
      throw std::runtime_error("model: snapshot shape mismatch for '" + store_.at(i).name + "'");
    val = values[i];
  }
}

void SluModel::save(const std::string& path) const {
  CheckpointManifest m;
  m.embedding_dim = dims_.embedding;
  m.hidden_size = dims_.hidden;
  m.decoder_hidden = dims_.decoder_hidden;
  m.vocab_hash = vocab_hash(vocab_);
  m.ontology_hash = ontology_hash(ontology_);
  save_checkpoint(path, m, vocab_, ontology_, store_);
}

SluModel SluModel::load(const std::string& path) {
  LoadedCheckpoint ck = load_checkpoint(path);
  Dims dims;
  dims.embedding = ck.manifest.embedding_dim;
  dims.hidden = ck.manifest.hidden_size;
  dims.decoder_hidden = ck.manifest.decoder_hidden;
  SluModel model(std::move(ck.ontology), std::move(ck.vocab), dims);
  if (static_cast<int>(ck.tensors.size()) != model.store_.size())
    throw std::runtime_error("checkpoint: expected " + std::to_string(model.store_.size()) +
                             " tensors, found " + std::to_string(ck.tensors.size()));
  for (int i = 0; i < model.store_.size(); ++i) {
    Param& p = model.store_.at(i);
    auto it = ck.tensors.find(p.name);
    if (it == ck.tensors.end())
      throw std::runtime_error("checkpoint: missing tensor '" + p.name + "'");
    if (it->second.rows() != p.value.rows() || it->second.cols() != p.value.cols())
      throw std::runtime_error("checkpoint: tensor '" + p.name + "' has shape " +
                               std::to_string(it->second.rows()) + "x" +
                               std::to_string(it->second.cols()) + ", expected " +
                               std::to_string(p.value.rows()) + "x" +
                               std::to_string(p.value.cols()));
    p.value = it->second;
  }
  return model;
}

}  // namespace slu
