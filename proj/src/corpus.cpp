#include "slu/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "json.hpp"
#include "slu/util.hpp"

namespace slu {

std::string Example::text() const { return join(tokens, " "); }

static bool is_punct(char c) {
  return std::ispunct(static_cast<unsigned char>(c)) != 0;
}

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> out;
  for (auto& chunk : split_ws(lowercase(text))) {
    size_t b = 0, e = chunk.size();
    while (b < e && is_punct(chunk[b])) ++b;
    while (e > b && is_punct(chunk[e - 1])) --e;
    if (e > b) out.push_back(chunk.substr(b, e - b));
  }
  return out;
}

static SemanticTriple triple_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("act"))
    throw std::runtime_error("triple record needs an 'act' key");
  SemanticTriple t;
  t.act = lowercase(j["act"].get<std::string>());
  if (j.contains("slot") && !j["slot"].is_null())
    t.slot = lowercase(j["slot"].get<std::string>());
  if (j.contains("value") && !j["value"].is_null()) {
    if (!t.slot) throw std::runtime_error("triple has a value but no slot");
    t.value = split_ws(lowercase(j["value"].get<std::string>()));
  }
  return t;
}

static nlohmann::ordered_json triple_to_json(const SemanticTriple& t) {
  nlohmann::ordered_json j;
  j["act"] = t.act;
  if (t.slot) j["slot"] = *t.slot;
  if (t.value) j["value"] = t.value_string();
  return j;
}

std::vector<Example> parse_corpus(const std::string& text, const Ontology& o,
                                  const std::string& source_name) {
  std::vector<Example> out;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const std::string where = source_name + ":" + std::to_string(line_no);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw std::runtime_error(where + ": malformed record: " + e.what());
    }
    if (!j.is_object() || !j.contains("text"))
      throw std::runtime_error(where + ": record needs a 'text' key");
    Example ex;
    ex.tokens = tokenize(j["text"].get<std::string>());
    if (ex.tokens.empty())
      throw std::runtime_error(where + ": utterance has no tokens after normalization");
    if (j.contains("kind")) {
      const std::string k = j["kind"].get<std::string>();
      if (k == "manual")
        ex.kind = TextKind::manual;
      else if (k == "asr_1best")
        ex.kind = TextKind::asr_1best;
      else
        throw std::runtime_error(where + ": unknown kind '" + k + "'");
    }
    if (j.contains("triples")) {
      if (!j["triples"].is_array())
        throw std::runtime_error(where + ": 'triples' must be a list");
      for (const auto& tj : j["triples"]) {
        SemanticTriple t;
        try {
          t = triple_from_json(tj);
        } catch (const std::runtime_error& e) {
          throw std::runtime_error(where + ": " + e.what());
        }
        if (!validate_triple(t, o))
          throw std::runtime_error(where + ": triple " + t.to_string() +
                                   " violates the ontology");
        ex.triples.insert(t);
      }
    }
    out.push_back(std::move(ex));
  }
  return out;
}

std::vector<Example> load_corpus(const std::string& path, const Ontology& o) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("corpus: cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_corpus(ss.str(), o, path);
}

void write_corpus(const std::string& path, const std::vector<Example>& examples,
                  const std::vector<std::string>& header_lines) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("corpus: cannot write '" + path + "'");
  for (const auto& h : header_lines) out << "# " << h << "\n";
  for (const auto& ex : examples) {
    nlohmann::ordered_json j;
    j["text"] = ex.text();
    auto triples = nlohmann::ordered_json::array();
    for (const auto& t : ex.triples) triples.push_back(triple_to_json(t));
    j["triples"] = triples;
    j["kind"] = ex.kind == TextKind::manual ? "manual" : "asr_1best";
    out << j.dump() << "\n";
  }
}

static const std::vector<std::string> kSpecials = {"<pad>", "<unk>", "<s>", "</s>"};

Vocabulary::Vocabulary() : Vocabulary(kSpecials) {}

Vocabulary::Vocabulary(std::vector<std::string> id_to_token)
    : id_to_token_(std::move(id_to_token)) {
  if (id_to_token_.size() < kSpecials.size() ||
      !std::equal(kSpecials.begin(), kSpecials.end(), id_to_token_.begin()))
    throw std::runtime_error("vocabulary must start with <pad>, <unk>, <s>, </s>");
  for (size_t i = 0; i < id_to_token_.size(); ++i) {
    if (!token_to_id_.emplace(id_to_token_[i], static_cast<int>(i)).second)
      throw std::runtime_error("vocabulary: duplicate token '" + id_to_token_[i] + "'");
  }
}

const std::string& Vocabulary::token(int id) const {
  if (id < 0 || id >= size()) throw std::runtime_error("vocabulary: id out of range");
  return id_to_token_[id];
}

int Vocabulary::id_or_unk(const std::string& token) const {
  auto it = token_to_id_.find(token);
  return it == token_to_id_.end() ? kUnk : it->second;
}

std::optional<int> Vocabulary::lookup(const std::string& token) const {
  auto it = token_to_id_.find(token);
  if (it == token_to_id_.end()) return std::nullopt;
  return it->second;
}

Vocabulary build_vocab(const std::vector<Example>& examples, int min_count) {
  if (min_count < 1) throw std::runtime_error("build_vocab: min_count must be >= 1");
  if (examples.empty()) throw std::runtime_error("build_vocab: empty corpus");
  std::map<std::string, long> freq;
  for (const auto& ex : examples)
    for (const auto& tok : ex.tokens) ++freq[tok];
  std::vector<std::pair<std::string, long>> items(freq.begin(), freq.end());
  std::stable_sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  std::vector<std::string> toks = kSpecials;
  for (const auto& [tok, count] : items)
    if (count >= min_count) toks.push_back(tok);
  return Vocabulary(std::move(toks));
}

uint64_t vocab_hash(const Vocabulary& v) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& t : v.tokens()) {
    h = fnv1a64(t, h);
    h = fnv1a64("\n", h);
  }
  return h;
}

int ExtendedVocab::target_id(const std::string& token) const {
  if (auto id = base->lookup(token)) return *id;
  for (size_t k = 0; k < utterance_words.size(); ++k)
    if (utterance_words[k] == token) return base->size() + static_cast<int>(k);
  return Vocabulary::kUnk;
}

std::string ExtendedVocab::token_of(int extended_id) const {
  if (extended_id < base->size()) return base->token(extended_id);
  const int k = extended_id - base->size();
  if (k >= static_cast<int>(utterance_words.size()))
    throw std::runtime_error("extended vocab: id out of range");
  return utterance_words[k];
}

ExtendedVocab extend_vocab(const std::vector<std::string>& tokens, const Vocabulary& v) {
  if (tokens.empty()) throw std::runtime_error("extend_vocab: empty token sequence");
  ExtendedVocab ev;
  ev.base = &v;
  for (const auto& tok : tokens) {
    if (auto id = v.lookup(tok)) {
      ev.position_to_extended_id.push_back(*id);
      continue;
    }
    int tmp = -1;
    for (size_t k = 0; k < ev.utterance_words.size(); ++k)
      if (ev.utterance_words[k] == tok) tmp = static_cast<int>(k);
    if (tmp < 0) {
      tmp = static_cast<int>(ev.utterance_words.size());
      ev.utterance_words.push_back(tok);
    }
    ev.position_to_extended_id.push_back(v.size() + tmp);
  }
  return ev;
}

std::vector<Example> subsample(const std::vector<Example>& examples, double fraction,
                               uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0))
    throw std::runtime_error("subsample: fraction must be in (0, 1]");
  const size_t n = examples.size();
  const size_t k = static_cast<size_t>(std::ceil(fraction * static_cast<double>(n)));
  std::vector<size_t> idx(n);
  for (size_t i = 0; i < n; ++i) idx[i] = i;
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(std::min(k, n));
  std::sort(idx.begin(), idx.end());
  std::vector<Example> out;
  out.reserve(idx.size());
  for (size_t i : idx) out.push_back(examples[i]);
  return out;
}

TripleSet all_triples(const std::vector<Example>& examples) {
  TripleSet s;
  for (const auto& ex : examples) s.insert(ex.triples.begin(), ex.triples.end());
  return s;
}

std::pair<TripleSet, TripleSet> split_seen_unseen(const std::vector<Example>& train,
                                                  const std::vector<Example>& test) {
  const TripleSet train_triples = all_triples(train);
  TripleSet seen, unseen;
  for (const auto& ex : test) {
    for (const auto& t : ex.triples) {
      if (train_triples.count(t))
        seen.insert(t);
      else
        unseen.insert(t);
    }
  }
  return {seen, unseen};
}

WordVectors load_word_vectors(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("word vectors: cannot open '" + path + "'");
  WordVectors wv;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto parts = split_ws(line);
    if (parts.size() < 2)
      throw std::runtime_error("word vectors: " + path + ":" + std::to_string(line_no) +
                               ": expected token plus components");
    const int dim = static_cast<int>(parts.size()) - 1;
    if (wv.dim == 0)
      wv.dim = dim;
    else if (dim != wv.dim)
      throw std::runtime_error("word vectors: " + path + ":" + std::to_string(line_no) +
                               ": dimension " + std::to_string(dim) + " != " +
                               std::to_string(wv.dim));
    Eigen::VectorXd v(dim);
    for (int i = 0; i < dim; ++i) {
      try {
        v[i] = std::stod(parts[i + 1]);
      } catch (const std::exception&) {
        throw std::runtime_error("word vectors: " + path + ":" + std::to_string(line_no) +
                                 ": bad component '" + parts[i + 1] + "'");
      }
    }
    wv.table[parts[0]] = std::move(v);
  }
  return wv;
}

}  // namespace slu
