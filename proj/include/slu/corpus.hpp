#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "slu/ontology.hpp"

namespace slu {

enum class TextKind { manual, asr_1best };

struct Example {
  std::vector<std::string> tokens;
  TripleSet triples;
  TextKind kind = TextKind::manual;

  std::string text() const;
};

// lowercase, strip punctuation adjacent to word boundaries, split on whitespace
std::vector<std::string> tokenize(const std::string& text);

// One JSON record per line: {"text":..., "triples":[{"act":..,"slot":..,"value":..}],
// "kind":"manual"|"asr_1best"}. "value" is a string, split on spaces. Lines
// starting with '#' and blank lines are skipped. Triples are validated against
// the ontology; errors carry the line number.
std::vector<Example> load_corpus(const std::string& path, const Ontology& o);
std::vector<Example> parse_corpus(const std::string& text, const Ontology& o,
                                  const std::string& source_name);

void write_corpus(const std::string& path, const std::vector<Example>& examples,
                  const std::vector<std::string>& header_lines = {});

class Vocabulary {
 public:
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;
  static constexpr int kBos = 2;
  static constexpr int kEos = 3;

  Vocabulary();
  explicit Vocabulary(std::vector<std::string> id_to_token);  // must begin with the specials

  int size() const { return static_cast<int>(id_to_token_.size()); }
  const std::string& token(int id) const;
  // base id, or kUnk for tokens outside the vocabulary
  int id_or_unk(const std::string& token) const;
  std::optional<int> lookup(const std::string& token) const;
  const std::vector<std::string>& tokens() const { return id_to_token_; }

 private:
  std::vector<std::string> id_to_token_;
  std::unordered_map<std::string, int> token_to_id_;
};

// Specials first, then tokens with corpus frequency >= min_count ordered by
// descending frequency, ties broken lexicographically.
Vocabulary build_vocab(const std::vector<Example>& examples, int min_count);
uint64_t vocab_hash(const Vocabulary& v);

// Base vocabulary plus temporary ids for this utterance's OOV words.
// Extended ids are contiguous above the base range; repeated OOV words share
// one id; in-base words keep their base id.
struct ExtendedVocab {
  const Vocabulary* base = nullptr;
  std::vector<std::string> utterance_words;  // OOV words, first-occurrence order
  std::vector<int> position_to_extended_id;  // one entry per token position

  int ext_size() const { return base->size() + static_cast<int>(utterance_words.size()); }
  // base id if known, else this utterance's temporary id, else kUnk
  int target_id(const std::string& token) const;
  std::string token_of(int extended_id) const;
};

ExtendedVocab extend_vocab(const std::vector<std::string>& tokens, const Vocabulary& v);

// ceil(fraction * N) examples drawn uniformly without replacement, corpus
// order preserved; deterministic given seed.
std::vector<Example> subsample(const std::vector<Example>& examples, double fraction,
                               uint64_t seed);

TripleSet all_triples(const std::vector<Example>& examples);

// Partitions the gold triples of the test set by exact occurrence in the
// training annotation.
std::pair<TripleSet, TripleSet> split_seen_unseen(const std::vector<Example>& train,
                                                  const std::vector<Example>& test);

// Word-vector file: token followed by whitespace-separated components, one
// entry per line, constant dimension.
struct WordVectors {
  int dim = 0;
  std::unordered_map<std::string, Eigen::VectorXd> table;

  bool has(const std::string& w) const { return table.count(w) > 0; }
};

WordVectors load_word_vectors(const std::string& path);

}  // namespace slu
