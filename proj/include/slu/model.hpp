#pragma once

#include <map>
#include <string>
#include <vector>

#include "slu/corpus.hpp"
#include "slu/nn.hpp"
#include "slu/ontology.hpp"

namespace slu {

struct Dims {
  int embedding = 100;       // E
  int hidden = 128;          // encoder hidden units per direction; h and h~ are 2x this
  int decoder_hidden = 128;  // D
};

struct InitReport {
  int vocab_words_found = 0;
  int vocab_words_total = 0;  // specials excluded
  int labels_found = 0;
  int labels_total = 0;
  std::vector<std::string> labels_without_vectors;

  double vocab_coverage() const {
    return vocab_words_total == 0 ? 1.0
                                  : static_cast<double>(vocab_words_found) / vocab_words_total;
  }
  double label_coverage() const {
    return labels_total == 0 ? 1.0 : static_cast<double>(labels_found) / labels_total;
  }
};

// All trainable parameters of the parser plus the ontology and vocabulary they
// are bound to. The act and slot embedding tables double as the output weight
// matrices of the respective classifiers (weight tying): same Param object,
// not a copy.
class SluModel {
 public:
  SluModel(Ontology ontology, Vocabulary vocab, Dims dims);

  // Random init (registration order, so reproducible), then word-vector
  // overrides: vocabulary rows found in the file are copied verbatim; act and
  // slot embeddings become the mean of their component-word vectors (names
  // split on underscores, concatenations segmented greedily against the file,
  // `label_components` winning over both).
  InitReport init(uint64_t seed, const WordVectors* vectors,
                  const std::map<std::string, std::vector<std::string>>& label_components = {});

  const Ontology& ontology() const { return ontology_; }
  const Vocabulary& vocab() const { return vocab_; }
  const Dims& dims() const { return dims_; }
  ParameterStore& store() { return store_; }
  const ParameterStore& store() const { return store_; }

  std::vector<Eigen::MatrixXd> snapshot_values() const;
  void load_values(const std::vector<Eigen::MatrixXd>& values);

  void save(const std::string& path) const;
  static SluModel load(const std::string& path);

  // embeddings (word table shared by encoder and decoder)
  Param* word_emb = nullptr;  // |V| x E
  Param* act_emb = nullptr;   // |A| x E, tied output matrix of the act classifier
  Param* slot_emb = nullptr;  // |S| x E, tied output matrix of the slot classifier

  LstmParams enc_fwd, enc_bwd;  // E -> H each

  // act classifier: r = ReLU(W_u h~ + b_u); p = sigmoid(act_emb r + b_r)
  Param* act_Wu = nullptr;  // E x 2H
  Param* act_bu = nullptr;  // E
  Param* act_br = nullptr;  // |A|

  // slot classifier: u = h~ (+) e_a
  Param* slot_Wu = nullptr;  // E x (2H + E)
  Param* slot_bu = nullptr;  // E
  Param* slot_br = nullptr;  // |S|

  LstmParams dec;             // E -> D
  Param* dec_init_W = nullptr;  // D x 2H, maps h~ to the initial decoder state
  Param* dec_init_b = nullptr;  // D

  Param* Ws = nullptr;  // 2H x (D + 2E), state-context injection s~ = Ws(s (+) e_a (+) e_s) + bs
  Param* bs = nullptr;  // 2H
  Param* Wc = nullptr;  // D x 4H, reads s~ (+) c
  Param* Wo = nullptr;  // |V| x D, generation output layer
  Param* bo = nullptr;  // |V|
  Param* wp = nullptr;  // 1 x (E + 4H), balance gate over e_v (+) s~ (+) c
  Param* bp = nullptr;  // 1

 private:
  Ontology ontology_;
  Vocabulary vocab_;
  Dims dims_;
  ParameterStore store_;
};

}  // namespace slu
