#pragma once

#include <string>
#include <vector>

#include "slu/model.hpp"

namespace slu::testing {

// inform takes valued food/pricerange, request takes bare food, thankyou
// stands alone. Small enough to saturate by hand.
inline Ontology tiny_ontology() {
  return Ontology({"inform", "request", "thankyou"}, {"food", "pricerange"},
                  {{"inform", "food", true},
                   {"inform", "pricerange", true},
                   {"request", "food", false}});
}

inline Vocabulary tiny_vocab(std::vector<std::string> words) {
  std::vector<std::string> toks = {"<pad>", "<unk>", "<s>", "</s>"};
  toks.insert(toks.end(), words.begin(), words.end());
  return Vocabulary(std::move(toks));
}

inline SluModel tiny_model(int embedding = 6, int hidden = 5, int decoder = 4,
                           uint64_t seed = 11) {
  Dims d;
  d.embedding = embedding;
  d.hidden = hidden;
  d.decoder_hidden = decoder;
  SluModel m(tiny_ontology(),
             tiny_vocab({"i", "want", "thai", "expensive", "food", "thank", "you"}), d);
  m.init(seed, nullptr);
  return m;
}

inline void set_param(ParameterStore& store, const std::string& name,
                      const Eigen::MatrixXd& value) {
  Param* p = store.find(name);
  if (p == nullptr) throw std::runtime_error("no param " + name);
  if (p->value.rows() != value.rows() || p->value.cols() != value.cols())
    throw std::runtime_error("shape mismatch for " + name);
  p->value = value;
}

inline void fill_param(ParameterStore& store, const std::string& name, double v) {
  Param* p = store.find(name);
  if (p == nullptr) throw std::runtime_error("no param " + name);
  p->value.setConstant(v);
}

}  // namespace slu::testing
