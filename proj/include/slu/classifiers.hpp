#pragma once

#include <map>
#include <set>

#include "slu/encoder.hpp"

namespace slu {

// Probabilities over every ontology act, in ontology act order.
struct ActScores {
  Expr probs;
  std::vector<std::string> acts;

  std::map<std::string, double> as_map(const Graph& g) const;
};

// Probabilities over the ontology-legal slots of one act, in ontology slot order.
struct SlotScores {
  Expr probs;
  std::vector<std::string> slots;

  std::map<std::string, double> as_map(const Graph& g) const;
};

// p = sigmoid(act_emb . ReLU(W_u h~ + b_u) + b_r); the output matrix IS the
// act embedding table (tied).
ActScores classify_acts(Graph& g, const SluModel& model, const EncodedUtterance& enc);

// Same two-layer form with u = h~ (+) e_a; support restricted to slots with
// (act, slot) legal. Calling it for an act that takes no slot is an error.
SlotScores classify_slots(Graph& g, const SluModel& model, const EncodedUtterance& enc,
                          const std::string& act);

// Labels with probability strictly above 0.5.
std::set<std::string> threshold_select(const std::map<std::string, double>& probs);

}  // namespace slu
