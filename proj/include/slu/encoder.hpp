#pragma once

#include "slu/model.hpp"

namespace slu {

// Output of the bidirectional encoder: per-token states h_i (backward half
// stacked on forward half, 2H each), the same states as columns of one matrix
// for attention, and the utterance vector h~ = backward-at-1 (+) forward-at-T.
struct EncodedUtterance {
  std::vector<Expr> hiddens;
  Expr hidden_matrix;     // 2H x T
  Expr utterance_vector;  // 2H
  int T = 0;
};

// Runs the forward pass left to right and the backward pass right to left,
// both from zero initial states. Tokens outside the vocabulary are embedded
// through the unknown-word row. Dropout (per the graph's settings) is applied
// to each h_i and to h~.
EncodedUtterance encode(Graph& g, const SluModel& model, const std::vector<std::string>& tokens);

}  // namespace slu
