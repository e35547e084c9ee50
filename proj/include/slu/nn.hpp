#pragma once

#include "slu/graph.hpp"

namespace slu {

// One LSTM cell's parameters: gate order [input; forget; output; candidate]
// stacked along rows (4H x in, 4H x H, 4H).
struct LstmParams {
  Param* Wx = nullptr;
  Param* Wh = nullptr;
  Param* b = nullptr;
  int input_size = 0;
  int hidden_size = 0;
};

LstmParams make_lstm(ParameterStore& store, const std::string& prefix, int input_size,
                     int hidden_size);

// Zero h and c, packed [h; c].
Expr lstm_start(Graph& g, const LstmParams& p);

// prev_hc is the packed [h; c] from the previous step (or lstm_start).
Expr lstm_step(Graph& g, const LstmParams& p, Expr prev_hc, Expr x);

inline Expr lstm_h(Graph& g, const LstmParams& p, Expr hc) {
  return g.slice(hc, 0, p.hidden_size);
}

Expr bce_multilabel_loss(Graph& g, Expr probs, const Eigen::VectorXd& targets);

// -sum_i log P_i(target_i). Each distribution must sum to 1 within 1e-6;
// a target id outside a distribution's support is an error.
Expr nll_sequence_loss(Graph& g, const std::vector<Expr>& step_distributions,
                       const std::vector<int>& target_ids);

struct AdamState {
  double lr = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double clip_norm = 5.0;
  long step = 0;
  std::vector<Eigen::MatrixXd> m, v;
};

// Rescales grads in place so the global norm is at most clip_norm, then takes
// one Adam step over every parameter (a missing grad cell counts as zero).
// NaN anywhere in grads aborts with an error.
void adam_update(AdamState& state, ParameterStore& store, std::vector<Eigen::MatrixXd>& grads);

}  // namespace slu
