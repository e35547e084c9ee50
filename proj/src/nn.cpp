#include "slu/nn.hpp"

#include <cmath>
#include <stdexcept>

namespace slu {

LstmParams make_lstm(ParameterStore& store, const std::string& prefix, int input_size,
                     int hidden_size) {
  LstmParams p;
  p.input_size = input_size;
  p.hidden_size = hidden_size;
  p.Wx = &store.add_matrix(prefix + ".Wx", 4 * hidden_size, input_size);
  p.Wh = &store.add_matrix(prefix + ".Wh", 4 * hidden_size, hidden_size);
  p.b = &store.add_bias(prefix + ".b", 4 * hidden_size);
  return p;
}

Expr lstm_start(Graph& g, const LstmParams& p) { return g.zeros(2 * p.hidden_size); }

Expr lstm_step(Graph& g, const LstmParams& p, Expr prev_hc, Expr x) {
  return g.lstm_cell(x, prev_hc, g.param(*p.Wx), g.param(*p.Wh), g.param(*p.b));
}

Expr bce_multilabel_loss(Graph& g, Expr probs, const Eigen::VectorXd& targets) {
  return g.bce(probs, targets);
}

Expr nll_sequence_loss(Graph& g, const std::vector<Expr>& step_distributions,
                       const std::vector<int>& target_ids) {
  if (step_distributions.size() != target_ids.size())
    throw std::runtime_error("nll_sequence_loss: " + std::to_string(step_distributions.size()) +
                             " distributions for " + std::to_string(target_ids.size()) +
                             " targets");
  if (step_distributions.empty()) throw std::runtime_error("nll_sequence_loss: empty sequence");
  std::vector<Expr> terms;
  terms.reserve(step_distributions.size());
  for (size_t i = 0; i < step_distributions.size(); ++i) {
    const double mass = g.val(step_distributions[i]).sum();
    if (std::abs(mass - 1.0) > 1e-6)
      throw std::runtime_error("nll_sequence_loss: step " + std::to_string(i) +
                               " distribution sums to " + std::to_string(mass));
    terms.push_back(g.pick_neg_log(step_distributions[i], target_ids[i]));
  }
  return g.weighted_sum(terms, std::vector<double>(terms.size(), 1.0));
}

void adam_update(AdamState& state, ParameterStore& store, std::vector<Eigen::MatrixXd>& grads) {
  const int n = store.size();
  if (static_cast<int>(grads.size()) != n)
    throw std::runtime_error("adam_update: gradient list does not match parameter store");
  if (state.m.empty()) {
    state.m.resize(n);
    state.v.resize(n);
    for (int i = 0; i < n; ++i) {
      const auto& val = store.at(i).value;
      state.m[i] = Eigen::MatrixXd::Zero(val.rows(), val.cols());
      state.v[i] = Eigen::MatrixXd::Zero(val.rows(), val.cols());
    }
  }

  double sq = 0.0;
  for (int i = 0; i < n; ++i) {
    if (grads[i].size() == 0) continue;
    if (!grads[i].allFinite())
      throw std::runtime_error("adam_update: non-finite gradient for '" + store.at(i).name + "'");
    sq += grads[i].squaredNorm();
  }
  const double norm = std::sqrt(sq);
  if (norm > state.clip_norm && norm > 0.0) {
    const double scale = state.clip_norm / norm;
    for (auto& gm : grads)
      if (gm.size() != 0) gm *= scale;
  }

  state.step += 1;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  for (int i = 0; i < n; ++i) {
    auto& m = state.m[i];
    auto& v = state.v[i];
    if (grads[i].size() != 0) {
      m = state.beta1 * m + (1.0 - state.beta1) * grads[i];
      v = state.beta2 * v + (1.0 - state.beta2) * grads[i].cwiseProduct(grads[i]);
    } else {
      m *= state.beta1;
      v *= state.beta2;
    }
    auto& val = store.at(i).value;
    val.array() -=
        state.lr * (m.array() / bc1) / ((v.array() / bc2).sqrt() + state.eps);
  }
}

}  // namespace slu
