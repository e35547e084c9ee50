#include "slu/value_decoder.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <stdexcept>

namespace slu {

DecoderState init_decoder(Graph& g, const SluModel& model, const EncodedUtterance& enc) {
  Expr s0 = g.affine(g.param(*model.dec_init_W), enc.utterance_vector,
                     g.param(*model.dec_init_b));
  return {g.concat({s0, g.zeros(model.dims().decoder_hidden)})};
}

StepResult decode_step(Graph& g, const SluModel& model, const DecoderState& state,
                       int prev_word_id, const EncodedUtterance& enc, const ExtendedVocab& ev,
                       int act_idx, int slot_idx) {
  const int D = model.dims().decoder_hidden;
  Expr e_v = g.lookup(g.param(*model.word_emb), prev_word_id);
  Expr hc = g.lstm_cell(e_v, state.hc, g.param(*model.dec.Wx), g.param(*model.dec.Wh),
                        g.param(*model.dec.b));
  Expr s = g.slice(hc, 0, D);
  Expr e_a = g.lookup(g.param(*model.act_emb), act_idx);
  Expr e_s = g.lookup(g.param(*model.slot_emb), slot_idx);
  Expr s_tilde = g.affine(g.param(*model.Ws), g.concat({s, e_a, e_s}), g.param(*model.bs));

  StepResult out;
  out.attention = g.softmax(g.mat_t_vec(enc.hidden_matrix, s_tilde));
  Expr context = g.matvec(enc.hidden_matrix, out.attention);
  out.gen = g.softmax(g.affine(
      g.param(*model.Wo),
      g.tanh(g.matvec(g.param(*model.Wc), g.concat({s_tilde, context}))), g.param(*model.bo)));
  out.gate =
      g.sigmoid(g.affine(g.param(*model.wp), g.concat({e_v, s_tilde, context}), g.param(*model.bp)));
  out.ptr = g.scatter_sum(out.attention, ev.position_to_extended_id, ev.ext_size());
  out.mixture = g.add(g.scalar_mul(out.gate, g.pad(out.gen, ev.ext_size())),
                      g.scalar_mul(g.one_minus(out.gate), out.ptr));
  out.next = {hc};
  return out;
}

ValueDecode decode_value(Graph& g, const SluModel& model, const EncodedUtterance& enc,
                         const ExtendedVocab& ev, const std::string& act,
                         const std::string& slot, int max_len) {
  const Ontology& o = model.ontology();
  if (!o.is_legal_pair(act, slot) || !o.pair_requires_value(act, slot))
    throw std::runtime_error("decode_value: (" + act + ", " + slot +
                             ") is not a value-taking pair");
  const int act_idx = o.act_index(act);
  const int slot_idx = o.slot_index(slot);

  ValueDecode out;
  out.attention.resize(0, enc.T);
  DecoderState state = init_decoder(g, model, enc);
  int prev = Vocabulary::kBos;
  for (int step = 0; step < max_len; ++step) {
    StepResult res = decode_step(g, model, state, prev, enc, ev, act_idx, slot_idx);
    const auto& probs = g.val(res.mixture);
    int best = 0;
    for (int i = 1; i < probs.rows(); ++i)
      if (probs(i, 0) > probs(best, 0)) best = i;

    out.attention.conservativeResize(out.attention.rows() + 1, enc.T);
    out.attention.row(out.attention.rows() - 1) = g.val(res.attention).transpose();
    out.logprobs.push_back(std::log(std::max(probs(best, 0), kProbEps)));

    if (best == Vocabulary::kEos) {
      out.ended = true;
      break;
    }
    const std::string word = ev.token_of(best);
    out.tokens.push_back(word);
    prev = model.vocab().id_or_unk(word);
    state = res.next;
  }
  return out;
}

TeacherForcedLoss teacher_forced_nll(Graph& g, const SluModel& model,
                                     const EncodedUtterance& enc, const ExtendedVocab& ev,
                                     const std::string& act, const std::string& slot,
                                     const std::vector<std::string>& gold_value) {
  const Ontology& o = model.ontology();
  const int act_idx = o.act_index(act);
  const int slot_idx = o.slot_index(slot);

  TeacherForcedLoss out;
  std::vector<int> targets;
  targets.reserve(gold_value.size() + 1);
  for (const auto& w : gold_value) {
    const int id = ev.target_id(w);
    if (id == Vocabulary::kUnk && w != model.vocab().token(Vocabulary::kUnk)) ++out.unk_mapped;
    targets.push_back(id);
  }
  targets.push_back(Vocabulary::kEos);

  std::vector<Expr> dists;
  dists.reserve(targets.size());
  DecoderState state = init_decoder(g, model, enc);
  int prev = Vocabulary::kBos;
  for (size_t step = 0; step < targets.size(); ++step) {
    StepResult res = decode_step(g, model, state, prev, enc, ev, act_idx, slot_idx);
    dists.push_back(res.mixture);
    state = res.next;
    if (step < gold_value.size()) prev = model.vocab().id_or_unk(gold_value[step]);
  }
  out.loss = nll_sequence_loss(g, dists, targets);
  return out;
}

void write_attention_table(const std::string& path, const std::vector<std::string>& tokens,
                           const std::vector<std::string>& step_labels,
                           const Eigen::MatrixXd& attention,
                           const std::vector<std::string>& header_lines) {
  if (attention.rows() != static_cast<Eigen::Index>(step_labels.size()) ||
      attention.cols() != static_cast<Eigen::Index>(tokens.size()))
    throw std::runtime_error("write_attention_table: shape mismatch");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  for (const auto& line : header_lines) out << "# " << line << "\n";
  out << "step\toutput";
  for (const auto& t : tokens) out << "\t" << t;
  out << "\n";
  out << std::setprecision(10);
  for (Eigen::Index r = 0; r < attention.rows(); ++r) {
    out << (r + 1) << "\t" << step_labels[r];
    for (Eigen::Index c = 0; c < attention.cols(); ++c) out << "\t" << attention(r, c);
    out << "\n";
  }
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace slu
