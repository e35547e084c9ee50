#include "slu/encoder.hpp"

#include <stdexcept>

namespace slu {

EncodedUtterance encode(Graph& g, const SluModel& model, const std::vector<std::string>& tokens) {
  const int T = static_cast<int>(tokens.size());
  if (T == 0) throw std::runtime_error("encode: empty utterance");
  const int H = model.dims().hidden;

  Expr emb = g.param(*model.word_emb);
  std::vector<Expr> inputs;
  inputs.reserve(T);
  for (const auto& tok : tokens) inputs.push_back(g.lookup(emb, model.vocab().id_or_unk(tok)));

  std::vector<Expr> fwd(T), bwd(T);
  Expr hc = lstm_start(g, model.enc_fwd);
  for (int i = 0; i < T; ++i) {
    hc = lstm_step(g, model.enc_fwd, hc, inputs[i]);
    fwd[i] = g.slice(hc, 0, H);
  }
  hc = lstm_start(g, model.enc_bwd);
  for (int i = T - 1; i >= 0; --i) {
    hc = lstm_step(g, model.enc_bwd, hc, inputs[i]);
    bwd[i] = g.slice(hc, 0, H);
  }

  EncodedUtterance enc;
  enc.T = T;
  enc.hiddens.reserve(T);
  for (int i = 0; i < T; ++i) enc.hiddens.push_back(g.dropout(g.concat({bwd[i], fwd[i]})));
  enc.hidden_matrix = g.concat_cols(enc.hiddens);
  enc.utterance_vector = g.dropout(g.concat({bwd[0], fwd[T - 1]}));
  return enc;
}

}  // namespace slu
