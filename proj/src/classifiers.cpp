#include "slu/classifiers.hpp"

#include <stdexcept>

namespace slu {

std::map<std::string, double> ActScores::as_map(const Graph& g) const {
  std::map<std::string, double> out;
  for (size_t i = 0; i < acts.size(); ++i) out[acts[i]] = g.val(probs)(static_cast<int>(i), 0);
  return out;
}

std::map<std::string, double> SlotScores::as_map(const Graph& g) const {
  std::map<std::string, double> out;
  for (size_t i = 0; i < slots.size(); ++i) out[slots[i]] = g.val(probs)(static_cast<int>(i), 0);
  return out;
}

ActScores classify_acts(Graph& g, const SluModel& model, const EncodedUtterance& enc) {
  Expr r = g.dropout(
      g.relu(g.affine(g.param(*model.act_Wu), enc.utterance_vector, g.param(*model.act_bu))));
  ActScores out;
  out.probs = g.sigmoid(g.affine(g.param(*model.act_emb), r, g.param(*model.act_br)));
  out.acts = model.ontology().acts();
  return out;
}

SlotScores classify_slots(Graph& g, const SluModel& model, const EncodedUtterance& enc,
                          const std::string& act) {
  const Ontology& o = model.ontology();
  if (!o.has_act(act)) throw std::runtime_error("classify_slots: unknown act '" + act + "'");
  if (!o.act_requires_slot(act))
    throw std::runtime_error("classify_slots: act '" + act + "' takes no slot");

  Expr e_a = g.lookup(g.param(*model.act_emb), o.act_index(act));
  Expr u = g.concat({enc.utterance_vector, e_a});
  Expr r = g.dropout(g.relu(g.affine(g.param(*model.slot_Wu), u, g.param(*model.slot_bu))));

  SlotScores out;
  out.slots = o.legal_slots(act);
  std::vector<int> idx;
  idx.reserve(out.slots.size());
  for (const auto& s : out.slots) idx.push_back(o.slot_index(s));
  Expr w = g.gather(g.param(*model.slot_emb), idx);
  Expr b = g.gather(g.param(*model.slot_br), idx);
  out.probs = g.sigmoid(g.add(g.matvec(w, r), b));
  return out;
}

std::set<std::string> threshold_select(const std::map<std::string, double>& probs) {
  std::set<std::string> out;
  for (const auto& [label, p] : probs)
    if (p > 0.5) out.insert(label);
  return out;
}

}  // namespace slu
