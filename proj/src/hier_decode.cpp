#include "slu/hier_decode.hpp"

#include <fstream>

#include "json.hpp"
#include "slu/util.hpp"

namespace slu {

ParseResult parse(const SluModel& model, const std::vector<std::string>& tokens, int max_len) {
  Graph g;
  const Ontology& o = model.ontology();
  EncodedUtterance enc = encode(g, model, tokens);
  ExtendedVocab ev = extend_vocab(tokens, model.vocab());

  ParseResult out;
  auto emit = [&](SemanticTriple t, TripleDiagnostics d) {
    if (out.triples.insert(t).second) out.diagnostics.emplace_back(std::move(t), std::move(d));
  };

  ActScores act_scores = classify_acts(g, model, enc);
  for (size_t ai = 0; ai < act_scores.acts.size(); ++ai) {
    const double act_p = g.val(act_scores.probs)(static_cast<int>(ai), 0);
    if (act_p <= 0.5) continue;
    const std::string& act = act_scores.acts[ai];
    if (!o.act_requires_slot(act)) {
      emit({act, std::nullopt, std::nullopt}, {act_p, std::nullopt, {}, false});
      continue;
    }
    SlotScores slot_scores = classify_slots(g, model, enc, act);
    for (size_t si = 0; si < slot_scores.slots.size(); ++si) {
      const double slot_p = g.val(slot_scores.probs)(static_cast<int>(si), 0);
      if (slot_p <= 0.5) continue;
      const std::string& slot = slot_scores.slots[si];
      if (!o.pair_requires_value(act, slot)) {
        emit({act, slot, std::nullopt}, {act_p, slot_p, {}, false});
        continue;
      }
      ValueDecode vd = decode_value(g, model, enc, ev, act, slot, max_len);
      emit({act, slot, vd.tokens}, {act_p, slot_p, vd.logprobs, vd.tokens.empty()});
    }
  }
  return out;
}

std::vector<ParseResult> parse_batch(const SluModel& model, const std::vector<Example>& examples,
                                     int threads, int max_len) {
  std::vector<ParseResult> out(examples.size());
  parallel_for(static_cast<int>(examples.size()), threads,
               [&](int i) { out[i] = parse(model, examples[i].tokens, max_len); });
  return out;
}

void write_predictions(const std::string& path, const std::vector<Example>& examples,
                       const std::vector<ParseResult>& results,
                       const std::vector<std::string>& header_lines) {
  if (examples.size() != results.size())
    throw std::runtime_error("write_predictions: " + std::to_string(examples.size()) +
                             " examples but " + std::to_string(results.size()) + " results");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  for (const auto& line : header_lines) out << "# " << line << "\n";
  for (size_t i = 0; i < examples.size(); ++i) {
    nlohmann::ordered_json rec;
    rec["text"] = examples[i].text();
    rec["triples"] = nlohmann::json::array();
    nlohmann::ordered_json diags = nlohmann::json::array();
    for (const auto& [t, d] : results[i].diagnostics) {
      nlohmann::ordered_json jt;
      jt["act"] = t.act;
      if (t.slot) jt["slot"] = *t.slot;
      if (t.value) jt["value"] = t.value_string();
      rec["triples"].push_back(jt);
      nlohmann::ordered_json jd;
      jd["triple"] = t.to_string();
      jd["act_prob"] = d.act_prob;
      if (d.slot_prob) jd["slot_prob"] = *d.slot_prob;
      if (!d.value_logprobs.empty()) jd["value_logprobs"] = d.value_logprobs;
      if (d.empty_value) jd["empty_value"] = true;
      diags.push_back(jd);
    }
    rec["diagnostics"] = diags;
    out << rec.dump() << "\n";
  }
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace slu
