#include "slu/evaluation.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace slu {

ScoreReport score(const std::vector<TripleSet>& preds, const std::vector<TripleSet>& golds) {
  if (preds.size() != golds.size())
    throw std::runtime_error("score: " + std::to_string(preds.size()) + " predictions for " +
                             std::to_string(golds.size()) + " gold sets");
  ScoreReport r;
  for (size_t i = 0; i < preds.size(); ++i) {
    for (const auto& t : preds[i]) {
      if (golds[i].count(t))
        ++r.tp;
      else
        ++r.fp;
    }
    for (const auto& t : golds[i])
      if (!preds[i].count(t)) ++r.fn;
  }
  return r;
}

std::pair<ScoreReport, ScoreReport> score_by_category(const std::vector<TripleSet>& preds,
                                                      const std::vector<TripleSet>& golds,
                                                      const TripleSet& train_triples) {
  if (preds.size() != golds.size())
    throw std::runtime_error("score_by_category: prediction/gold length mismatch");
  ScoreReport seen, unseen;
  auto bucket = [&](const SemanticTriple& t) -> ScoreReport& {
    return train_triples.count(t) ? seen : unseen;
  };
  for (size_t i = 0; i < preds.size(); ++i) {
    for (const auto& t : preds[i]) {
      if (golds[i].count(t))
        ++bucket(t).tp;
      else
        ++bucket(t).fp;
    }
    for (const auto& t : golds[i])
      if (!preds[i].count(t)) ++bucket(t).fn;
  }
  return {seen, unseen};
}

std::string score_report_json(
    const ScoreReport& overall,
    const std::optional<std::pair<ScoreReport, ScoreReport>>& seen_unseen) {
  auto one = [](const ScoreReport& r) {
    nlohmann::ordered_json j;
    j["tp"] = r.tp;
    j["fp"] = r.fp;
    j["fn"] = r.fn;
    j["precision"] = r.precision();
    j["recall"] = r.recall();
    j["f1"] = r.f1();
    return j;
  };
  nlohmann::ordered_json j;
  j["overall"] = one(overall);
  if (seen_unseen) {
    j["seen"] = one(seen_unseen->first);
    j["unseen"] = one(seen_unseen->second);
  }
  return j.dump(2);
}

std::string score_report_table(
    const ScoreReport& overall,
    const std::optional<std::pair<ScoreReport, ScoreReport>>& seen_unseen) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof(line), "%-8s %8s %8s %8s %10s %10s %10s\n", "split", "tp", "fp",
                "fn", "precision", "recall", "f1");
  out << line;
  auto row = [&](const char* name, const ScoreReport& r) {
    std::snprintf(line, sizeof(line), "%-8s %8ld %8ld %8ld %10.4f %10.4f %10.4f\n", name, r.tp,
                  r.fp, r.fn, r.precision(), r.recall(), r.f1());
    out << line;
  };
  row("overall", overall);
  if (seen_unseen) {
    row("seen", seen_unseen->first);
    row("unseen", seen_unseen->second);
  }
  return out.str();
}

}  // namespace slu
