#pragma once

#include <optional>
#include <string>
#include <vector>

#include "slu/ontology.hpp"

namespace slu {

// Corpus-level micro counts over exact triple matches. Precision falls back
// to 0 when nothing was predicted (and recall when there is no gold).
struct ScoreReport {
  long tp = 0;
  long fp = 0;
  long fn = 0;

  double precision() const { return tp + fp == 0 ? 0.0 : static_cast<double>(tp) / (tp + fp); }
  double recall() const { return tp + fn == 0 ? 0.0 : static_cast<double>(tp) / (tp + fn); }
  double f1() const {
    const double p = precision(), r = recall();
    return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
  }
};

// Per utterance: TP = |pred and gold|, FP = |pred minus gold|, FN = |gold minus
// pred|, micro-aggregated. Lengths must match.
ScoreReport score(const std::vector<TripleSet>& preds, const std::vector<TripleSet>& golds);

// Seen/unseen breakdown against the training annotation: gold triples (TP and
// FN) fall in the category given by their own occurrence in train_triples;
// a false positive falls in the category its predicted triple would belong to.
std::pair<ScoreReport, ScoreReport> score_by_category(const std::vector<TripleSet>& preds,
                                                      const std::vector<TripleSet>& golds,
                                                      const TripleSet& train_triples);

std::string score_report_json(const ScoreReport& overall,
                              const std::optional<std::pair<ScoreReport, ScoreReport>>&
                                  seen_unseen = std::nullopt);

// Aligned plain-text rendering of the same numbers.
std::string score_report_table(const ScoreReport& overall,
                               const std::optional<std::pair<ScoreReport, ScoreReport>>&
                                   seen_unseen = std::nullopt);

}  // namespace slu
