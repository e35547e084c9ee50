#pragma once

#include "slu/classifiers.hpp"
#include "slu/value_decoder.hpp"

namespace slu {

struct TripleDiagnostics {
  double act_prob = 0.0;
  std::optional<double> slot_prob;
  std::vector<double> value_logprobs;
  bool empty_value = false;  // value-taking pair whose decode produced nothing
};

struct ParseResult {
  TripleSet triples;
  std::vector<std::pair<SemanticTriple, TripleDiagnostics>> diagnostics;
};

// Act classifier at p > 0.5; per selected act either a single-act triple or
// the slot classifier over its legal slots at p > 0.5; per selected pair
// either an act-slot triple or a decoded value. The utterance is encoded
// exactly once. Every emitted triple is ontology-valid by construction; an
// empty decoded value is kept (flagged) rather than dropped.
ParseResult parse(const SluModel& model, const std::vector<std::string>& tokens,
                  int max_len = 10);

// Elementwise parse, order preserved; deterministic regardless of threads.
std::vector<ParseResult> parse_batch(const SluModel& model, const std::vector<Example>& examples,
                                     int threads = 1, int max_len = 10);

// One record per example: text, predicted triples (corpus schema), diagnostics.
void write_predictions(const std::string& path, const std::vector<Example>& examples,
                       const std::vector<ParseResult>& results,
                       const std::vector<std::string>& header_lines = {});

}  // namespace slu
