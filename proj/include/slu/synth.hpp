#pragma once

#include <map>
#include <set>

#include "slu/corpus.hpp"

namespace slu {

struct ValueLexicon {
  std::vector<std::string> train_values;
  std::vector<std::string> oov_values;  // held out of every training utterance and value
};

// Probabilities of the utterance shapes plus the value/holdout sampling rates.
// single: one triple from one template. compound: an inform+deny pair over one
// slot in a single utterance ("... X ... not Y ..."). courtesy: a single-triple
// template with a courtesy tail, adding the courtesy act's triple.
struct GrammarMix {
  double single = 0.62;
  double compound = 0.20;
  double courtesy = 0.18;
  double oov_value_rate = 0.25;  // chance a drawn value comes from the oov partition
  double holdout_rate = 0.20;    // fraction of forced holdout-pair examples in test sets
};

// Template-based utterance grammar over an ontology. Pattern keys are
// "act|slot" for pair templates and "act" for slotless acts; value-taking
// patterns carry a {v} placeholder, compound patterns {v1} and {v2}.
struct SyntheticGrammarSpec {
  Ontology ontology;
  std::map<std::string, std::vector<std::string>> patterns;
  std::map<std::string, std::vector<std::string>> compound_patterns;  // slot -> patterns
  std::map<std::string, ValueLexicon> lexicon;                        // slot -> words
  std::string courtesy_act = "thankyou";
  GrammarMix mix;

  void validate() const;  // throws on structural problems
};

// 6 acts x 4 slots restaurant-domain grammar: inform/deny/confirm take values,
// request takes bare slots, thankyou/bye stand alone; 30 single-word values
// per slot of which 6 form the oov partition; compound patterns over food and
// area.
SyntheticGrammarSpec default_grammar();

SyntheticGrammarSpec parse_grammar(const std::string& json_text);
SyntheticGrammarSpec load_grammar(const std::string& path);
std::string grammar_to_json(const SyntheticGrammarSpec& spec);
void save_grammar(const SyntheticGrammarSpec& spec, const std::string& path);

struct SynthOptions {
  int n = 0;
  uint64_t seed = 1;
  bool use_oov_values = false;  // false for training sets
  std::set<std::pair<std::string, std::string>> holdout_pairs;
  bool force_holdout = false;  // true for test sets: cycle holdout pairs in deterministically
};

// Deterministic given seed. With force_holdout false, no generated example
// touches a holdout pair; with it true, every ~1/holdout_rate-th example uses
// one (cycling), guaranteeing coverage.
std::vector<Example> synthesize(const SyntheticGrammarSpec& spec, const SynthOptions& opt);

}  // namespace slu
