#include <cstdio>
#include <set>

#include "doctest.h"
#include "slu/synth.hpp"

using namespace slu;

namespace {

std::set<std::string> oov_words(const SyntheticGrammarSpec& g) {
  std::set<std::string> out;
  for (const auto& [slot, lex] : g.lexicon)
    out.insert(lex.oov_values.begin(), lex.oov_values.end());
  return out;
}

}  // namespace

TEST_CASE("default grammar is structurally sound") {
  SyntheticGrammarSpec g = default_grammar();
  CHECK(g.ontology.acts().size() == 6);
  CHECK(g.ontology.slots().size() == 4);
  CHECK(g.ontology.legal_pairs().size() == 16);
  for (const auto& [slot, lex] : g.lexicon) {
    CHECK(lex.train_values.size() == 24);
    CHECK(lex.oov_values.size() == 6);
  }
  // no value word doubles as a value of another slot
  std::map<std::string, std::string> owner;
  for (const auto& [slot, lex] : g.lexicon) {
    for (const auto& v : lex.train_values) CHECK(owner.emplace(v, slot).second);
    for (const auto& v : lex.oov_values) CHECK(owner.emplace(v, slot).second);
  }
  // no value word appears inside any template
  std::set<std::string> template_words;
  auto absorb = [&](const std::map<std::string, std::vector<std::string>>& pats) {
    for (const auto& [key, ps] : pats)
      for (const auto& p : ps)
        for (const auto& w : tokenize(p))
          if (w.find('{') == std::string::npos) template_words.insert(w);
  };
  absorb(g.patterns);
  absorb(g.compound_patterns);
  for (const auto& [v, slot] : owner) CHECK(template_words.count(v) == 0);
}

TEST_CASE("generated examples are valid and deterministic") {
  SyntheticGrammarSpec g = default_grammar();
  SynthOptions opt;
  opt.n = 300;
  opt.seed = 42;
  auto a = synthesize(g, opt);
  auto b = synthesize(g, opt);
  REQUIRE(a.size() == 300);
  REQUIRE(b.size() == 300);
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].tokens == b[i].tokens);
    CHECK(a[i].triples == b[i].triples);
    CHECK_FALSE(a[i].tokens.empty());
    for (const auto& t : a[i].triples) CHECK(validate_triple(t, g.ontology));
  }
  opt.seed = 43;
  auto c = synthesize(g, opt);
  bool differs = false;
  for (size_t i = 0; i < a.size() && !differs; ++i) differs = a[i].tokens != c[i].tokens;
  CHECK(differs);
}

TEST_CASE("mix shapes show up across a large draw") {
  SyntheticGrammarSpec g = default_grammar();
  SynthOptions opt;
  opt.n = 1000;
  opt.seed = 7;
  auto xs = synthesize(g, opt);
  int multi = 0, courtesy = 0, compound = 0;
  for (const auto& ex : xs) {
    if (ex.triples.size() > 1) ++multi;
    bool has_thanks = false, has_deny = false;
    for (const auto& t : ex.triples) {
      if (t.act == "thankyou") has_thanks = true;
      if (t.act == "deny" && ex.triples.size() == 2) has_deny = true;
    }
    if (has_thanks && ex.triples.size() == 2) ++courtesy;
    if (has_deny && !has_thanks) ++compound;
  }
  CHECK(multi > 250);
  CHECK(courtesy > 100);
  CHECK(compound > 50);
}

TEST_CASE("training draws stay inside the in-vocabulary partition") {
  SyntheticGrammarSpec g = default_grammar();
  std::set<std::string> oov = oov_words(g);
  SynthOptions opt;
  opt.n = 800;
  opt.seed = 5;
  opt.use_oov_values = false;
  for (const auto& ex : synthesize(g, opt))
    for (const auto& w : ex.tokens) CHECK(oov.count(w) == 0);
}

TEST_CASE("evaluation draws use the oov partition") {
  SyntheticGrammarSpec g = default_grammar();
  std::set<std::string> oov = oov_words(g);
  SynthOptions opt;
  opt.n = 800;
  opt.seed = 5;
  opt.use_oov_values = true;
  int hits = 0;
  for (const auto& ex : synthesize(g, opt))
    for (const auto& t : ex.triples)
      if (t.value && oov.count(t.value_string())) ++hits;
  CHECK(hits > 50);
}

TEST_CASE("holdout pairs are absent unless forced") {
  SyntheticGrammarSpec g = default_grammar();
  SynthOptions opt;
  opt.n = 600;
  opt.seed = 9;
  opt.holdout_pairs = {{"confirm", "area"}, {"deny", "pricerange"}};

  auto train = synthesize(g, opt);
  for (const auto& ex : train)
    for (const auto& t : ex.triples)
      if (t.slot) CHECK(opt.holdout_pairs.count({t.act, *t.slot}) == 0);

  opt.force_holdout = true;
  auto test = synthesize(g, opt);
  int confirm_area = 0, deny_price = 0;
  for (const auto& ex : test)
    for (const auto& t : ex.triples) {
      if (t.act == "confirm" && t.slot == "area") ++confirm_area;
      if (t.act == "deny" && t.slot == "pricerange") ++deny_price;
    }
  CHECK(confirm_area > 20);
  CHECK(deny_price > 20);
}

TEST_CASE("grammar json round trip") {
  SyntheticGrammarSpec g = default_grammar();
  std::string js = grammar_to_json(g);
  SyntheticGrammarSpec back = parse_grammar(js);
  CHECK(back.ontology == g.ontology);
  CHECK(back.patterns == g.patterns);
  CHECK(back.compound_patterns == g.compound_patterns);
  CHECK(back.lexicon.size() == g.lexicon.size());
  for (const auto& [slot, lex] : g.lexicon) {
    CHECK(back.lexicon.at(slot).train_values == lex.train_values);
    CHECK(back.lexicon.at(slot).oov_values == lex.oov_values);
  }
  CHECK(back.mix.single == g.mix.single);
  CHECK(back.mix.oov_value_rate == g.mix.oov_value_rate);

  // generation agrees after the round trip
  SynthOptions opt;
  opt.n = 50;
  opt.seed = 3;
  auto a = synthesize(g, opt);
  auto b = synthesize(back, opt);
  for (size_t i = 0; i < a.size(); ++i) CHECK(a[i].tokens == b[i].tokens);
}

TEST_CASE("grammar validation rejects broken specs") {
  SyntheticGrammarSpec g = default_grammar();
  SUBCASE("value pattern without placeholder") {
    g.patterns["inform|food"] = {"i want food"};
    CHECK_THROWS_AS(g.validate(), std::runtime_error);
  }
  SUBCASE("pattern for illegal pair") {
    g.patterns["thankyou|food"] = {"thanks {v}"};
    CHECK_THROWS_AS(g.validate(), std::runtime_error);
  }
  SUBCASE("mix that does not sum to one") {
    g.mix.single = 0.9;
    CHECK_THROWS_AS(g.validate(), std::runtime_error);
  }
  SUBCASE("duplicate value inside a slot") {
    g.lexicon["food"].oov_values.push_back("thai");
    CHECK_THROWS_AS(g.validate(), std::runtime_error);
  }
  SUBCASE("multi-token value") {
    g.lexicon["food"].train_values.push_back("modern european");
    CHECK_THROWS_AS(g.validate(), std::runtime_error);
  }
}

TEST_CASE("ValueLexicon round trips through corpus files") {
  SyntheticGrammarSpec g = default_grammar();
  SynthOptions opt;
  opt.n = 40;
  opt.seed = 11;
  auto xs = synthesize(g, opt);
  std::string path = "/tmp/synth_corpus_probe.jsonl";
  write_corpus(path, xs, {"probe"});
  auto back = load_corpus(path, g.ontology);
  REQUIRE(back.size() == xs.size());
  for (size_t i = 0; i < xs.size(); ++i) {
    CHECK(back[i].tokens == xs[i].tokens);
    CHECK(back[i].triples == xs[i].triples);
  }
  std::remove(path.c_str());
}
