#include "slu/synth.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace slu {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

bool has_placeholder(const std::string& pattern, const std::string& ph) {
  return pattern.find(ph) != std::string::npos;
}

std::string substitute(std::string pattern, const std::string& ph, const std::string& value) {
  for (size_t pos = pattern.find(ph); pos != std::string::npos; pos = pattern.find(ph, pos)) {
    pattern.replace(pos, ph.size(), value);
    pos += value.size();
  }
  return pattern;
}

}  // namespace

void SyntheticGrammarSpec::validate() const {
  for (const auto& [key, pats] : patterns) {
    if (pats.empty()) throw std::runtime_error("grammar: no patterns under '" + key + "'");
    auto bar = key.find('|');
    std::string act = key.substr(0, bar);
    std::string slot = bar == std::string::npos ? "" : key.substr(bar + 1);
    SemanticTriple probe;
    probe.act = act;
    if (!slot.empty()) probe.slot = slot;
    bool needs_value = false;
    if (slot.empty()) {
      if (ontology.act_requires_slot(act))
        throw std::runtime_error("grammar: act '" + act + "' takes a slot, key '" + key + "' has none");
    } else {
      if (!ontology.is_legal_pair(act, slot))
        throw std::runtime_error("grammar: illegal pair in key '" + key + "'");
      needs_value = ontology.pair_requires_value(act, slot);
      if (needs_value) probe.value = std::vector<std::string>{"x"};
    }
    if (!validate_triple(probe, ontology))
      throw std::runtime_error("grammar: key '" + key + "' does not map to a legal triple shape");
    for (const auto& p : pats) {
      if (needs_value != has_placeholder(p, "{v}"))
        throw std::runtime_error("grammar: pattern '" + p + "' under '" + key +
                                 (needs_value ? "' lacks {v}" : "' must not carry {v}"));
    }
    if (needs_value) {
      auto it = lexicon.find(slot);
      if (it == lexicon.end() || it->second.train_values.empty())
        throw std::runtime_error("grammar: no lexicon for slot '" + slot + "'");
    }
  }
  for (const auto& [slot, pats] : compound_patterns) {
    if (pats.empty()) throw std::runtime_error("grammar: empty compound patterns for '" + slot + "'");
    if (!ontology.pair_requires_value("inform", slot) || !ontology.pair_requires_value("deny", slot))
      throw std::runtime_error("grammar: compound slot '" + slot + "' needs value-taking inform and deny");
    if (patterns.find("inform|" + slot) == patterns.end())
      throw std::runtime_error("grammar: compound slot '" + slot + "' lacks inform patterns");
    for (const auto& p : pats)
      if (!has_placeholder(p, "{v1}") || !has_placeholder(p, "{v2}"))
        throw std::runtime_error("grammar: compound pattern '" + p + "' needs {v1} and {v2}");
  }
  if (mix.single < 0 || mix.compound < 0 || mix.courtesy < 0)
    throw std::runtime_error("grammar: negative mix weight");
  double total = mix.single + mix.compound + mix.courtesy;
  if (std::abs(total - 1.0) > 1e-9) throw std::runtime_error("grammar: mix weights must sum to 1");
  if (mix.oov_value_rate < 0 || mix.oov_value_rate > 1 || mix.holdout_rate <= 0 || mix.holdout_rate > 1)
    throw std::runtime_error("grammar: rate outside range");
  if (mix.compound > 0 && compound_patterns.empty())
    throw std::runtime_error("grammar: compound weight positive but no compound patterns");
  if (mix.courtesy > 0) {
    if (ontology.act_requires_slot(courtesy_act) || patterns.find(courtesy_act) == patterns.end())
      throw std::runtime_error("grammar: courtesy act '" + courtesy_act + "' needs slotless patterns");
  }
  for (const auto& [slot, lex] : lexicon) {
    std::set<std::string> seen(lex.train_values.begin(), lex.train_values.end());
    if (seen.size() != lex.train_values.size())
      throw std::runtime_error("grammar: duplicate train value under slot '" + slot + "'");
    for (const auto& v : lex.oov_values)
      if (!seen.insert(v).second)
        throw std::runtime_error("grammar: value '" + v + "' duplicated within slot '" + slot + "'");
    for (const auto& v : seen)
      if (tokenize(v).size() != 1) throw std::runtime_error("grammar: value '" + v + "' is not one token");
  }
}

SyntheticGrammarSpec default_grammar() {
  SyntheticGrammarSpec g;
  g.ontology = Ontology(
      {"inform", "deny", "confirm", "request", "thankyou", "bye"},
      {"food", "area", "pricerange", "name"},
      {
          {"inform", "food", true},   {"inform", "area", true},   {"inform", "pricerange", true},
          {"inform", "name", true},   {"deny", "food", true},     {"deny", "area", true},
          {"deny", "pricerange", true}, {"deny", "name", true},   {"confirm", "food", true},
          {"confirm", "area", true},  {"confirm", "pricerange", true}, {"confirm", "name", true},
          {"request", "food", false}, {"request", "area", false}, {"request", "pricerange", false},
          {"request", "name", false},
      });

  // valued templates compose an act marker (i want / not / is it ...) with a
  // slot content phrase ({v} food / in the {v} area / {v} prices ...); each
  // marker shows up with every slot and each content phrase with every act,
  // so a pair held out of training stays decidable as a novel combination
  g.patterns["inform|food"] = {
      "i want {v} food",
      "im looking for {v} cuisine",
      "find me a {v} restaurant",
      "give me {v} dishes",
      "id like some {v} cooking",
  };
  g.patterns["inform|area"] = {
      "i want a place in the {v} area",
      "im looking for somewhere near the {v}",
      "find me something on the {v} side of town",
      "give me a place in the {v} district",
      "id like the {v} part of town",
  };
  g.patterns["inform|pricerange"] = {
      "i want {v} prices",
      "im looking for a {v} priced place",
      "find me something in the {v} price range",
      "give me {v} rates",
      "id like a {v} priced option",
  };
  g.patterns["inform|name"] = {
      "i want the place called {v}",
      "im looking for the restaurant named {v}",
      "find me the {v} venue",
      "give me the one called {v}",
      "id like the venue named {v}",
  };
  g.patterns["deny|food"] = {
      "not {v} food",
      "no {v} cuisine please",
      "i dont want {v} dishes",
      "anything but a {v} restaurant",
      "skip the {v} cooking",
  };
  g.patterns["deny|area"] = {
      "not in the {v} area",
      "no places near the {v} please",
      "i dont want the {v} side of town",
      "anything but the {v} district",
      "skip the {v} part of town",
  };
  g.patterns["deny|pricerange"] = {
      "not in the {v} price range",
      "no {v} priced options please",
      "i dont want the {v} price range",
      "anything but {v} rates",
      "skip the {v} priced option",
  };
  g.patterns["deny|name"] = {
      "not the place called {v}",
      "no not the restaurant named {v}",
      "i dont want the {v} venue",
      "anything but the one called {v}",
      "skip the venue named {v}",
  };
  // confirm carries question markers (confirm / true / check / right / so)
  // that repeat identically over every slot, so the act survives a novel
  // act-slot combination
  g.patterns["confirm|food"] = {
      "can you confirm it is {v} food",
      "is it true that they serve {v} cuisine",
      "just to check is it a {v} restaurant",
      "am i right that they make {v} dishes",
      "so is it {v} cooking",
  };
  g.patterns["confirm|area"] = {
      "can you confirm it is in the {v} area",
      "is it true that they are near the {v}",
      "just to check is it the {v} side of town",
      "am i right that it is the {v} district",
      "so is it in the {v} part of town",
  };
  g.patterns["confirm|pricerange"] = {
      "can you confirm it is {v} priced",
      "is it true that they charge {v} rates",
      "just to check is it the {v} price range",
      "am i right that the prices are {v}",
      "so are there {v} priced options",
  };
  g.patterns["confirm|name"] = {
      "can you confirm it is the place called {v}",
      "is it true that the restaurant is named {v}",
      "just to check is it the {v} venue",
      "am i right that it is the one called {v}",
      "so is the venue named {v}",
  };
  g.patterns["request|food"] = {
      "what kind of food do they serve",
      "what type of cuisine is it",
      "which food do they make",
      "tell me what they cook",
  };
  g.patterns["request|area"] = {
      "which part of town is it in",
      "where is it located",
      "what area is that",
      "tell me where it is",
  };
  g.patterns["request|pricerange"] = {
      "what is the price range",
      "how much does it cost",
      "what do they charge",
      "tell me about the prices",
  };
  g.patterns["request|name"] = {
      "what is it called",
      "whats the name of the place",
      "which restaurant is that",
      "tell me the name",
  };
  g.patterns["thankyou"] = {"thank you", "thanks a lot", "thank you very much"};
  g.patterns["bye"] = {"good bye", "bye bye", "see you later"};

  g.compound_patterns["food"] = {
      "i want {v1} food not {v2} food",
      "find {v1} cuisine but no {v2} dishes",
      "give me {v1} food and skip the {v2} stuff",
  };
  g.compound_patterns["area"] = {
      "somewhere in the {v1} area not the {v2} area",
      "i want the {v1} part of town but not the {v2} side",
      "near the {v1} please and avoid the {v2}",
  };

  g.lexicon["food"] = ValueLexicon{
      {"thai", "chinese", "indian", "italian", "french", "korean", "japanese", "mexican",
       "spanish", "greek", "turkish", "lebanese", "vietnamese", "malaysian", "singaporean",
       "polish", "german", "british", "irish", "scottish", "welsh", "dutch", "belgian", "swiss"},
      {"austrian", "cuban", "persian", "moroccan", "russian", "catalan"}};
  g.lexicon["area"] = ValueLexicon{
      {"north", "south", "east", "west", "centre", "downtown", "uptown", "riverside",
       "eastside", "westside", "northside", "southside", "midtown", "oldtown", "newtown",
       "harbour", "station", "airport", "campus", "market", "museum", "castle", "bridge", "park"},
      {"lakeside", "hillside", "seafront", "outskirts", "suburbs", "waterfront"}};
  g.lexicon["pricerange"] = ValueLexicon{
      {"cheap", "expensive", "moderate", "budget", "premium", "luxury", "affordable",
       "economical", "pricey", "modest", "reasonable", "lavish", "bargain", "costly",
       "upscale", "midrange", "highend", "lowcost", "frugal", "splurge", "discount",
       "deluxe", "standard", "basic"},
      {"thrifty", "opulent", "stingy", "extravagant", "cutrate", "posh"}};
  g.lexicon["name"] = ValueLexicon{
      {"golden", "dragon", "palace", "garden", "lotus", "pearl", "crown", "phoenix",
       "sunset", "harvest", "willow", "maple", "juniper", "saffron", "cinnamon", "clove",
       "basil", "sage", "thyme", "rosemary", "lavender", "jasmine", "orchid", "tulip"},
      {"zanzibar", "kilimanjaro", "patagonia", "yukon", "tasmania", "serengeti"}};

  g.validate();
  return g;
}

SyntheticGrammarSpec parse_grammar(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("grammar: bad json: ") + e.what());
  }
  SyntheticGrammarSpec g;
  g.ontology = parse_ontology(j.at("ontology").dump());
  for (const auto& [key, val] : j.at("patterns").items())
    g.patterns[key] = val.get<std::vector<std::string>>();
  if (j.contains("compound_patterns"))
    for (const auto& [key, val] : j.at("compound_patterns").items())
      g.compound_patterns[key] = val.get<std::vector<std::string>>();
  for (const auto& [slot, val] : j.at("lexicon").items()) {
    ValueLexicon lex;
    lex.train_values = val.at("train").get<std::vector<std::string>>();
    if (val.contains("oov")) lex.oov_values = val.at("oov").get<std::vector<std::string>>();
    g.lexicon[slot] = std::move(lex);
  }
  if (j.contains("courtesy_act")) g.courtesy_act = j.at("courtesy_act").get<std::string>();
  if (j.contains("mix")) {
    const auto& m = j.at("mix");
    if (m.contains("single")) g.mix.single = m.at("single").get<double>();
    if (m.contains("compound")) g.mix.compound = m.at("compound").get<double>();
    if (m.contains("courtesy")) g.mix.courtesy = m.at("courtesy").get<double>();
    if (m.contains("oov_value_rate")) g.mix.oov_value_rate = m.at("oov_value_rate").get<double>();
    if (m.contains("holdout_rate")) g.mix.holdout_rate = m.at("holdout_rate").get<double>();
  }
  g.validate();
  return g;
}

SyntheticGrammarSpec load_grammar(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open grammar file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_grammar(ss.str());
}

std::string grammar_to_json(const SyntheticGrammarSpec& spec) {
  ordered_json j;
  j["ontology"] = ordered_json::parse(ontology_to_json(spec.ontology));
  ordered_json pats = ordered_json::object();
  for (const auto& [key, val] : spec.patterns) pats[key] = val;
  j["patterns"] = std::move(pats);
  ordered_json comp = ordered_json::object();
  for (const auto& [key, val] : spec.compound_patterns) comp[key] = val;
  j["compound_patterns"] = std::move(comp);
  ordered_json lex = ordered_json::object();
  for (const auto& [slot, l] : spec.lexicon) {
    lex[slot] = ordered_json{{"train", l.train_values}, {"oov", l.oov_values}};
  }
  j["lexicon"] = std::move(lex);
  j["courtesy_act"] = spec.courtesy_act;
  j["mix"] = ordered_json{{"single", spec.mix.single},
                          {"compound", spec.mix.compound},
                          {"courtesy", spec.mix.courtesy},
                          {"oov_value_rate", spec.mix.oov_value_rate},
                          {"holdout_rate", spec.mix.holdout_rate}};
  return j.dump(2) + "\n";
}

void save_grammar(const SyntheticGrammarSpec& spec, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write grammar file: " + path);
  out << grammar_to_json(spec);
}

namespace {

struct Generator {
  const SyntheticGrammarSpec& spec;
  const SynthOptions& opt;
  std::mt19937_64 rng;
  std::vector<std::pair<std::string, std::string>> holdout_list;
  size_t holdout_cursor = 0;

  Generator(const SyntheticGrammarSpec& s, const SynthOptions& o)
      : spec(s), opt(o), rng(o.seed), holdout_list(o.holdout_pairs.begin(), o.holdout_pairs.end()) {}

  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

  size_t index(size_t n) { return std::uniform_int_distribution<size_t>(0, n - 1)(rng); }

  const std::string& pick(const std::vector<std::string>& items) { return items[index(items.size())]; }

  std::string draw_value(const std::string& slot) {
    const ValueLexicon& lex = spec.lexicon.at(slot);
    if (opt.use_oov_values && !lex.oov_values.empty() && uniform() < spec.mix.oov_value_rate)
      return pick(lex.oov_values);
    return pick(lex.train_values);
  }

  bool is_holdout(const std::string& act, const std::string& slot) const {
    return opt.holdout_pairs.count({act, slot}) > 0;
  }

  Example single_for_pair(const std::string& act, const std::string& slot) {
    Example ex;
    SemanticTriple t;
    t.act = act;
    std::string text;
    if (slot.empty()) {
      text = pick(spec.patterns.at(act));
    } else {
      t.slot = slot;
      const auto& pats = spec.patterns.at(act + "|" + slot);
      text = pick(pats);
      if (spec.ontology.pair_requires_value(act, slot)) {
        std::string v = draw_value(slot);
        t.value = std::vector<std::string>{v};
        text = substitute(text, "{v}", v);
      }
    }
    ex.tokens = tokenize(text);
    ex.triples.insert(std::move(t));
    return ex;
  }

  Example single() {
    const auto& acts = spec.ontology.acts();
    std::string act = acts[index(acts.size())];
    if (!spec.ontology.act_requires_slot(act)) return single_for_pair(act, "");
    const auto& slots = spec.ontology.legal_slots(act);
    return single_for_pair(act, slots[index(slots.size())]);
  }

  Example compound() {
    std::vector<std::string> slots;
    for (const auto& [slot, pats] : spec.compound_patterns) slots.push_back(slot);
    const std::string& slot = slots[index(slots.size())];
    std::string v1 = draw_value(slot);
    std::string v2 = draw_value(slot);
    while (v2 == v1) v2 = draw_value(slot);
    std::string text = pick(spec.compound_patterns.at(slot));
    text = substitute(text, "{v1}", v1);
    text = substitute(text, "{v2}", v2);
    Example ex;
    ex.tokens = tokenize(text);
    SemanticTriple keep{.act = "inform", .slot = slot, .value = std::vector<std::string>{v1}};
    SemanticTriple drop{.act = "deny", .slot = slot, .value = std::vector<std::string>{v2}};
    ex.triples.insert(std::move(keep));
    ex.triples.insert(std::move(drop));
    return ex;
  }

  Example courtesy() {
    Example ex = single();
    std::vector<std::string> tail = tokenize(pick(spec.patterns.at(spec.courtesy_act)));
    ex.tokens.insert(ex.tokens.end(), tail.begin(), tail.end());
    ex.triples.insert(SemanticTriple{.act = spec.courtesy_act});
    return ex;
  }

  bool touches_holdout(const Example& ex) const {
    for (const auto& t : ex.triples)
      if (t.slot && is_holdout(t.act, *t.slot)) return true;
    return false;
  }

  Example forced_holdout() {
    const auto& [act, slot] = holdout_list[holdout_cursor % holdout_list.size()];
    ++holdout_cursor;
    return single_for_pair(act, slot);
  }

  Example next(int position) {
    if (opt.force_holdout && !holdout_list.empty()) {
      int stride = std::max<int>(1, static_cast<int>(std::lround(1.0 / spec.mix.holdout_rate)));
      if (position % stride == 0) return forced_holdout();
    }
    for (int attempt = 0; attempt < 1000; ++attempt) {
      double r = uniform();
      Example ex;
      if (r < spec.mix.single)
        ex = single();
      else if (r < spec.mix.single + spec.mix.compound)
        ex = compound();
      else
        ex = courtesy();
      if (!opt.force_holdout && touches_holdout(ex)) continue;
      return ex;
    }
    throw std::runtime_error("synthesize: rejection sampling stalled; holdout pairs too broad");
  }
};

}  // namespace

std::vector<Example> synthesize(const SyntheticGrammarSpec& spec, const SynthOptions& opt) {
  spec.validate();
  if (opt.n < 0) throw std::runtime_error("synthesize: negative count");
  Generator gen(spec, opt);
  std::vector<Example> out;
  out.reserve(static_cast<size_t>(opt.n));
  for (int i = 0; i < opt.n; ++i) {
    Example ex = gen.next(i);
    if (ex.tokens.empty()) throw std::runtime_error("synthesize: produced empty utterance");
    for (const auto& t : ex.triples)
      if (!validate_triple(t, spec.ontology))
        throw std::runtime_error("synthesize: produced illegal triple " + t.to_string());
    out.push_back(std::move(ex));
  }
  return out;
}

}  // namespace slu
