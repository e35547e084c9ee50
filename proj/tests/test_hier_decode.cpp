#include <cstdio>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "slu/hier_decode.hpp"
#include "test_support.hpp"

using namespace slu;

namespace {

// saturate the act classifier toward exactly the given acts
void force_acts(SluModel& m, const std::set<std::string>& wanted) {
  m.act_emb->value.setZero();
  for (int a = 0; a < static_cast<int>(m.ontology().acts().size()); ++a)
    m.act_br->value(a, 0) = wanted.count(m.ontology().acts()[static_cast<size_t>(a)]) ? 30.0 : -30.0;
}

void force_slots(SluModel& m, const std::set<std::string>& wanted) {
  m.slot_emb->value.setZero();
  for (int s = 0; s < static_cast<int>(m.ontology().slots().size()); ++s)
    m.slot_br->value(s, 0) = wanted.count(m.ontology().slots()[static_cast<size_t>(s)]) ? 30.0 : -30.0;
}

}  // namespace

TEST_CASE("no act above threshold parses to nothing") {
  SluModel m = slu::testing::tiny_model();
  force_acts(m, {});
  ParseResult r = parse(m, {"i", "want", "thai"});
  CHECK(r.triples.empty());
  CHECK(r.diagnostics.empty());
}

TEST_CASE("slotless act parses to a bare triple") {
  SluModel m = slu::testing::tiny_model();
  force_acts(m, {"thankyou"});
  ParseResult r = parse(m, {"thank", "you"});
  REQUIRE(r.triples.size() == 1);
  const SemanticTriple& t = *r.triples.begin();
  CHECK(t.act == "thankyou");
  CHECK_FALSE(t.slot.has_value());
  CHECK_FALSE(t.value.has_value());
  REQUIRE(r.diagnostics.size() == 1);
  CHECK(r.diagnostics[0].second.act_prob > 0.99);
  CHECK_FALSE(r.diagnostics[0].second.slot_prob.has_value());
}

TEST_CASE("valueless pair parses to an act-slot triple") {
  SluModel m = slu::testing::tiny_model();
  force_acts(m, {"request"});
  force_slots(m, {"food"});
  ParseResult r = parse(m, {"what", "food"});
  REQUIRE(r.triples.size() == 1);
  const SemanticTriple& t = *r.triples.begin();
  CHECK(t.act == "request");
  CHECK(t.slot == "food");
  CHECK_FALSE(t.value.has_value());
  REQUIRE(r.diagnostics.size() == 1);
  CHECK(r.diagnostics[0].second.slot_prob.has_value());
  CHECK(*r.diagnostics[0].second.slot_prob > 0.99);
}

TEST_CASE("selected act above threshold fans out over its legal slots only") {
  SluModel m = slu::testing::tiny_model();
  force_acts(m, {"request"});
  force_slots(m, {"food", "pricerange"});  // pricerange is not legal for request
  ParseResult r = parse(m, {"what", "food"});
  REQUIRE(r.triples.size() == 1);
  CHECK(r.triples.begin()->slot == "food");
}

TEST_CASE("value-taking pair decodes a value and keeps diagnostics") {
  SluModel m = slu::testing::tiny_model();
  force_acts(m, {"inform"});
  force_slots(m, {"food"});
  ParseResult r = parse(m, {"i", "want", "thai", "food"});
  REQUIRE(r.triples.size() == 1);
  const SemanticTriple& t = *r.triples.begin();
  CHECK(t.act == "inform");
  CHECK(t.slot == "food");
  // random decoder: the value may come out empty, but the triple is still
  // emitted with a (possibly empty) value and flagged
  REQUIRE(t.value.has_value());
  CHECK(validate_triple(t, m.ontology()));
  const TripleDiagnostics& d = r.diagnostics[0].second;
  CHECK(d.empty_value == t.value->empty());
  if (!t.value->empty()) CHECK_FALSE(d.value_logprobs.empty());
}

TEST_CASE("every emitted triple is structurally sound across random models") {
  for (uint64_t seed = 1; seed <= 20; ++seed) {
    SluModel m = slu::testing::tiny_model(6, 5, 4, seed);
    ParseResult r = parse(m, {"i", "want", "zorblat", "food", "thank", "you"});
    CHECK(r.triples.size() == r.diagnostics.size());
    for (const auto& [t, d] : r.diagnostics) {
      CHECK(d.act_prob > 0.5);
      if (t.slot.has_value()) {
        REQUIRE(d.slot_prob.has_value());
        CHECK(*d.slot_prob > 0.5);
        CHECK(m.ontology().is_legal_pair(t.act, *t.slot));
        if (m.ontology().pair_requires_value(t.act, *t.slot)) {
          REQUIRE(t.value.has_value());
          CHECK(t.value->empty() == d.empty_value);
        } else {
          CHECK_FALSE(t.value.has_value());
        }
      } else {
        CHECK_FALSE(m.ontology().act_requires_slot(t.act));
        CHECK(validate_triple(t, m.ontology()));
      }
    }
  }
}

TEST_CASE("parse batch matches elementwise parse and survives threads") {
  SluModel m = slu::testing::tiny_model();
  std::vector<Example> xs;
  for (const char* text : {"i want thai food", "thank you", "what food", "zorblat"}) {
    Example e;
    e.tokens = tokenize(text);
    xs.push_back(e);
  }
  auto serial = parse_batch(m, xs, 1);
  REQUIRE(serial.size() == xs.size());
  for (size_t i = 0; i < xs.size(); ++i)
    CHECK(serial[i].triples == parse(m, xs[i].tokens).triples);
  auto threaded = parse_batch(m, xs, 4);
  REQUIRE(threaded.size() == serial.size());
  for (size_t i = 0; i < xs.size(); ++i) CHECK(threaded[i].triples == serial[i].triples);
  CHECK(parse_batch(m, {}, 2).empty());
}

TEST_CASE("predictions file carries text, triples and diagnostics") {
  SluModel m = slu::testing::tiny_model();
  force_acts(m, {"thankyou"});
  Example e;
  e.tokens = tokenize("thank you");
  auto results = parse_batch(m, {e}, 1);
  std::string path = (std::filesystem::temp_directory_path() / "preds.jsonl").string();
  write_predictions(path, {e}, results, {"model probe"});

  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "# model probe");
  std::getline(in, line);
  CHECK(line.find("\"text\":\"thank you\"") != std::string::npos);
  CHECK(line.find("\"act\":\"thankyou\"") != std::string::npos);
  CHECK(line.find("act_prob") != std::string::npos);
  std::remove(path.c_str());
}
