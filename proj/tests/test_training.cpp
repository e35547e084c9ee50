#include "doctest.h"
#include "slu/hier_decode.hpp"
#include "slu/training.hpp"
#include "slu/util.hpp"
#include "test_support.hpp"

using namespace slu;

namespace {

Example make_example(const std::string& text, const std::vector<std::string>& triple_strs,
                     const Ontology& o) {
  Example e;
  e.tokens = tokenize(text);
  for (const auto& s : triple_strs) {
    // "act", "act|slot", "act|slot|value"
    auto parts = split_on(s, '|');
    SemanticTriple t;
    t.act = parts[0];
    if (parts.size() > 1) t.slot = parts[1];
    if (parts.size() > 2) t.value = tokenize(parts[2]);
    if (!validate_triple(t, o)) throw std::runtime_error("bad test triple " + s);
    e.triples.insert(t);
  }
  return e;
}

}  // namespace

TEST_CASE("training targets expand the gold annotation") {
  Ontology o = slu::testing::tiny_ontology();

  SUBCASE("slotless act sets only its indicator") {
    auto t = make_training_targets(make_example("thank you", {"thankyou"}, o), o);
    Eigen::VectorXd expect(3);
    expect << 0, 0, 1;  // ontology act order: inform, request, thankyou
    CHECK(t.act_targets == expect);
    CHECK(t.slot_tasks.empty());
    CHECK(t.value_tasks.empty());
  }

  SUBCASE("valued and bare pairs make one slot task per act and one value task per triple") {
    auto t = make_training_targets(
        make_example("i want expensive thai food",
                     {"inform|pricerange|expensive", "request|food"}, o),
        o);
    Eigen::VectorXd acts(3);
    acts << 1, 1, 0;
    CHECK(t.act_targets == acts);
    REQUIRE(t.slot_tasks.size() == 2);
    // inform's legal slots are (food, pricerange): indicator 0,1
    CHECK(t.slot_tasks[0].first == "inform");
    Eigen::VectorXd inform_slots(2);
    inform_slots << 0, 1;
    CHECK(t.slot_tasks[0].second == inform_slots);
    // request's only legal slot is food
    CHECK(t.slot_tasks[1].first == "request");
    Eigen::VectorXd request_slots(1);
    request_slots << 1;
    CHECK(t.slot_tasks[1].second == request_slots);
    REQUIRE(t.value_tasks.size() == 1);
    CHECK(std::get<0>(t.value_tasks[0]) == "inform");
    CHECK(std::get<1>(t.value_tasks[0]) == "pricerange");
    CHECK(std::get<2>(t.value_tasks[0]) == std::vector<std::string>{"expensive"});
  }

  SUBCASE("two valued triples under one act share the slot task") {
    auto t = make_training_targets(
        make_example("thai food but cheap", {"inform|food|thai", "inform|pricerange|cheap"}, o),
        o);
    REQUIRE(t.slot_tasks.size() == 1);
    Eigen::VectorXd both(2);
    both << 1, 1;
    CHECK(t.slot_tasks[0].second == both);
    CHECK(t.value_tasks.size() == 2);
  }

  SUBCASE("empty gold set still produces the act indicator") {
    auto t = make_training_targets(make_example("hello there", {}, o), o);
    CHECK(t.act_targets == Eigen::VectorXd::Zero(3));
    CHECK(t.slot_tasks.empty());
  }
}

TEST_CASE("config validation") {
  TrainConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  SUBCASE("bad dropout") {
    cfg.dropout = 1.0;
    CHECK_THROWS_AS(cfg.validate(), std::runtime_error);
  }
  SUBCASE("bad batch") {
    cfg.batch_size = 0;
    CHECK_THROWS_AS(cfg.validate(), std::runtime_error);
  }
  SUBCASE("bad lr") {
    cfg.lr = 0.0;
    CHECK_THROWS_AS(cfg.validate(), std::runtime_error);
  }
  SUBCASE("bad epochs") {
    cfg.epochs = 0;
    CHECK_THROWS_AS(cfg.validate(), std::runtime_error);
  }
}

TEST_CASE("joint training overfits a handful of utterances") {
  Ontology o = slu::testing::tiny_ontology();
  std::vector<Example> train_set = {
      make_example("i want thai food", {"inform|food|thai"}, o),
      make_example("something expensive please", {"inform|pricerange|expensive"}, o),
      make_example("what food is it", {"request|food"}, o),
      make_example("thank you", {"thankyou"}, o),
      make_example("expensive thai food please", {"inform|food|thai", "inform|pricerange|expensive"},
                   o),
  };
  Vocabulary vocab = build_vocab(train_set, 1);
  TrainConfig cfg;
  cfg.dims.embedding = 12;
  cfg.dims.hidden = 12;
  cfg.dims.decoder_hidden = 12;
  cfg.epochs = 300;
  cfg.patience = 0;  // run them all
  cfg.batch_size = 5;
  cfg.dropout = 0.0;
  cfg.seed = 5;

  auto [model, report] = train(train_set, train_set, cfg, o, vocab);
  REQUIRE_FALSE(report.epochs.empty());
  CHECK(report.best_dev_f1 == doctest::Approx(1.0));
  CHECK(report.epochs.front().total_loss > report.epochs.back().total_loss);
  // the returned model is the best snapshot: it reproduces the dev score
  auto parsed = parse_batch(model, train_set, 1);
  std::vector<TripleSet> preds, golds;
  for (size_t i = 0; i < train_set.size(); ++i) {
    preds.push_back(parsed[i].triples);
    golds.push_back(train_set[i].triples);
  }
  CHECK(score(preds, golds).f1() == doctest::Approx(1.0));
}

TEST_CASE("training is deterministic in the seed") {
  Ontology o = slu::testing::tiny_ontology();
  std::vector<Example> train_set = {
      make_example("i want thai food", {"inform|food|thai"}, o),
      make_example("thank you", {"thankyou"}, o),
  };
  Vocabulary vocab = build_vocab(train_set, 1);
  TrainConfig cfg;
  cfg.dims.embedding = 8;
  cfg.dims.hidden = 6;
  cfg.dims.decoder_hidden = 6;
  cfg.epochs = 3;
  cfg.patience = 0;
  cfg.seed = 12;

  auto [m1, r1] = train(train_set, train_set, cfg, o, vocab);
  auto [m2, r2] = train(train_set, train_set, cfg, o, vocab);
  REQUIRE(r1.epochs.size() == r2.epochs.size());
  for (size_t e = 0; e < r1.epochs.size(); ++e)
    CHECK(r1.epochs[e].total_loss == r2.epochs[e].total_loss);
  for (int i = 0; i < m1.store().size(); ++i)
    CHECK(m1.store().at(i).value == m2.store().at(i).value);

  cfg.seed = 13;
  auto [m3, r3] = train(train_set, train_set, cfg, o, vocab);
  CHECK(r3.epochs[0].total_loss != r1.epochs[0].total_loss);
}

TEST_CASE("thread count does not change the result") {
  Ontology o = slu::testing::tiny_ontology();
  std::vector<Example> train_set = {
      make_example("i want thai food", {"inform|food|thai"}, o),
      make_example("something expensive", {"inform|pricerange|expensive"}, o),
      make_example("thank you", {"thankyou"}, o),
  };
  Vocabulary vocab = build_vocab(train_set, 1);
  TrainConfig cfg;
  cfg.dims.embedding = 8;
  cfg.dims.hidden = 6;
  cfg.dims.decoder_hidden = 6;
  cfg.epochs = 2;
  cfg.patience = 0;
  cfg.dropout = 0.5;
  cfg.seed = 4;

  cfg.threads = 1;
  auto [m1, r1] = train(train_set, train_set, cfg, o, vocab);
  cfg.threads = 3;
  auto [m2, r2] = train(train_set, train_set, cfg, o, vocab);
  for (size_t e = 0; e < r1.epochs.size(); ++e)
    CHECK(r1.epochs[e].total_loss == doctest::Approx(r2.epochs[e].total_loss).epsilon(1e-12));
  for (int i = 0; i < m1.store().size(); ++i)
    CHECK((m1.store().at(i).value - m2.store().at(i).value).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("empty training set is an error") {
  Ontology o = slu::testing::tiny_ontology();
  Vocabulary vocab = slu::testing::tiny_vocab({"a"});
  TrainConfig cfg;
  CHECK_THROWS_AS(train({}, {}, cfg, o, vocab), std::runtime_error);
}

TEST_CASE("early stopping halts after patience epochs without improvement") {
  Ontology o = slu::testing::tiny_ontology();
  std::vector<Example> train_set = {make_example("thank you", {"thankyou"}, o)};
  Vocabulary vocab = build_vocab(train_set, 1);
  TrainConfig cfg;
  cfg.dims.embedding = 6;
  cfg.dims.hidden = 4;
  cfg.dims.decoder_hidden = 4;
  cfg.epochs = 60;
  cfg.patience = 2;
  cfg.seed = 2;
  auto [model, report] = train(train_set, train_set, cfg, o, vocab);
  // a single trivial example is learned almost immediately; the run must stop
  // well short of the epoch budget
  CHECK(report.epochs.size() < 60);
  CHECK(static_cast<int>(report.epochs.size()) - 1 - report.best_epoch >= 2);

  cfg.patience = 0;
  auto [m2, full] = train(train_set, train_set, cfg, o, vocab);
  CHECK(full.epochs.size() == 60);
}

TEST_CASE("train report json carries config and curve") {
  TrainConfig cfg;
  TrainReport rep;
  EpochStats e;
  e.total_loss = 1.5;
  e.dev_f1 = 0.25;
  rep.epochs.push_back(e);
  rep.best_epoch = 0;
  rep.best_dev_f1 = 0.25;
  std::string js = train_report_json(cfg, rep);
  CHECK(js.find("\"best_epoch\": 1") != std::string::npos);
  CHECK(js.find("\"dev_f1\"") != std::string::npos);
  CHECK(js.find("\"batch_size\": 20") != std::string::npos);
}

TEST_CASE("ablation covers the grid and scores each cell") {
  Ontology o = slu::testing::tiny_ontology();
  std::vector<Example> train_set;
  for (int i = 0; i < 8; ++i) {
    train_set.push_back(make_example("i want thai food", {"inform|food|thai"}, o));
    train_set.push_back(make_example("thank you", {"thankyou"}, o));
  }
  std::vector<Example> test = {make_example("thank you", {"thankyou"}, o)};
  TrainConfig cfg;
  cfg.dims.embedding = 6;
  cfg.dims.hidden = 4;
  cfg.dims.decoder_hidden = 4;
  cfg.epochs = 8;
  cfg.patience = 0;
  cfg.seed = 3;

  AblationTable t = ablation_run(train_set, {0.5, 1.0}, {1, 2}, test, test, cfg, o);
  CHECK(t.complete());
  REQUIRE(t.cells.size() == 4);
  CHECK(t.cells[0].fraction == 0.5);
  CHECK(t.cells[0].seed == 1);
  CHECK(t.cells[3].fraction == 1.0);
  for (const auto& c : t.cells) {
    CHECK(c.f1 >= 0.0);
    CHECK(c.f1 <= 1.0);
  }
  CHECK(t.mean_f1(0.5) == doctest::Approx((t.cells[0].f1 + t.cells[1].f1) / 2));

  std::string txt = ablation_table_text(t);
  CHECK(txt.find("0.50") != std::string::npos);
  std::string js = ablation_table_json(t);
  CHECK(js.find("\"fraction\"") != std::string::npos);
}
