#include "doctest.h"
#include "slu/model.hpp"
#include "test_support.hpp"

using namespace slu;

namespace {

WordVectors make_vectors(int dim, const std::map<std::string, std::vector<double>>& entries) {
  WordVectors wv;
  wv.dim = dim;
  for (const auto& [word, vals] : entries) {
    Eigen::VectorXd v(dim);
    for (int i = 0; i < dim; ++i) v(i) = vals[static_cast<size_t>(i)];
    wv.table[word] = v;
  }
  return wv;
}

}  // namespace

TEST_CASE("model registers every component with the expected shapes") {
  SluModel m = slu::testing::tiny_model(6, 5, 4);
  const int V = m.vocab().size(), A = 3, S = 2, E = 6, H = 5, D = 4;
  CHECK(m.word_emb->value.rows() == V);
  CHECK(m.word_emb->value.cols() == E);
  CHECK(m.act_emb->value.rows() == A);
  CHECK(m.slot_emb->value.rows() == S);
  CHECK(m.enc_fwd.Wx->value.rows() == 4 * H);
  CHECK(m.enc_fwd.Wx->value.cols() == E);
  CHECK(m.enc_bwd.Wh->value.cols() == H);
  CHECK(m.act_Wu->value.rows() == E);
  CHECK(m.act_Wu->value.cols() == 2 * H);
  CHECK(m.act_br->value.rows() == A);
  CHECK(m.slot_Wu->value.cols() == 2 * H + E);
  CHECK(m.slot_br->value.rows() == S);
  CHECK(m.dec.Wx->value.rows() == 4 * D);
  CHECK(m.dec.Wx->value.cols() == E);
  CHECK(m.dec_init_W->value.rows() == D);
  CHECK(m.dec_init_W->value.cols() == 2 * H);
  CHECK(m.Ws->value.rows() == 2 * H);
  CHECK(m.Ws->value.cols() == D + 2 * E);
  CHECK(m.Wc->value.rows() == D);
  CHECK(m.Wc->value.cols() == 4 * H);
  CHECK(m.Wo->value.rows() == V);
  CHECK(m.Wo->value.cols() == D);
  CHECK(m.wp->value.rows() == 1);
  CHECK(m.wp->value.cols() == E + 4 * H);
  CHECK(m.bp->value.rows() == 1);
  CHECK(m.store().all_finite());
}

TEST_CASE("same seed gives identical initialization") {
  SluModel a = slu::testing::tiny_model(6, 5, 4, 77);
  SluModel b = slu::testing::tiny_model(6, 5, 4, 77);
  for (int i = 0; i < a.store().size(); ++i)
    CHECK(a.store().at(i).value == b.store().at(i).value);
  SluModel c = slu::testing::tiny_model(6, 5, 4, 78);
  CHECK(a.word_emb->value != c.word_emb->value);
}

TEST_CASE("classifier output matrices are the embedding tables themselves") {
  SluModel m = slu::testing::tiny_model();
  CHECK(m.store().find("act_emb") == m.act_emb);
  CHECK(m.store().find("slot_emb") == m.slot_emb);
}

TEST_CASE("word vectors override vocabulary rows verbatim") {
  Dims d;
  d.embedding = 3;
  d.hidden = 4;
  d.decoder_hidden = 4;
  SluModel m(slu::testing::tiny_ontology(), slu::testing::tiny_vocab({"thai", "want"}), d);
  WordVectors wv = make_vectors(3, {{"thai", {0.1, 0.2, 0.3}}, {"missing", {9, 9, 9}}});
  InitReport rep = m.init(3, &wv);

  int thai_id = *m.vocab().lookup("thai");
  CHECK(m.word_emb->value.row(thai_id)(0) == doctest::Approx(0.1));
  CHECK(m.word_emb->value.row(thai_id)(1) == doctest::Approx(0.2));
  CHECK(m.word_emb->value.row(thai_id)(2) == doctest::Approx(0.3));
  // "want" stays at its random init, inside the uniform bound for 3 columns
  int want_id = *m.vocab().lookup("want");
  CHECK(m.word_emb->value.row(want_id).cwiseAbs().maxCoeff() <= 1.0 / std::sqrt(3.0));
  CHECK(rep.vocab_words_found == 1);
  CHECK(rep.vocab_words_total == 2);
  CHECK(rep.vocab_coverage() == doctest::Approx(0.5));
}

TEST_CASE("label embeddings compose from component words") {
  Dims d;
  d.embedding = 2;
  d.hidden = 3;
  d.decoder_hidden = 3;
  Ontology onto({"inform", "find_hotel"}, {"pricerange"}, {{"inform", "pricerange", true}});
  SluModel m(onto, slu::testing::tiny_vocab({}), d);

  WordVectors wv = make_vectors(2, {{"inform", {1, 2}},
                                    {"find", {2, 4}},
                                    {"hotel", {4, 8}},
                                    {"price", {0.5, 1.5}},
                                    {"range", {1.5, 2.5}}});
  InitReport rep = m.init(3, &wv);

  SUBCASE("exact hit copied") {
    CHECK(m.act_emb->value.row(0)(0) == doctest::Approx(1));
    CHECK(m.act_emb->value.row(0)(1) == doctest::Approx(2));
  }
  SUBCASE("underscore name averages its parts") {
    CHECK(m.act_emb->value.row(1)(0) == doctest::Approx(3));   // mean(2, 4)
    CHECK(m.act_emb->value.row(1)(1) == doctest::Approx(6));   // mean(4, 8)
  }
  SUBCASE("concatenated name segments against the lexicon") {
    CHECK(m.slot_emb->value.row(0)(0) == doctest::Approx(1.0));  // mean(0.5, 1.5)
    CHECK(m.slot_emb->value.row(0)(1) == doctest::Approx(2.0));
  }
  CHECK(rep.labels_found == 3);
  CHECK(rep.labels_total == 3);
  CHECK(rep.labels_without_vectors.empty());
}

TEST_CASE("explicit components win over name splitting") {
  Dims d;
  d.embedding = 2;
  d.hidden = 3;
  d.decoder_hidden = 3;
  Ontology onto({"inform"}, {"pricerange"}, {{"inform", "pricerange", true}});
  SluModel m(onto, slu::testing::tiny_vocab({}), d);
  WordVectors wv = make_vectors(2, {{"price", {8, 8}}, {"range", {8, 8}}, {"cost", {2, 6}}});
  m.init(3, &wv, {{"pricerange", {"cost"}}});
  CHECK(m.slot_emb->value.row(0)(0) == doctest::Approx(2));
  CHECK(m.slot_emb->value.row(0)(1) == doctest::Approx(6));
}

TEST_CASE("labels with no usable vector are reported and keep random init") {
  Dims d;
  d.embedding = 2;
  d.hidden = 3;
  d.decoder_hidden = 3;
  Ontology onto({"xyzzy"}, {}, {});
  SluModel m(onto, slu::testing::tiny_vocab({}), d);
  WordVectors wv = make_vectors(2, {{"inform", {1, 1}}});
  InitReport rep = m.init(3, &wv);
  CHECK(rep.labels_found == 0);
  CHECK(rep.labels_total == 1);
  REQUIRE(rep.labels_without_vectors.size() == 1);
  CHECK(rep.labels_without_vectors[0] == "xyzzy");
  CHECK(m.act_emb->value.row(0).cwiseAbs().maxCoeff() <= 1.0 / std::sqrt(2.0));
}

TEST_CASE("dimension mismatch between vectors and model is an error") {
  Dims d;
  d.embedding = 4;
  d.hidden = 3;
  d.decoder_hidden = 3;
  SluModel m(slu::testing::tiny_ontology(), slu::testing::tiny_vocab({"thai"}), d);
  WordVectors wv = make_vectors(3, {{"thai", {1, 2, 3}}});
  CHECK_THROWS_WITH_AS(m.init(3, &wv), doctest::Contains("dimension"), std::runtime_error);
}

TEST_CASE("snapshot and restore round trip") {
  SluModel m = slu::testing::tiny_model();
  auto snap = m.snapshot_values();
  Eigen::MatrixXd before = m.Wo->value;
  m.Wo->value.setConstant(42.0);
  m.load_values(snap);
  CHECK(m.Wo->value == before);
}
