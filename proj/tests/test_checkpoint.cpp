#include <cstdio>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "slu/checkpoint.hpp"
#include "test_support.hpp"

using namespace slu;

namespace {

std::string temp_path(const std::string& stem) {
  return (std::filesystem::temp_directory_path() / stem).string();
}

struct Fixture {
  Ontology onto = slu::testing::tiny_ontology();
  Vocabulary vocab = slu::testing::tiny_vocab({"i", "want", "thai"});
  ParameterStore store;
  CheckpointManifest manifest;

  Fixture() {
    store.add_matrix("A", 3, 2);
    store.add_bias("b", 4);
    std::mt19937_64 rng(5);
    store.init(rng);
    store.find("b")->value << 0.25, -1.5, 3.0, 0.0;
    manifest.embedding_dim = 6;
    manifest.hidden_size = 5;
    manifest.decoder_hidden = 4;
    manifest.vocab_hash = vocab_hash(vocab);
    manifest.ontology_hash = ontology_hash(onto);
  }
};

}  // namespace

TEST_CASE("checkpoint round trip") {
  Fixture f;
  std::string path = temp_path("ckpt_rt.bin");
  save_checkpoint(path, f.manifest, f.vocab, f.onto, f.store);

  LoadedCheckpoint loaded = load_checkpoint(path);
  CHECK(loaded.manifest.format_version == 1);
  CHECK(loaded.manifest.embedding_dim == 6);
  CHECK(loaded.manifest.hidden_size == 5);
  CHECK(loaded.manifest.decoder_hidden == 4);
  CHECK(loaded.manifest.vocab_hash == f.manifest.vocab_hash);
  CHECK(loaded.manifest.ontology_hash == f.manifest.ontology_hash);
  CHECK(loaded.vocab.tokens() == f.vocab.tokens());
  CHECK(loaded.ontology == f.onto);

  REQUIRE(loaded.tensors.size() == 2);
  REQUIRE(loaded.tensors.count("A") == 1);
  REQUIRE(loaded.tensors.count("b") == 1);
  const Eigen::MatrixXd& a = loaded.tensors.at("A");
  REQUIRE(a.rows() == 3);
  REQUIRE(a.cols() == 2);
  // payload is 32-bit, so agreement only to float precision
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 2; ++c)
      CHECK(a(r, c) == doctest::Approx(f.store.find("A")->value(r, c)).epsilon(1e-7));
  CHECK(loaded.tensors.at("b")(1, 0) == doctest::Approx(-1.5));
  std::remove(path.c_str());
}

TEST_CASE("checkpoint rejects bad magic") {
  std::string path = temp_path("ckpt_magic.bin");
  std::ofstream(path, std::ios::binary) << "NOTMODEL garbage";
  CHECK_THROWS_WITH_AS(load_checkpoint(path), doctest::Contains("magic"), std::runtime_error);
  std::remove(path.c_str());
}

TEST_CASE("checkpoint rejects truncation") {
  Fixture f;
  std::string path = temp_path("ckpt_trunc.bin");
  save_checkpoint(path, f.manifest, f.vocab, f.onto, f.store);
  auto full = std::filesystem::file_size(path);
  std::filesystem::resize_file(path, full - 7);
  CHECK_THROWS_AS(load_checkpoint(path), std::runtime_error);
  std::remove(path.c_str());
}

TEST_CASE("checkpoint detects vocab hash mismatch") {
  Fixture f;
  f.manifest.vocab_hash ^= 0xdeadbeef;
  std::string path = temp_path("ckpt_hash.bin");
  save_checkpoint(path, f.manifest, f.vocab, f.onto, f.store);
  CHECK_THROWS_WITH_AS(load_checkpoint(path), doctest::Contains("corrupt"), std::runtime_error);
  std::remove(path.c_str());
}

TEST_CASE("checkpoint detects ontology hash mismatch") {
  Fixture f;
  f.manifest.ontology_hash += 1;
  std::string path = temp_path("ckpt_ohash.bin");
  save_checkpoint(path, f.manifest, f.vocab, f.onto, f.store);
  CHECK_THROWS_WITH_AS(load_checkpoint(path), doctest::Contains("corrupt"), std::runtime_error);
  std::remove(path.c_str());
}

TEST_CASE("checkpoint missing file") {
  CHECK_THROWS_AS(load_checkpoint(temp_path("ckpt_nonexistent.bin")), std::runtime_error);
}

TEST_CASE("model save and load round trip") {
  SluModel m = slu::testing::tiny_model();
  std::string path = temp_path("model_rt.bin");
  m.save(path);

  SluModel back = SluModel::load(path);
  CHECK(back.vocab().tokens() == m.vocab().tokens());
  CHECK(back.ontology() == m.ontology());
  CHECK(back.dims().embedding == m.dims().embedding);
  CHECK(back.dims().hidden == m.dims().hidden);
  CHECK(back.dims().decoder_hidden == m.dims().decoder_hidden);
  REQUIRE(back.store().size() == m.store().size());
  for (int i = 0; i < m.store().size(); ++i) {
    const Param& a = m.store().at(i);
    const Param& b = back.store().at(i);
    CHECK(a.name == b.name);
    REQUIRE(a.value.rows() == b.value.rows());
    REQUIRE(a.value.cols() == b.value.cols());
    CHECK((a.value.cast<float>() - b.value.cast<float>()).cwiseAbs().maxCoeff() == 0.0f);
  }
  std::remove(path.c_str());
}
