#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "slu/corpus.hpp"
#include "slu/graph.hpp"
#include "slu/ontology.hpp"

namespace slu {

// Single-file model archive: magic, JSON manifest (format version, dimensions,
// vocabulary and ontology hashes), the vocabulary and ontology as JSON blobs,
// then one named entry per parameter tensor with a shape header and a
// little-endian 32-bit float payload.
struct CheckpointManifest {
  int format_version = 1;
  int embedding_dim = 0;
  int hidden_size = 0;
  int decoder_hidden = 0;
  uint64_t vocab_hash = 0;
  uint64_t ontology_hash = 0;
};

void save_checkpoint(const std::string& path, const CheckpointManifest& manifest,
                     const Vocabulary& vocab, const Ontology& ontology,
                     const ParameterStore& store);

struct LoadedCheckpoint {
  CheckpointManifest manifest;
  Vocabulary vocab;
  Ontology ontology;
  std::map<std::string, Eigen::MatrixXd> tensors;
};

LoadedCheckpoint load_checkpoint(const std::string& path);

}  // namespace slu
