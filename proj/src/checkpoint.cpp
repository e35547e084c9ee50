#include "slu/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace slu {

static_assert(std::endian::native == std::endian::little,
              "checkpoint payloads are little-endian; big-endian hosts need byte swaps");

namespace {

constexpr char kMagic[8] = {'S', 'L', 'U', 'M', 'D', 'L', '0', '1'};

void write_u32(std::ostream& out, uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

uint32_t read_u32(std::istream& in, const char* what) {
  uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  if (!in) throw std::runtime_error(std::string("checkpoint: truncated reading ") + what);
  return v;
}

std::string read_blob(std::istream& in, uint32_t len, const char* what) {
  std::string s(len, '\0');
  in.read(s.data(), len);
  if (!in) throw std::runtime_error(std::string("checkpoint: truncated reading ") + what);
  return s;
}

}  // namespace

void save_checkpoint(const std::string& path, const CheckpointManifest& manifest,
                     const Vocabulary& vocab, const Ontology& ontology,
                     const ParameterStore& store) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("checkpoint: cannot open '" + path + "' for writing");
  out.write(kMagic, sizeof(kMagic));

  nlohmann::ordered_json m;
  m["format_version"] = manifest.format_version;
  m["embedding_dim"] = manifest.embedding_dim;
  m["hidden_size"] = manifest.hidden_size;
  m["decoder_hidden"] = manifest.decoder_hidden;
  m["vocab_hash"] = manifest.vocab_hash;
  m["ontology_hash"] = manifest.ontology_hash;
  m["tensor_count"] = store.size();
  const std::string mtext = m.dump();
  write_u32(out, static_cast<uint32_t>(mtext.size()));
  out.write(mtext.data(), static_cast<std::streamsize>(mtext.size()));

  const std::string vtext = nlohmann::json(vocab.tokens()).dump();
  write_u32(out, static_cast<uint32_t>(vtext.size()));
  out.write(vtext.data(), static_cast<std::streamsize>(vtext.size()));

  const std::string otext = ontology_to_json(ontology);
  write_u32(out, static_cast<uint32_t>(otext.size()));
  out.write(otext.data(), static_cast<std::streamsize>(otext.size()));

  for (int i = 0; i < store.size(); ++i) {
    const Param& p = store.at(i);
    write_u32(out, static_cast<uint32_t>(p.name.size()));
    out.write(p.name.data(), static_cast<std::streamsize>(p.name.size()));
    write_u32(out, static_cast<uint32_t>(p.value.rows()));
    write_u32(out, static_cast<uint32_t>(p.value.cols()));
    std::vector<float> buf(static_cast<size_t>(p.value.size()));
    size_t k = 0;
    for (Eigen::Index r = 0; r < p.value.rows(); ++r)
      for (Eigen::Index c = 0; c < p.value.cols(); ++c) buf[k++] = static_cast<float>(p.value(r, c));
    out.write(reinterpret_cast<const char*>(buf.data()),
              static_cast<std::streamsize>(buf.size() * sizeof(float)));
  }
  if (!out) throw std::runtime_error("checkpoint: write failed for '" + path + "'");
}

LoadedCheckpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("checkpoint: cannot open '" + path + "'");
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw std::runtime_error("checkpoint: '" + path + "' is not a model archive");

  LoadedCheckpoint ck;
  nlohmann::json m;
  try {
    m = nlohmann::json::parse(read_blob(in, read_u32(in, "manifest length"), "manifest"));
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("checkpoint: bad manifest: " + std::string(e.what()));
  }
  ck.manifest.format_version = m.at("format_version").get<int>();
  if (ck.manifest.format_version != 1)
    throw std::runtime_error("checkpoint: unsupported format version " +
                             std::to_string(ck.manifest.format_version));
  ck.manifest.embedding_dim = m.at("embedding_dim").get<int>();
  ck.manifest.hidden_size = m.at("hidden_size").get<int>();
  ck.manifest.decoder_hidden = m.at("decoder_hidden").get<int>();
  ck.manifest.vocab_hash = m.at("vocab_hash").get<uint64_t>();
  ck.manifest.ontology_hash = m.at("ontology_hash").get<uint64_t>();
  const int tensor_count = m.at("tensor_count").get<int>();

  const std::string vtext = read_blob(in, read_u32(in, "vocab length"), "vocab");
  std::vector<std::string> tokens;
  try {
    tokens = nlohmann::json::parse(vtext).get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("checkpoint: bad vocabulary blob: " + std::string(e.what()));
  }
  ck.vocab = Vocabulary(std::move(tokens));
  if (vocab_hash(ck.vocab) != ck.manifest.vocab_hash)
    throw std::runtime_error("checkpoint: vocabulary hash mismatch (corrupt archive)");

  ck.ontology = parse_ontology(read_blob(in, read_u32(in, "ontology length"), "ontology"));
  if (ontology_hash(ck.ontology) != ck.manifest.ontology_hash)
    throw std::runtime_error("checkpoint: ontology hash mismatch (corrupt archive)");

  for (int t = 0; t < tensor_count; ++t) {
    const std::string name = read_blob(in, read_u32(in, "tensor name length"), "tensor name");
    const uint32_t rows = read_u32(in, "tensor rows");
    const uint32_t cols = read_u32(in, "tensor cols");
    std::vector<float> buf(static_cast<size_t>(rows) * cols);
    in.read(reinterpret_cast<char*>(buf.data()),
            static_cast<std::streamsize>(buf.size() * sizeof(float)));
    if (!in) throw std::runtime_error("checkpoint: truncated tensor '" + name + "'");
    Eigen::MatrixXd mvals(rows, cols);
    size_t k = 0;
    for (uint32_t r = 0; r < rows; ++r)
      for (uint32_t c = 0; c < cols; ++c) mvals(r, c) = static_cast<double>(buf[k++]);
    if (!ck.tensors.emplace(name, std::move(mvals)).second)
      throw std::runtime_error("checkpoint: duplicate tensor '" + name + "'");
  }
  return ck;
}

}  // namespace slu
