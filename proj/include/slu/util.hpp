#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace slu {

// FNV-1a, used for the vocabulary/ontology hashes stored in checkpoint manifests.
inline uint64_t fnv1a64(std::string_view data, uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// splitmix64, used to derive independent per-example RNG streams so that
// results do not depend on thread scheduling.
inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline uint64_t mix_seed(uint64_t seed, uint64_t a, uint64_t b) {
  return splitmix64(splitmix64(seed ^ (a * 0x9e3779b97f4a7c15ULL)) ^ b);
}

std::string lowercase(std::string_view s);

// whitespace split; no empty tokens
std::vector<std::string> split_ws(std::string_view s);

std::vector<std::string> split_on(std::string_view s, char sep);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

// Runs fn(i) for i in [0, n). With threads <= 1 this is a plain loop; otherwise
// indices are handed out to a fixed worker pool. Results must be written to
// per-index slots by the caller, which keeps the outcome independent of
// scheduling. The first worker exception is rethrown in the calling thread.
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

}  // namespace slu
