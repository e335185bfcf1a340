#include "longtail/seeding.hpp"

namespace longtail {

std::uint64_t mix64(std::uint64_t x) {
  std::uint64_t z = x + 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t replication_seed(std::uint64_t base_seed, std::uint64_t n, std::uint64_t rep) {
  return mix64(mix64(mix64(base_seed) ^ n) ^ rep);
}

std::uint64_t substream(std::uint64_t seed, std::uint64_t stream) {
  if (stream == 0) return seed;
  return mix64(seed ^ mix64(stream + 0xD1B54A32D192ED03ULL));
}

}  // namespace longtail
