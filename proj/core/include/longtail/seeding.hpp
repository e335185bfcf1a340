#pragma once

#include <cstdint>

namespace longtail {

/// SplitMix64 finaliser (Steele, Lea, Flood 2014):
///   z = (x + 0x9E3779B97F4A7C15);
///   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9;
///   z = (z ^ (z >> 27)) * 0x94D049BB133111EB;
///   return z ^ (z >> 31);
std::uint64_t mix64(std::uint64_t x);

/// Seed of replication `rep` at sample size `n`:
///   mix64(mix64(mix64(base_seed) ^ n) ^ rep)
std::uint64_t replication_seed(std::uint64_t base_seed, std::uint64_t n, std::uint64_t rep);

/// Independent sub-stream of a seed (stream 0 is the seed itself).
std::uint64_t substream(std::uint64_t seed, std::uint64_t stream);

}  // namespace longtail
