#pragma once

#include <cstdint>
#include <random>

namespace mfrl {

/// Named RNG sub-streams. Every source of randomness in a training run draws
/// from a stream derived from (master seed, stream tag), so runs are
/// reproducible and independent concerns never share a generator.
enum class RngStream : std::uint64_t {
  SeedDesigns = 1,   // initial design vector of each episode
  ModelChoice = 2,   // categorical fidelity selection
  ActionNoise = 3,   // Gaussian policy sampling
  PpoShuffle = 4,    // minibatch shuffling inside updates
  AgentInit = 5,     // network weight initialization
  SurrogateFit = 6,  // regional surrogate sampling/training
};

// splitmix64; decorrelates consecutive master seeds and stream tags.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t master, RngStream stream,
                                    std::uint64_t lane = 0) noexcept {
  return mix64(mix64(master) ^ mix64(static_cast<std::uint64_t>(stream) ^ (lane << 32)));
}

inline std::mt19937_64 make_rng(std::uint64_t master, RngStream stream,
                                std::uint64_t lane = 0) {
  return std::mt19937_64(derive_seed(master, stream, lane));
}

}  // namespace mfrl
