#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace evoset {

using Rng = std::mt19937_64;

/// Mixes (master seed, stream, index) into an independent seed. Every
/// replica's stream depends only on these three numbers, never on how
/// replicas are spread over workers.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index);

inline Rng make_rng(std::uint64_t master, std::uint64_t stream, std::uint64_t index) {
  return Rng(derive_seed(master, stream, index));
}

/// Uniform deviate in the open interval (0, 1); never returns 0 or 1.
inline double uniform_open(Rng& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

inline double exponential(Rng& rng, double rate) { return -std::log(uniform_open(rng)) / rate; }

double standard_normal(Rng& rng);

}  // namespace evoset
