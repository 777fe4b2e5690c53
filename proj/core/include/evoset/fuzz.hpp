#pragma once

#include <cstddef>

#include "evoset/dyn_env.hpp"
#include "evoset/rng.hpp"

namespace evoset {

inline constexpr std::size_t kMaxFuzzVertices = 8;
inline constexpr Time kMaxFuzzHorizon = 4;

/// Random connected graph on `n_vertices` vertices with dyadic weights and a
/// non-decreasing multiplicative schedule over `horizon` steps. Every
/// self-loop stays at least 0.34 of its vertex's off-diagonal conductance,
/// so the laziness is at least 1/4 at every time.
DynEnv random_env_fuzzer(std::size_t n_vertices, Time horizon, Rng& rng);

/// Random connected lazy graph whose vertex conductances never change: at
/// each step some edges shed weight into the self-loops of their endpoints.
/// All vertices stay in V_t.
DynEnv random_constant_pi_env(std::size_t n_vertices, Time horizon, Rng& rng);

}  // namespace evoset
