#pragma once

#include <span>
#include <vector>

#include "evoset/dyn_env.hpp"
#include "evoset/evolving_set.hpp"
#include "evoset/rng.hpp"

namespace evoset {

/// U = Phi(z) for each deviate, kept inside the open interval (0, 1).
std::vector<double> drive_uniforms(std::span<const double> normal_deviates);

/// H_i(S, y) = Phi^{-1}(q_y) for every candidate of the step from S_i.
std::vector<double> threshold_levels(const SuccessorLaw<double>& law);

/// M_{i+s} = sum_y pi^(i+1)(y) Phi((H_i(S_i, y) - b) / sqrt(1 - s)) with
/// b = B_{i+s} - B_i and s in [0, 1). H = +inf contributes pi^(i+1)(y).
double m_interpolate(const DynEnv& env, const VertexSet& set, Time i, double s, double bridge_value);
double m_interpolate(const SuccessorLaw<double>& law, double s, double bridge_value);

/// B_{i+s} - B_i given B_{i+1} - B_i = endpoint: Normal(s e, s (1 - s)).
double sample_bridge(double endpoint_increment, double s, Rng& rng);

/// How several intra-step queries in one step relate to each other.
enum class BridgeMode {
  kJointPath,    // one Brownian bridge path sampled sequentially in s
  kIndependent,  // each query an independent single-point conditional
};

struct MSample {
  double u = 0.0;  // i + s
  double m = 0.0;
  std::size_t set_size = 0;  // |S_floor(u)|
};

struct EmbeddedPath {
  std::vector<double> brownian_incs;   // B_{i+1} - B_i
  std::vector<double> uniforms;        // Phi(B_{i+1} - B_i)
  std::vector<VertexSet> sets;         // S_0 .. S_steps
  std::vector<double> masses;          // pi^(i)(S_i)
  std::vector<MSample> m_samples;
  BridgeMode mode = BridgeMode::kJointPath;
};

/// Drives the evolving set from {start} with U_{i+1} = Phi(B_{i+1} - B_i)
/// and records M at each integer time and at i + s for every s in `query_s`.
EmbeddedPath simulate_embedded_path(const DynEnv& env, Vertex start, Time steps, std::span<const double> query_s,
                                    BridgeMode mode, Rng& rng);

struct EndpointCheck {
  bool applicable = false;   // false when some threshold is within `min_gap` of the endpoint
  bool pass = false;
  std::vector<double> errors;      // |M_{i+s} - pi^(i+1)(S_{i+1})| per s
  std::vector<double> tolerances;  // analytic bound per s
};

/// As s -> 1 with the bridge pinned at its mean s e, M_{i+s} must converge
/// to pi^(i+1)(S_{i+1}) for the S_{i+1} induced by U = Phi(e). The bound at
/// each s uses only the gap between thresholds and the endpoint.
EndpointCheck endpoint_consistency(const SuccessorLaw<double>& law, double endpoint, std::span<const double> s_values,
                                   double min_gap = 0.25);

}  // namespace evoset
