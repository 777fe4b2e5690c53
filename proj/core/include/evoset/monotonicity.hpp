#pragma once

#include <vector>

#include "evoset/dyn_env.hpp"

namespace evoset {

/// Compensating factors beta(0..horizon) for decreases of the vertex
/// conductances, and the flags derived from them.
struct MonotonicityReport {
  std::vector<double> beta;
  double eta_star = 1.0;  // max over u < t of beta(t) / beta(u); 1 for horizon 0
  bool is_nondecreasing = true;
  bool is_effectively_nondecreasing = true;
};

/// beta(0) = 1, beta(u+1) = beta(u) * max_{x in V_u} pi^(u)(x) / pi^(u+1)(x).
///
/// The max runs over every vertex of the finite graph, boundary vertices
/// included. Throws kVertexLeftSupport if some x in V_u has pi^(u+1)(x) = 0.
MonotonicityReport monotonicity_report(const DynEnv& env);

/// True when pi^(t)(x) is constant in t for every x over the horizon.
bool has_constant_vertex_conductance(const DynEnv& env);

}  // namespace evoset
