#pragma once

#include "evoset/dyn_env.hpp"
#include "evoset/evolving_set.hpp"

namespace evoset {

struct DriftResult {
  double lhs = 0.0;  // E[Gamma^alpha | S], Gamma = pi^(t+1)(S_{t+1}) / pi^(t)(S_t)
  double rhs = 0.0;  // the bound it is compared with
  double r = 0.0;    // R_t = pi^(t)(S, S^c) / pi^(t)(S)
  bool pass = false;
};

/// Checks one step of the evolving set against the explicit drift bounds
///   alpha in (0, 1): E[Gamma^alpha] <= 1 - 2 alpha (1 - alpha) gamma^2 / (1 - gamma)^2 R^2
///   alpha > 1:       E[Gamma^alpha] >= 1 + alpha (alpha - 1) gamma^2 / (2 (1 - gamma)^2) R^2
/// with E computed exactly from the successor law. `gamma` must be a
/// laziness lower bound of env in (0, 1/2]; alpha = 1 is rejected.
DriftResult drift_check(const DynEnv& env, const SetState<double>& state, double alpha, double gamma);

}  // namespace evoset
