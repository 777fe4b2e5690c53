#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "evoset/drift.hpp"
#include "evoset/dyn_env.hpp"
#include "evoset/evolving_set.hpp"
#include "evoset/rng.hpp"

namespace evoset {

/// max over x in V_0, t <= t_max, y of
/// |P(0, x; t, y) - pi^(t)(y) / pi^(0)(x) * P(y in S_t | S_0 = {x})|,
/// with the left side from multi_step_kernel and the right side from the
/// exact set distribution.
template <class Real>
Real duality_gap(const DynEnv& env, Time t_max);

/// max over t < horizon, x in V_t of |sum_y P(t, x; t+1, y) - 1|.
double row_sum_gap(const DynEnv& env);
/// max over t, x, y of |pi^(t)(x) P(t, x; t+1, y) - pi^(t)(y) P(t, y; t+1, x)|.
double reversibility_gap(const DynEnv& env);
/// Largest relative drop of beta(t) pi^(t)(x) from t to t+1 (0 when the
/// compensated conductances never decrease).
double compensated_drop(const DynEnv& env);

/// Nonempty sets reachable at time t from some singleton {x}, x in V_0,
/// for t < horizon. Capped like the set DP.
std::vector<SetState<double>> reachable_states(const DynEnv& env);

struct DriftRow {
  Time t = 0;
  Mask set = 0;
  double mass = 0.0;
  double alpha = 0.0;
  DriftResult result;
};

struct DriftSweep {
  std::size_t checked = 0;
  std::size_t failures = 0;
  double worst_margin = 0.0;  // most negative slack; >= 0 when all pass
  std::vector<DriftRow> rows;
};

/// drift_check on every reachable state for every alpha.
DriftSweep drift_sweep(const DynEnv& env, std::span<const double> alphas, double gamma, bool keep_rows);

/// max over reachable states of |m_interpolate(s = 0, b = 0) - pi^(t)(S_t)|.
double embedding_start_gap(const DynEnv& env);

/// Complement duality on `count` random nonempty proper subsets at random
/// times; max deviation over all of them.
ComplementCheck complement_sweep(const DynEnv& env, std::size_t count, Rng& rng);

}  // namespace evoset
