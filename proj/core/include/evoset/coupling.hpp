#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "evoset/dyn_env.hpp"
#include "evoset/evolving_set.hpp"
#include "evoset/rng.hpp"

namespace evoset {

/// Joint DP over (walker, set) is capped at |V| 2^|V| states with |V| <= 10.
inline constexpr std::size_t kMaxJointDpVertices = 10;

struct CoupledDraw {
  Vertex walker;
  VertexSet set;
};

/// One step of the walk/evolving-set coupling from (x, A): the walker moves
/// by the conductance kernel to y, then B is drawn from the successor law of
/// A conditioned on y in B, i.e. with the threshold U uniform on (0, q_y].
/// `u_walk` and `u_set` are uniforms in (0, 1).
CoupledDraw df_coupled_step(const DynEnv& env, Vertex x, const SetState<double>& state, double u_walk,
                            double u_set);
CoupledDraw df_coupled_step(const DynEnv& env, Vertex x, const SetState<double>& state, Rng& rng);

template <class Real>
using JointDistribution = std::map<std::pair<Vertex, Mask>, Real>;

/// Exact law of (X_t, S_t) under the coupling kernel from (start, {start}).
template <class Real>
JointDistribution<Real> joint_exact_distribution(const DynEnv& env, Vertex start, Time t);

/// Largest deviations found when checking the coupling's marginals and the
/// uniform-on-S_t conditional law of the walker, at every time up to t.
template <class Real>
struct CouplingReport {
  Real x_marginal_gap{0};   // vs. multi_step_kernel row of start
  Real s_marginal_gap{0};   // vs. the size-biased set chain
  Real conditional_gap{0};  // P(X_u = w | S_0..S_u) vs. pi^(u)(w) / pi^(u)(S_u)
  std::size_t trajectories = 0;
};

/// Path-space DP over (S_0, ..., S_u, X_u) for u = 0..t.
template <class Real>
CouplingReport<Real> verify_coupling(const DynEnv& env, Vertex start, Time t);

/// One row of a simulated trajectory.
struct TrajectoryRow {
  std::size_t replica = 0;
  Time t = 0;
  std::size_t size = 0;
  double mass = 0.0;
  std::optional<Vertex> walker;
};

/// Monte Carlo evolving set from {start} for `steps` steps through
/// successor_law/sample_step, the same code the exact oracle enumerates.
/// With `coupled` the pair (X_t, S_t) follows df_coupled_step instead, so
/// S_t is the size-biased chain.
std::vector<TrajectoryRow> simulate_evolving_set(const DynEnv& env, Vertex start, Time steps, Rng& rng,
                                                 bool coupled, std::size_t replica = 0);

}  // namespace evoset
