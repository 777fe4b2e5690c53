#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "evoset/dyn_env.hpp"
#include "evoset/rng.hpp"
#include "evoset/types.hpp"

namespace evoset {

/// Exact DP over subset states is capped at 2^14 states.
inline constexpr std::size_t kMaxSetDpVertices = 14;

template <class Real>
struct SetState {
  Time t = 0;
  VertexSet members;
  Real mass{0};  // pi^(t)(members)

  bool empty() const { return members.empty(); }
};

/// Validates members (sorted, unique, inside V_t) and caches the mass.
template <class Real>
SetState<Real> make_state(const DynEnv& env, Time t, VertexSet members);

template <class Real>
SetState<Real> make_state(const DynEnv& env, Time t, Mask members) {
  return make_state<Real>(env, t, from_mask(members));
}

/// A vertex that can join S_{t+1}: q = pi^(t)(S, v) / pi^(t+1)(v) > 0.
template <class Real>
struct Candidate {
  Vertex v;
  Real q;
  Real pi_next;  // pi^(t+1)(v)
};

/// One successor set: the first `size` candidates of the law.
template <class Real>
struct Outcome {
  Real prob;
  std::size_t size;
};

/// Exact law of S_{t+1} given S_t = S under the shared-threshold update
/// "y joins iff q_y >= U". Candidates are sorted by q descending, so every
/// successor set is a prefix of the candidate list and outcomes are nested.
template <class Real>
struct SuccessorLaw {
  Time t = 0;  // the law moves from time t to t + 1
  Real source_mass{0};
  std::vector<Candidate<Real>> candidates;
  std::vector<Real> prefix_mass;  // prefix_mass[k] = pi^(t+1)(first k candidates)
  std::vector<Real> thresholds;   // distinct q values, ascending
  /// Largest set first; the empty outcome (if any) comes last.
  std::vector<Outcome<Real>> outcomes;
  /// Set by conditioned_kernel: probabilities are size-biased and the
  /// threshold representation no longer describes the law.
  bool size_biased = false;

  VertexSet members(const Outcome<Real>& o) const;
  Mask mask(const Outcome<Real>& o) const;
  const Real& mass(const Outcome<Real>& o) const { return prefix_mass[o.size]; }
  Real total_probability() const;
  /// sum_k p_k pi^(t+1)(B_k).
  Real expected_mass() const;
};

template <class Real>
SuccessorLaw<Real> successor_law(const DynEnv& env, const SetState<Real>& state);

/// Every nonempty-source law built by successor_law in this process is
/// audited: `laws` counts them and `max_gap` is the largest
/// |sum_k p_k pi^(t+1)(B_k) - pi^(t)(S)| seen. Thread-safe.
struct LawAudit {
  std::uint64_t laws = 0;
  double max_gap = 0.0;
};
LawAudit law_audit();
void reset_law_audit();

/// {y : q_y >= u} for u in (0, 1). Only valid for unconditioned laws.
VertexSet sample_step(const SuccessorLaw<double>& law, double u);
/// Number of candidates with q >= u; sample_step returns that prefix.
std::size_t successor_size(const SuccessorLaw<double>& law, double u);

/// Draws an outcome by its listed probabilities (any law, size-biased ones
/// included).
const Outcome<double>& sample_outcome(const SuccessorLaw<double>& law, double u);

/// Size-biased kernel K^(t, A; t+1, B) = pi^(t+1)(B) / pi^(t)(A) K(t, A; t+1, B).
template <class Real>
SuccessorLaw<Real> conditioned_kernel(const DynEnv& env, const SetState<Real>& state);

template <class Real>
struct SetDistribution {
  Time t = 0;
  std::map<Mask, Real> support;

  Real total() const;
  /// P(y in S_t).
  Real membership(Vertex y) const;
};

/// Law of S_t from S_0 = {start}, pushed forward one successor law at a
/// time. Capped at kMaxSetDpVertices vertices.
template <class Real>
SetDistribution<Real> exact_set_distribution(const DynEnv& env, Vertex start, Time t);

/// Law of S_t under the size-biased kernel from S_0 = {start}.
template <class Real>
SetDistribution<Real> conditioned_set_distribution(const DynEnv& env, Vertex start, Time t);

/// One-step law from `mask` as a subset -> probability map.
template <class Real>
std::map<Mask, Real> successor_distribution(const DynEnv& env, Time t, Mask members);

struct ComplementCheck {
  bool pass = false;
  double max_deviation = 0.0;
};

/// Compares K(t, A -> B) with K(t, A^c -> B^c) over all B. Requires vertex
/// conductances constant in time (kNonMonotone otherwise).
template <class Real>
ComplementCheck complement_dual_check(const DynEnv& env, Time t, Mask a);

}  // namespace evoset
