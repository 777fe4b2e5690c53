#include "evoset/evolving_set.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>

#include "evoset/error.hpp"
#include "evoset/monotonicity.hpp"

namespace evoset {

template <class Real>
SetState<Real> make_state(const DynEnv& env, Time t, VertexSet members) {
  env.check_time(t);
  if (!std::is_sorted(members.begin(), members.end()) ||
      std::adjacent_find(members.begin(), members.end()) != members.end()) {
    fail(ErrorCode::kInvalidArgument, "set members must be sorted and unique");
  }
  SetState<Real> state;
  state.t = t;
  const double time = static_cast<double>(t);
  for (Vertex x : members) {
    env.check_vertex(x);
    Real pi_x(0);
    for (const auto& inc : env.incident(x)) pi_x += ScalarTraits<Real>::from_double(env.weight(inc.edge, time));
    if (!(pi_x > 0)) {
      fail(ErrorCode::kInvalidState, "member " + env.label(x) + " not in V_" + std::to_string(t));
    }
    state.mass += pi_x;
  }
  state.members = std::move(members);
  return state;
}

template <class Real>
VertexSet SuccessorLaw<Real>::members(const Outcome<Real>& o) const {
  VertexSet out;
  out.reserve(o.size);
  for (std::size_t i = 0; i < o.size; ++i) out.push_back(candidates[i].v);
  std::sort(out.begin(), out.end());
  return out;
}

template <class Real>
Mask SuccessorLaw<Real>::mask(const Outcome<Real>& o) const {
  Mask m = 0;
  for (std::size_t i = 0; i < o.size; ++i) m |= Mask{1} << candidates[i].v;
  return m;
}

template <class Real>
Real SuccessorLaw<Real>::total_probability() const {
  Real total(0);
  for (const auto& o : outcomes) total += o.prob;
  return total;
}

template <class Real>
Real SuccessorLaw<Real>::expected_mass() const {
  Real total(0);
  for (const auto& o : outcomes) total += o.prob * prefix_mass[o.size];
  return total;
}

namespace {

std::atomic<std::uint64_t> g_laws{0};
std::atomic<double> g_max_gap{0.0};

template <class Real>
void audit(const SuccessorLaw<Real>& law) {
  Real gap = law.expected_mass() - law.source_mass;
  if (gap < 0) gap = -gap;
  const double g = ScalarTraits<Real>::to_double(gap);
  g_laws.fetch_add(1, std::memory_order_relaxed);
  double seen = g_max_gap.load(std::memory_order_relaxed);
  while (g > seen && !g_max_gap.compare_exchange_weak(seen, g, std::memory_order_relaxed)) {
  }
}

}  // namespace

LawAudit law_audit() { return {g_laws.load(), g_max_gap.load()}; }

void reset_law_audit() {
  g_laws = 0;
  g_max_gap = 0.0;
}

template <class Real>
SuccessorLaw<Real> successor_law(const DynEnv& env, const SetState<Real>& state) {
  using Traits = ScalarTraits<Real>;
  const Time t = state.t;
  env.check_time(t);
  env.check_time(t + 1);
  SuccessorLaw<Real> law;
  law.t = t;
  law.source_mass = state.mass;
  law.prefix_mass.push_back(Real(0));
  if (state.empty()) {
    law.outcomes.push_back({Real(1), 0});
    return law;
  }

  // pi^(t)(S, y) for every y reachable from S, by sort-and-merge.
  const double now = static_cast<double>(t);
  const double next = static_cast<double>(t + 1);
  std::vector<std::pair<Vertex, double>> contrib;
  for (Vertex x : state.members) {
    for (const auto& inc : env.incident(x)) {
      const double w = env.weight(inc.edge, now);
      if (w > 0.0) contrib.emplace_back(inc.neighbor, w);
    }
  }
  std::sort(contrib.begin(), contrib.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  const Real one(1);
  const Real slack = Traits::tolerance();
  for (std::size_t i = 0; i < contrib.size();) {
    const Vertex y = contrib[i].first;
    Real flow(0);
    for (; i < contrib.size() && contrib[i].first == y; ++i) flow += Traits::from_double(contrib[i].second);
    Real pi_next(0);
    for (const auto& inc : env.incident(y)) pi_next += Traits::from_double(env.weight(inc.edge, next));
    if (!(pi_next > 0)) {
      fail(ErrorCode::kNonMonotone, "non-monotone vertex conductance at " + env.label(y) +
                                        ": reachable but outside V_" + std::to_string(t + 1));
    }
    Real q = flow / pi_next;
    if (q > one + slack) {
      fail(ErrorCode::kNonMonotone, "non-monotone vertex conductance at " + env.label(y) + " (q = " +
                                        std::to_string(Traits::to_double(q)) + ")");
    }
    if (q > one) q = one;
    law.candidates.push_back({y, std::move(q), std::move(pi_next)});
  }
  std::stable_sort(law.candidates.begin(), law.candidates.end(),
                   [](const Candidate<Real>& a, const Candidate<Real>& b) { return a.q > b.q; });
  for (const auto& c : law.candidates) law.prefix_mass.push_back(law.prefix_mass.back() + c.pi_next);

  // Distinct thresholds ascending; outcome k keeps every candidate with
  // q >= q_(k) and has probability q_(k) - q_(k-1).
  for (auto it = law.candidates.rbegin(); it != law.candidates.rend(); ++it) {
    if (law.thresholds.empty() || it->q != law.thresholds.back()) law.thresholds.push_back(it->q);
  }
  Real previous(0);
  std::size_t end = law.candidates.size();
  for (const Real& threshold : law.thresholds) {
    law.outcomes.push_back({threshold - previous, end});
    while (end > 0 && law.candidates[end - 1].q == threshold) --end;
    previous = threshold;
  }
  if (previous < one) law.outcomes.push_back({one - previous, 0});
  audit(law);
  return law;
}

std::size_t successor_size(const SuccessorLaw<double>& law, double u) {
  if (law.size_biased) fail(ErrorCode::kInvalidArgument, "sample_step on a size-biased law");
  auto it = std::partition_point(law.candidates.begin(), law.candidates.end(),
                                 [u](const Candidate<double>& c) { return c.q >= u; });
  return static_cast<std::size_t>(it - law.candidates.begin());
}

VertexSet sample_step(const SuccessorLaw<double>& law, double u) {
  return law.members({0.0, successor_size(law, u)});
}

const Outcome<double>& sample_outcome(const SuccessorLaw<double>& law, double u) {
  double cumulative = 0.0;
  for (const auto& o : law.outcomes) {
    cumulative += o.prob;
    if (u <= cumulative) return o;
  }
  return law.outcomes.back();
}

template <class Real>
SuccessorLaw<Real> conditioned_kernel(const DynEnv& env, const SetState<Real>& state) {
  if (state.empty() || !(state.mass > 0)) {
    fail(ErrorCode::kEmptyState, "conditioned kernel from the empty set");
  }
  SuccessorLaw<Real> law = successor_law(env, state);
  std::vector<Outcome<Real>> weighted;
  for (const auto& o : law.outcomes) {
    if (o.size == 0) continue;
    weighted.push_back({o.prob * law.prefix_mass[o.size] / state.mass, o.size});
  }
  law.outcomes = std::move(weighted);
  law.size_biased = true;
  return law;
}

template <class Real>
Real SetDistribution<Real>::total() const {
  Real sum(0);
  for (const auto& [m, p] : support) sum += p;
  return sum;
}

template <class Real>
Real SetDistribution<Real>::membership(Vertex y) const {
  Real sum(0);
  for (const auto& [m, p] : support) {
    if (m >> y & 1U) sum += p;
  }
  return sum;
}

namespace {

void check_dp_cap(const DynEnv& env, std::size_t cap, const char* what) {
  if (env.num_vertices() > cap) {
    fail(ErrorCode::kCapExceeded, std::string(what) + " over " + std::to_string(env.num_vertices()) +
                                      " vertices (cap " + std::to_string(cap) + ")");
  }
}

template <class Real, bool kConditioned>
SetDistribution<Real> push_forward(const DynEnv& env, Vertex start, Time t) {
  check_dp_cap(env, kMaxSetDpVertices, "set distribution");
  env.check_vertex(start);
  env.check_time(t);
  SetDistribution<Real> dist;
  dist.t = 0;
  dist.support[to_mask({start})] = Real(1);
  make_state<Real>(env, 0, VertexSet{start});
  for (Time u = 0; u < t; ++u) {
    std::map<Mask, Real> next;
    for (const auto& [m, p] : dist.support) {
      const auto state = make_state<Real>(env, u, m);
      const auto law = kConditioned ? conditioned_kernel(env, state) : successor_law(env, state);
      for (const auto& o : law.outcomes) next[law.mask(o)] += p * o.prob;
    }
    dist.support = std::move(next);
    dist.t = u + 1;
  }
  return dist;
}

}  // namespace

template <class Real>
SetDistribution<Real> exact_set_distribution(const DynEnv& env, Vertex start, Time t) {
  return push_forward<Real, false>(env, start, t);
}

template <class Real>
SetDistribution<Real> conditioned_set_distribution(const DynEnv& env, Vertex start, Time t) {
  return push_forward<Real, true>(env, start, t);
}

template <class Real>
std::map<Mask, Real> successor_distribution(const DynEnv& env, Time t, Mask members) {
  const auto law = successor_law(env, make_state<Real>(env, t, members));
  std::map<Mask, Real> out;
  for (const auto& o : law.outcomes) out[law.mask(o)] += o.prob;
  return out;
}

template <class Real>
ComplementCheck complement_dual_check(const DynEnv& env, Time t, Mask a) {
  check_dp_cap(env, 63, "complement check");
  if (!has_constant_vertex_conductance(env)) {
    fail(ErrorCode::kNonMonotone, "complement duality needs vertex conductances constant in time");
  }
  const Mask all = (Mask{1} << env.num_vertices()) - 1;
  const Mask support = to_mask(env.support(t));
  if (support != all) fail(ErrorCode::kInvalidState, "complement duality needs V_t = V");
  if ((a & ~all) != 0) fail(ErrorCode::kInvalidArgument, "subset outside the vertex set");

  const auto from_a = successor_distribution<Real>(env, t, a);
  const auto from_complement = successor_distribution<Real>(env, t, all & ~a);
  std::map<Mask, Real> mirrored;
  for (const auto& [b, p] : from_complement) mirrored[all & ~b] += p;

  ComplementCheck check;
  auto deviation = [&](Mask b) {
    Real lhs(0), rhs(0);
    if (auto it = from_a.find(b); it != from_a.end()) lhs = it->second;
    if (auto it = mirrored.find(b); it != mirrored.end()) rhs = it->second;
    Real diff = lhs - rhs;
    if (diff < 0) diff = -diff;
    return diff;
  };
  Real worst(0);
  for (const auto& [b, p] : from_a) worst = std::max(worst, deviation(b));
  for (const auto& [b, p] : mirrored) worst = std::max(worst, deviation(b));
  check.max_deviation = ScalarTraits<Real>::to_double(worst);
  check.pass = worst <= ScalarTraits<Real>::tolerance();
  return check;
}

#define EVOSET_INSTANTIATE(Real)                                                                   \
  template SetState<Real> make_state<Real>(const DynEnv&, Time, VertexSet);                        \
  template struct SuccessorLaw<Real>;                                                              \
  template struct SetDistribution<Real>;                                                           \
  template SuccessorLaw<Real> successor_law<Real>(const DynEnv&, const SetState<Real>&);           \
  template SuccessorLaw<Real> conditioned_kernel<Real>(const DynEnv&, const SetState<Real>&);      \
  template SetDistribution<Real> exact_set_distribution<Real>(const DynEnv&, Vertex, Time);        \
  template SetDistribution<Real> conditioned_set_distribution<Real>(const DynEnv&, Vertex, Time);  \
  template std::map<Mask, Real> successor_distribution<Real>(const DynEnv&, Time, Mask);           \
  template ComplementCheck complement_dual_check<Real>(const DynEnv&, Time, Mask);

EVOSET_INSTANTIATE(double)
EVOSET_INSTANTIATE(Rational)

#undef EVOSET_INSTANTIATE

}  // namespace evoset
