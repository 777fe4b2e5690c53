#include "evoset/coupling.hpp"

#include <algorithm>

#include "evoset/error.hpp"
#include "evoset/exact_chain.hpp"

namespace evoset {

namespace {

/// Walker step at time t by inverse-CDF over the incident weights.
Vertex walk_step(const DynEnv& env, Time t, Vertex x, double u) {
  const double time = static_cast<double>(t);
  double total = 0.0;
  for (const auto& inc : env.incident(x)) total += env.weight(inc.edge, time);
  if (!(total > 0.0)) fail(ErrorCode::kInvalidState, "walker at " + env.label(x) + " outside V_t");
  const double target = u * total;
  double cumulative = 0.0;
  Vertex last = x;
  for (const auto& inc : env.incident(x)) {
    const double w = env.weight(inc.edge, time);
    if (!(w > 0.0)) continue;
    cumulative += w;
    last = inc.neighbor;
    if (target < cumulative) return inc.neighbor;
  }
  return last;
}

template <class Real>
const Candidate<Real>* find_candidate(const SuccessorLaw<Real>& law, Vertex y) {
  for (const auto& c : law.candidates) {
    if (c.v == y) return &c;
  }
  return nullptr;
}

template <class Real>
Real abs_diff(const Real& a, const Real& b) {
  Real d = a - b;
  if (d < 0) d = -d;
  return d;
}

}  // namespace

CoupledDraw df_coupled_step(const DynEnv& env, Vertex x, const SetState<double>& state, double u_walk,
                            double u_set) {
  if (!std::binary_search(state.members.begin(), state.members.end(), x)) {
    fail(ErrorCode::kInvalidState, "walker " + env.label(x) + " not in the current set");
  }
  const Vertex y = walk_step(env, state.t, x, u_walk);
  const auto law = successor_law(env, state);
  const Candidate<double>* cy = find_candidate(law, y);
  if (cy == nullptr) fail(ErrorCode::kInvalidState, "walker target is not a successor candidate");
  const double threshold = cy->q * u_set;
  CoupledDraw out{y, sample_step(law, threshold)};
  // Threshold arithmetic can round below q_y only by dropping y itself; the
  // set always contains the walker.
  if (!std::binary_search(out.set.begin(), out.set.end(), y)) {
    out.set = sample_step(law, cy->q);
  }
  return out;
}

CoupledDraw df_coupled_step(const DynEnv& env, Vertex x, const SetState<double>& state, Rng& rng) {
  const double u_walk = uniform_open(rng);
  const double u_set = uniform_open(rng);
  return df_coupled_step(env, x, state, u_walk, u_set);
}

template <class Real>
JointDistribution<Real> joint_exact_distribution(const DynEnv& env, Vertex start, Time t) {
  if (env.num_vertices() > kMaxJointDpVertices) {
    fail(ErrorCode::kCapExceeded, "joint distribution over " + std::to_string(env.num_vertices()) +
                                      " vertices (cap " + std::to_string(kMaxJointDpVertices) + ")");
  }
  env.check_vertex(start);
  env.check_time(t);
  JointDistribution<Real> dist;
  dist[{start, to_mask({start})}] = Real(1);
  make_state<Real>(env, 0, VertexSet{start});
  for (Time u = 0; u < t; ++u) {
    const auto step = one_step_kernel<Real>(env, u);
    std::map<Mask, SuccessorLaw<Real>> laws;
    JointDistribution<Real> next;
    for (const auto& [key, p] : dist) {
      const auto [x, a] = key;
      auto it = laws.find(a);
      if (it == laws.end()) it = laws.emplace(a, successor_law(env, make_state<Real>(env, u, a))).first;
      const auto& law = it->second;
      for (std::size_t i = step.offset[x]; i < step.offset[x + 1]; ++i) {
        const Vertex y = step.target[i];
        const Candidate<Real>* cy = find_candidate(law, y);
        for (const auto& o : law.outcomes) {
          // B contains y iff its threshold does not exceed q_y.
          if (o.size == 0 || law.candidates[o.size - 1].q > cy->q) continue;
          next[{y, law.mask(o)}] += p * step.prob[i] * o.prob / cy->q;
        }
      }
    }
    dist = std::move(next);
  }
  return dist;
}

template <class Real>
CouplingReport<Real> verify_coupling(const DynEnv& env, Vertex start, Time t) {
  if (env.num_vertices() > kMaxJointDpVertices) {
    fail(ErrorCode::kCapExceeded, "coupling check over " + std::to_string(env.num_vertices()) +
                                      " vertices (cap " + std::to_string(kMaxJointDpVertices) + ")");
  }
  using Traits = ScalarTraits<Real>;
  CouplingReport<Real> report;
  // trajectory (S_0..S_u) -> walker -> probability
  std::map<std::vector<Mask>, std::map<Vertex, Real>> paths;
  paths[{to_mask({start})}][start] = Real(1);

  for (Time u = 0;; ++u) {
    // Conditional law of the walker given each trajectory.
    std::vector<Real> pi_u;
    for (Vertex v = 0; v < env.num_vertices(); ++v) {
      Real p(0);
      for (const auto& inc : env.incident(v)) p += Traits::from_double(env.weight(inc.edge, static_cast<double>(u)));
      pi_u.push_back(p);
    }
    for (const auto& [path, walkers] : paths) {
      Real total(0);
      for (const auto& [w, p] : walkers) total += p;
      Real set_mass(0);
      for (Vertex v : from_mask(path.back())) set_mass += pi_u[v];
      for (Vertex w : from_mask(path.back())) {
        Real p(0);
        if (auto it = walkers.find(w); it != walkers.end()) p = it->second;
        report.conditional_gap = std::max(report.conditional_gap, abs_diff<Real>(p / total, pi_u[w] / set_mass));
      }
      for (const auto& [w, p] : walkers) {
        if (!(path.back() >> w & 1U)) report.conditional_gap = std::max(report.conditional_gap, abs_diff<Real>(p, Real(0)));
      }
    }

    // Marginals against the independent routes.
    const auto kernel = multi_step_kernel<Real>(env, 0, u);
    const auto sets = conditioned_set_distribution<Real>(env, start, u);
    std::map<Vertex, Real> x_marginal;
    std::map<Mask, Real> s_marginal;
    for (const auto& [path, walkers] : paths) {
      for (const auto& [w, p] : walkers) {
        x_marginal[w] += p;
        s_marginal[path.back()] += p;
      }
    }
    for (Vertex y = 0; y < env.num_vertices(); ++y) {
      Real p(0);
      if (auto it = x_marginal.find(y); it != x_marginal.end()) p = it->second;
      report.x_marginal_gap = std::max(report.x_marginal_gap, abs_diff<Real>(p, kernel(start, y)));
    }
    for (const auto& [m, p] : sets.support) {
      Real q(0);
      if (auto it = s_marginal.find(m); it != s_marginal.end()) q = it->second;
      report.s_marginal_gap = std::max(report.s_marginal_gap, abs_diff<Real>(p, q));
    }
    for (const auto& [m, q] : s_marginal) {
      if (!sets.support.count(m)) report.s_marginal_gap = std::max(report.s_marginal_gap, abs_diff<Real>(q, Real(0)));
    }
    report.trajectories = paths.size();
    if (u == t) break;

    const auto step = one_step_kernel<Real>(env, u);
    std::map<std::vector<Mask>, std::map<Vertex, Real>> next;
    for (const auto& [path, walkers] : paths) {
      const auto law = successor_law(env, make_state<Real>(env, u, path.back()));
      for (const auto& [x, p] : walkers) {
        for (std::size_t i = step.offset[x]; i < step.offset[x + 1]; ++i) {
          const Vertex y = step.target[i];
          const Candidate<Real>* cy = find_candidate(law, y);
          for (const auto& o : law.outcomes) {
            if (o.size == 0 || law.candidates[o.size - 1].q > cy->q) continue;
            auto extended = path;
            extended.push_back(law.mask(o));
            next[std::move(extended)][y] += p * step.prob[i] * o.prob / cy->q;
          }
        }
      }
    }
    paths = std::move(next);
  }
  return report;
}

template JointDistribution<double> joint_exact_distribution<double>(const DynEnv&, Vertex, Time);
template JointDistribution<Rational> joint_exact_distribution<Rational>(const DynEnv&, Vertex, Time);
template CouplingReport<double> verify_coupling<double>(const DynEnv&, Vertex, Time);
template CouplingReport<Rational> verify_coupling<Rational>(const DynEnv&, Vertex, Time);

std::vector<TrajectoryRow> simulate_evolving_set(const DynEnv& env, Vertex start, Time steps, Rng& rng,
                                                 bool coupled, std::size_t replica) {
  env.check_time(steps);
  std::vector<TrajectoryRow> rows;
  rows.reserve(static_cast<std::size_t>(steps) + 1);
  SetState<double> state = make_state<double>(env, 0, VertexSet{start});
  std::optional<Vertex> walker;
  if (coupled) walker = start;
  rows.push_back({replica, 0, state.members.size(), state.mass, walker});
  for (Time t = 0; t < steps; ++t) {
    if (coupled) {
      auto draw = df_coupled_step(env, *walker, state, rng);
      walker = draw.walker;
      double mass = 0.0;
      for (Vertex v : draw.set) mass += env.vertex_conductance(t + 1, v);
      state = SetState<double>{t + 1, std::move(draw.set), mass};
    } else if (!state.empty()) {
      const auto law = successor_law(env, state);
      const std::size_t k = successor_size(law, uniform_open(rng));
      state = SetState<double>{t + 1, law.members({0.0, k}), law.prefix_mass[k]};
    } else {
      state.t = t + 1;
    }
    rows.push_back({replica, t + 1, state.members.size(), state.mass, walker});
  }
  return rows;
}

}  // namespace evoset
