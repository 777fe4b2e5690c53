#include "evoset/identities.hpp"

#include <algorithm>
#include <cmath>

#include "evoset/embedding.hpp"
#include "evoset/error.hpp"
#include "evoset/exact_chain.hpp"
#include "evoset/monotonicity.hpp"

namespace evoset {

namespace {

template <class Real>
Real abs_of(const Real& x) {
  return x < 0 ? Real(-x) : x;
}

template <class Real>
Real pi_at(const DynEnv& env, Time t, Vertex x) {
  Real s(0);
  for (const auto& inc : env.incident(x)) s += ScalarTraits<Real>::from_double(env.weight(inc.edge, static_cast<double>(t)));
  return s;
}

}  // namespace

template <class Real>
Real duality_gap(const DynEnv& env, Time t_max) {
  env.check_time(t_max);
  const std::size_t n = env.num_vertices();
  Real worst(0);
  auto kernel = multi_step_kernel<Real>(env, 0, 0);
  for (Time t = 0; t <= t_max; ++t) {
    if (t > 0) advance(kernel, env);
    for (Vertex x = 0; x < n; ++x) {
      if (!env.in_support(0, x)) continue;
      const auto sets = exact_set_distribution<Real>(env, x, t);
      const Real pi0 = pi_at<Real>(env, 0, x);
      for (Vertex y = 0; y < n; ++y) {
        const Real dual = pi_at<Real>(env, t, y) / pi0 * sets.membership(y);
        const Real gap = abs_of<Real>(kernel(x, y) - dual);
        if (gap > worst) worst = gap;
      }
    }
  }
  return worst;
}

template double duality_gap<double>(const DynEnv&, Time);
template Rational duality_gap<Rational>(const DynEnv&, Time);

double row_sum_gap(const DynEnv& env) {
  double worst = 0.0;
  for (Time t = 0; t < env.horizon(); ++t) {
    const auto step = one_step_kernel<double>(env, t);
    for (Vertex x = 0; x < env.num_vertices(); ++x) {
      if (!step.in_support[x]) continue;
      double sum = 0.0;
      for (std::size_t k = step.offset[x]; k < step.offset[x + 1]; ++k) sum += step.prob[k];
      worst = std::max(worst, std::fabs(sum - 1.0));
    }
  }
  return worst;
}

double reversibility_gap(const DynEnv& env) {
  double worst = 0.0;
  const std::size_t n = env.num_vertices();
  for (Time t = 0; t < env.horizon(); ++t) {
    for (Vertex x = 0; x < n; ++x) {
      if (!env.in_support(t, x)) continue;
      for (const auto& inc : env.incident(x)) {
        const Vertex y = inc.neighbor;
        if (!env.in_support(t, y)) continue;
        const double lhs = env.vertex_conductance(t, x) * env.transition_prob(t, x, y);
        const double rhs = env.vertex_conductance(t, y) * env.transition_prob(t, y, x);
        worst = std::max(worst, std::fabs(lhs - rhs));
      }
    }
  }
  return worst;
}

double compensated_drop(const DynEnv& env) {
  const auto report = monotonicity_report(env);
  double worst = 0.0;
  for (Time t = 0; t < env.horizon(); ++t) {
    for (Vertex x = 0; x < env.num_vertices(); ++x) {
      const double before = report.beta[t] * env.vertex_conductance(t, x);
      const double after = report.beta[t + 1] * env.vertex_conductance(t + 1, x);
      if (before > 0.0) worst = std::max(worst, (before - after) / before);
    }
  }
  return worst;
}

std::vector<SetState<double>> reachable_states(const DynEnv& env) {
  std::vector<SetState<double>> out;
  for (Time t = 0; t < env.horizon(); ++t) {
    std::vector<Mask> seen;
    for (Vertex x = 0; x < env.num_vertices(); ++x) {
      if (!env.in_support(0, x)) continue;
      for (const auto& [mask, p] : exact_set_distribution<double>(env, x, t).support) {
        if (mask != 0 && p > 0.0) seen.push_back(mask);
      }
    }
    std::sort(seen.begin(), seen.end());
    seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
    for (Mask m : seen) out.push_back(make_state<double>(env, t, m));
  }
  return out;
}

DriftSweep drift_sweep(const DynEnv& env, std::span<const double> alphas, double gamma, bool keep_rows) {
  DriftSweep sweep;
  for (const auto& state : reachable_states(env)) {
    for (double alpha : alphas) {
      const DriftResult r = drift_check(env, state, alpha, gamma);
      ++sweep.checked;
      const double slack = alpha < 1.0 ? r.rhs - r.lhs : r.lhs - r.rhs;
      sweep.worst_margin = sweep.checked == 1 ? slack : std::min(sweep.worst_margin, slack);
      if (!r.pass) ++sweep.failures;
      if (keep_rows) sweep.rows.push_back({state.t, to_mask(state.members), state.mass, alpha, r});
    }
  }
  return sweep;
}

double embedding_start_gap(const DynEnv& env) {
  double worst = 0.0;
  for (const auto& state : reachable_states(env)) {
    const auto law = successor_law(env, state);
    worst = std::max(worst, std::fabs(m_interpolate(law, 0.0, 0.0) - state.mass));
  }
  return worst;
}

ComplementCheck complement_sweep(const DynEnv& env, std::size_t count, Rng& rng) {
  const std::size_t n = env.num_vertices();
  if (n < 2) fail(ErrorCode::kInvalidArgument, "complement check needs at least two vertices");
  if (env.horizon() < 1) fail(ErrorCode::kInvalidArgument, "complement check needs horizon >= 1");
  ComplementCheck total{true, 0.0};
  const Mask full = (Mask{1} << n) - 1;
  std::uniform_int_distribution<Mask> pick_set(1, full - 1);
  std::uniform_int_distribution<Time> pick_time(0, env.horizon() - 1);
  for (std::size_t i = 0; i < count; ++i) {
    const auto c = complement_dual_check<double>(env, pick_time(rng), pick_set(rng));
    total.pass = total.pass && c.pass;
    total.max_deviation = std::max(total.max_deviation, c.max_deviation);
  }
  return total;
}

}  // namespace evoset
