#include "evoset/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "evoset/error.hpp"
#include "evoset/normal.hpp"

namespace evoset {

namespace {

double clamp_open(double u) {
  constexpr double lo = std::numeric_limits<double>::denorm_min();
  const double hi = std::nextafter(1.0, 0.0);
  return std::clamp(u, lo, hi);
}

void check_s(double s) {
  if (!(s >= 0.0 && s < 1.0)) fail(ErrorCode::kInvalidArgument, "intra-step time s must lie in [0, 1)");
}

}  // namespace

std::vector<double> drive_uniforms(std::span<const double> normal_deviates) {
  std::vector<double> out;
  out.reserve(normal_deviates.size());
  for (double z : normal_deviates) out.push_back(clamp_open(normal_cdf(z)));
  return out;
}

std::vector<double> threshold_levels(const SuccessorLaw<double>& law) {
  std::vector<double> out;
  out.reserve(law.candidates.size());
  for (const auto& c : law.candidates) {
    if (c.q < 0.0 || c.q > 1.0) fail(ErrorCode::kNonMonotone, "threshold ratio outside [0, 1]");
    out.push_back(normal_quantile(c.q));
  }
  return out;
}

double m_interpolate(const SuccessorLaw<double>& law, double s, double bridge_value) {
  check_s(s);
  const double scale = std::sqrt(1.0 - s);
  const auto levels = threshold_levels(law);
  double total = 0.0;
  for (std::size_t k = 0; k < levels.size(); ++k) {
    const double h = levels[k];
    const double pi_next = law.candidates[k].pi_next;
    if (h == std::numeric_limits<double>::infinity()) {
      total += pi_next;
    } else {
      total += pi_next * normal_cdf((h - bridge_value) / scale);
    }
  }
  return total;
}

double m_interpolate(const DynEnv& env, const VertexSet& set, Time i, double s, double bridge_value) {
  check_s(s);
  if (set.empty()) return 0.0;
  return m_interpolate(successor_law(env, make_state<double>(env, i, set)), s, bridge_value);
}

double sample_bridge(double endpoint_increment, double s, Rng& rng) {
  if (!(s > 0.0 && s < 1.0)) fail(ErrorCode::kInvalidArgument, "bridge time s must lie in (0, 1)");
  return s * endpoint_increment + std::sqrt(s * (1.0 - s)) * standard_normal(rng);
}

EmbeddedPath simulate_embedded_path(const DynEnv& env, Vertex start, Time steps, std::span<const double> query_s,
                                    BridgeMode mode, Rng& rng) {
  env.check_time(steps);
  std::vector<double> qs(query_s.begin(), query_s.end());
  std::sort(qs.begin(), qs.end());
  for (double s : qs) {
    if (!(s > 0.0 && s < 1.0)) fail(ErrorCode::kInvalidArgument, "query times must lie in (0, 1)");
  }

  EmbeddedPath path;
  path.mode = mode;
  SetState<double> state = make_state<double>(env, 0, VertexSet{start});
  path.sets.push_back(state.members);
  path.masses.push_back(state.mass);

  for (Time i = 0; i < steps; ++i) {
    const double endpoint = standard_normal(rng);
    const double u = clamp_open(normal_cdf(endpoint));
    path.brownian_incs.push_back(endpoint);
    path.uniforms.push_back(u);
    path.m_samples.push_back({static_cast<double>(i), state.mass, state.members.size()});

    if (state.empty()) {
      for (double s : qs) path.m_samples.push_back({static_cast<double>(i) + s, 0.0, 0});
      state.t = i + 1;
    } else {
      const auto law = successor_law(env, state);
      double prev_s = 0.0;
      double prev_b = 0.0;
      for (double s : qs) {
        double b = 0.0;
        if (mode == BridgeMode::kJointPath) {
          // Sequential bridge: from (prev_s, prev_b) pinned to (1, endpoint).
          const double frac = (s - prev_s) / (1.0 - prev_s);
          const double mean = prev_b + frac * (endpoint - prev_b);
          const double var = (s - prev_s) * (1.0 - s) / (1.0 - prev_s);
          b = mean + std::sqrt(var) * standard_normal(rng);
          prev_s = s;
          prev_b = b;
        } else {
          b = sample_bridge(endpoint, s, rng);
        }
        path.m_samples.push_back({static_cast<double>(i) + s, m_interpolate(law, s, b), state.members.size()});
      }
      const std::size_t k = successor_size(law, u);
      state = SetState<double>{i + 1, law.members({0.0, k}), law.prefix_mass[k]};
    }
    path.sets.push_back(state.members);
    path.masses.push_back(state.mass);
  }
  path.m_samples.push_back({static_cast<double>(steps), state.mass, state.members.size()});
  return path;
}

EndpointCheck endpoint_consistency(const SuccessorLaw<double>& law, double endpoint, std::span<const double> s_values,
                                   double min_gap) {
  EndpointCheck check;
  const auto levels = threshold_levels(law);
  for (double h : levels) {
    if (std::isfinite(h) && std::fabs(h - endpoint) < min_gap) return check;
  }
  check.applicable = true;
  const double u = clamp_open(normal_cdf(endpoint));
  const std::size_t k = successor_size(law, u);
  const double target = law.prefix_mass[k];
  check.pass = true;
  double previous_tol = std::numeric_limits<double>::infinity();
  for (double s : s_values) {
    const double m = m_interpolate(law, s, s * endpoint);
    const double scale = std::sqrt(1.0 - s);
    const double margin = std::max(0.0, min_gap - (1.0 - s) * std::fabs(endpoint));
    double tol = 1e-12;
    for (std::size_t j = 0; j < levels.size(); ++j) {
      if (std::isfinite(levels[j])) tol += law.candidates[j].pi_next * normal_cdf(-margin / scale);
    }
    check.errors.push_back(std::fabs(m - target));
    check.tolerances.push_back(tol);
    if (check.errors.back() > tol || tol > previous_tol) check.pass = false;
    previous_tol = tol;
  }
  return check;
}

}  // namespace evoset
