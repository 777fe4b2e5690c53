#include "evoset/monotonicity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "evoset/error.hpp"

namespace evoset {

MonotonicityReport monotonicity_report(const DynEnv& env) {
  MonotonicityReport report;
  const Time horizon = env.horizon();
  report.beta.assign(static_cast<std::size_t>(horizon) + 1, 1.0);

  for (Time u = 0; u < horizon; ++u) {
    double factor = 1.0;
    // Between change points pi^(u) = pi^(u+1) and the factor is exactly 1.
    if (env.changes_in(static_cast<double>(u), static_cast<double>(u + 1))) {
      const auto now = env.vertex_conductances(u);
      const auto next = env.vertex_conductances(u + 1);
      factor = 0.0;
      for (Vertex x = 0; x < now.size(); ++x) {
        if (!(now[x] > 0.0)) continue;
        if (!(next[x] > 0.0)) {
          fail(ErrorCode::kVertexLeftSupport,
               "vertex " + env.label(x) + " in V_" + std::to_string(u) + " has zero conductance at " +
                   std::to_string(u + 1));
        }
        factor = std::max(factor, now[x] / next[x]);
        if (next[x] < now[x]) report.is_nondecreasing = false;
      }
    }
    report.beta[u + 1] = report.beta[u] * factor;
  }

  if (horizon > 0) {
    double running_min = report.beta[0];
    double eta = 0.0;
    for (std::size_t t = 1; t < report.beta.size(); ++t) {
      eta = std::max(eta, report.beta[t] / running_min);
      running_min = std::min(running_min, report.beta[t]);
    }
    report.eta_star = eta;
  }
  report.is_effectively_nondecreasing = std::isfinite(report.eta_star);
  return report;
}

bool has_constant_vertex_conductance(const DynEnv& env) {
  const auto base = env.vertex_conductances(0);
  for (double c : env.change_times()) {
    const auto t = static_cast<Time>(std::ceil(c));
    if (t > env.horizon()) break;
    const auto pi = env.vertex_conductances(t);
    for (std::size_t x = 0; x < pi.size(); ++x) {
      if (pi[x] != base[x]) return false;
    }
  }
  return true;
}

}  // namespace evoset
