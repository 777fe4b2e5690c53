#include "evoset/drift.hpp"

#include <algorithm>
#include <cmath>

#include "evoset/error.hpp"

namespace evoset {

DriftResult drift_check(const DynEnv& env, const SetState<double>& state, double alpha, double gamma) {
  if (alpha == 1.0) fail(ErrorCode::kInvalidArgument, "alpha=1 vacuous");
  if (!(alpha > 0.0)) fail(ErrorCode::kInvalidArgument, "alpha must be positive");
  if (!(gamma > 0.0 && gamma <= 0.5)) fail(ErrorCode::kInvalidArgument, "gamma must lie in (0, 1/2]");
  if (state.empty() || !(state.mass > 0.0)) fail(ErrorCode::kEmptyState, "drift check from the empty set");

  const auto law = successor_law(env, state);
  DriftResult out;
  for (const auto& o : law.outcomes) {
    if (o.size == 0) continue;  // Gamma = 0 contributes 0 for alpha > 0
    out.lhs += o.prob * std::pow(law.mass(o) / state.mass, alpha);
  }

  const double time = static_cast<double>(state.t);
  double boundary = 0.0;
  for (Vertex x : state.members) {
    for (const auto& inc : env.incident(x)) {
      if (!std::binary_search(state.members.begin(), state.members.end(), inc.neighbor)) {
        boundary += env.weight(inc.edge, time);
      }
    }
  }
  out.r = boundary / state.mass;
  const double g = gamma / (1.0 - gamma);
  const double tol = ScalarTraits<double>::tolerance();
  if (alpha < 1.0) {
    out.rhs = 1.0 - 2.0 * alpha * (1.0 - alpha) * g * g * out.r * out.r;
    out.pass = out.lhs <= out.rhs + tol;
  } else {
    out.rhs = 1.0 + alpha * (alpha - 1.0) * g * g / 2.0 * out.r * out.r;
    out.pass = out.lhs >= out.rhs - tol;
  }
  return out;
}

}  // namespace evoset
