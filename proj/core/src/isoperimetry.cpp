#include "evoset/isoperimetry.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "evoset/error.hpp"

namespace evoset {

void IsoConfig::validate() const {
  if (!(d > 1.0)) fail(ErrorCode::kConfig, "iso.d must be > 1");
  if (!(lambda > 0.0 && lambda <= 0.5)) fail(ErrorCode::kConfig, "iso.lambda must lie in (0, 1/2]");
}

namespace {

KappaResult enumerate_kappa(const DynEnv& env, Time t, const IsoConfig& cfg) {
  const VertexSet support = env.support(t);
  const std::size_t k = support.size();
  if (k > kMaxEnumerationVertices) {
    fail(ErrorCode::kCapExceeded, "kappa enumeration over " + std::to_string(k) + " vertices (cap " +
                                      std::to_string(kMaxEnumerationVertices) + ")");
  }
  const double time = static_cast<double>(t);
  std::vector<int> local(env.num_vertices(), -1);
  for (std::size_t i = 0; i < k; ++i) local[support[i]] = static_cast<int>(i);

  // Per local vertex: conductance, loop weight and weighted neighbours in V_t.
  struct Nbr {
    int j;
    double w;
  };
  std::vector<double> pi(k, 0.0);
  std::vector<double> loop(k, 0.0);
  std::vector<std::vector<Nbr>> nbrs(k);
  for (std::size_t i = 0; i < k; ++i) {
    for (const auto& inc : env.incident(support[i])) {
      const double w = env.weight(inc.edge, time);
      pi[i] += w;
      if (inc.neighbor == support[i]) {
        loop[i] = w;
      } else if (w > 0.0 && local[inc.neighbor] >= 0) {
        nbrs[i].push_back({local[inc.neighbor], w});
      }
    }
  }
  long double total = 0.0L;
  for (double p : pi) total += p;
  const bool counting = cfg.volume == Volume::kVertexCount;
  const long double half = counting ? 0.5L * static_cast<long double>(k) : 0.5L * total;
  const long double half_slack = half * (1.0L + 1e-12L);
  const double exponent = (cfg.d - 1.0) / cfg.d;

  KappaResult result;
  result.value = std::numeric_limits<double>::infinity();
  result.singleton_bound = std::numeric_limits<double>::infinity();

  std::vector<char> in(k, 0);
  long double vol = 0.0L;
  long double cut = 0.0L;
  Mask gray = 0;
  const Mask full = k == 64 ? ~Mask{0} : (Mask{1} << k) - 1;
  for (Mask i = 1; i <= full && k > 0; ++i) {
    const int v = std::countr_zero(i);
    long double inside = 0.0L;
    for (const Nbr& nb : nbrs[v]) {
      if (in[nb.j]) inside += nb.w;
    }
    const long double delta = static_cast<long double>(pi[v]) - loop[v] - 2.0L * inside;
    if (in[v]) {
      in[v] = 0;
      cut -= delta;
      vol -= counting ? 1.0L : static_cast<long double>(pi[v]);
    } else {
      in[v] = 1;
      cut += delta;
      vol += counting ? 1.0L : static_cast<long double>(pi[v]);
    }
    gray ^= Mask{1} << v;
    if (gray == full) continue;  // A = V_t is not a proper subset
    if (cfg.mode == IsoMode::kHalfVolume && vol > half_slack) continue;
    ++result.subsets_scanned;
    const double ratio = static_cast<double>(std::max(cut, 0.0L)) /
                         std::pow(static_cast<double>(vol), exponent);
    if (ratio < result.value) {
      result.value = ratio;
      result.argmin = gray;
    }
    if (!counting && std::has_single_bit(gray)) {
      // The step may have removed v, so read the remaining member from the mask.
      const int only = std::countr_zero(gray);
      result.singleton_bound = std::min(result.singleton_bound, std::pow(pi[only], 1.0 / cfg.d));
    }
  }
  if (result.subsets_scanned == 0) result.value = 0.0;
  return result;
}

}  // namespace

double lattice_kappa_bound(const DynEnv& env, Time t, double d) {
  const LatticeInfo* info = env.lattice();
  if (info == nullptr) fail(ErrorCode::kNotLattice, "lattice-analytic kappa on a non-lattice environment");
  if (info->boundary != Boundary::kWired) {
    fail(ErrorCode::kNotLattice, "lattice-analytic kappa needs a wired boundary");
  }
  env.check_time(t);
  const double time = static_cast<double>(t);
  double w_min = std::numeric_limits<double>::infinity();
  double pi_max = 0.0;
  for (EdgeId e = 0; e < env.num_edges(); ++e) {
    const Edge& edge = env.edge(e);
    if (edge.is_loop()) continue;
    const double w = env.weight(e, time);
    if (info->is_lattice_vertex(edge.u) && info->is_lattice_vertex(edge.v)) {
      w_min = std::min(w_min, w);
    } else {
      // Exterior edge: bundle of one lattice edge per box face the vertex touches.
      const Vertex inner = info->is_lattice_vertex(edge.u) ? edge.u : edge.v;
      int faces = 0;
      for (std::int32_t c : info->coord(inner)) faces += (c == info->lo) + (c == info->hi);
      if (faces > 0) w_min = std::min(w_min, w / faces);
    }
  }
  for (Vertex v = 0; v < info->lattice_size(); ++v) {
    pi_max = std::max(pi_max, env.vertex_conductance_at(time, v));
  }
  if (!(w_min > 0.0) || !std::isfinite(w_min)) return 0.0;
  const double dim = static_cast<double>(info->dim);
  return w_min * 2.0 * dim * std::pow(pi_max, -(d - 1.0) / d);
}

KappaResult kappa_detail(const DynEnv& env, Time t, const IsoConfig& cfg) {
  cfg.validate();
  env.check_time(t);
  if (cfg.mode == IsoMode::kLatticeAnalytic) {
    KappaResult r;
    r.value = lattice_kappa_bound(env, t, cfg.d);
    r.singleton_bound = std::numeric_limits<double>::infinity();
    return r;
  }
  return enumerate_kappa(env, t, cfg);
}

double kappa(const DynEnv& env, Time t, const IsoConfig& cfg) { return kappa_detail(env, t, cfg).value; }

IsoperimetricProfile::IsoperimetricProfile(const DynEnv& env, IsoConfig cfg)
    : env_(&env), cfg_(cfg), kappa_by_epoch_(env.change_times().size() + 1) {
  cfg_.validate();
}

double IsoperimetricProfile::kappa(Time u) {
  env_->check_time(u);
  const auto& times = env_->change_times();
  const auto epoch = static_cast<std::size_t>(
      std::upper_bound(times.begin(), times.end(), static_cast<double>(u)) - times.begin());
  auto& slot = kappa_by_epoch_[epoch];
  if (!slot) slot = evoset::kappa(*env_, u, cfg_);
  return *slot;
}

const MonotonicityReport& IsoperimetricProfile::monotonicity() {
  if (!mono_) mono_ = monotonicity_report(*env_);
  return *mono_;
}

double IsoperimetricProfile::psi(Time t, bool with_beta) {
  env_->check_time(t);
  auto& sums = with_beta ? psi_beta_ : psi_plain_;
  while (static_cast<Time>(sums.size()) <= t) {
    const Time u = static_cast<Time>(sums.size()) - 1;
    double term = kappa(u);
    if (with_beta) term *= std::pow(monotonicity().beta[u], 1.0 / cfg_.d);
    sums.push_back(sums.back() + term * term);
  }
  return sums[t];
}

RChoice IsoperimetricProfile::r_condition(Time s, Time t) {
  if (!(s < t)) fail(ErrorCode::kInvalidArgument, "r_condition needs s < t");
  RChoice out;
  const double base = psi(s, true);
  const double span = psi(t, true) - base;
  if (!(span > 0.0)) {
    out.degenerate = true;
    out.diagnostic = "zero isoperimetric growth on [" + std::to_string(s) + ", " + std::to_string(t) + "]";
    return out;
  }
  for (Time r = s + 1; r < t; ++r) {
    const double ratio = (psi(r, true) - base) / span;
    if (ratio >= cfg_.lambda && ratio <= 1.0 - cfg_.lambda) {
      out.r = r;
      return out;
    }
  }
  out.diagnostic = "no r in (s, t) with ratio in [lambda, 1 - lambda]";
  return out;
}

double psi(const DynEnv& env, Time t, const IsoConfig& cfg, bool with_beta) {
  IsoperimetricProfile profile(env, cfg);
  return profile.psi(t, with_beta);
}

RChoice r_condition(const DynEnv& env, Time s, Time t, const IsoConfig& cfg) {
  IsoperimetricProfile profile(env, cfg);
  return profile.r_condition(s, t);
}

}  // namespace evoset
