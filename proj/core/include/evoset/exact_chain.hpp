#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "evoset/dyn_env.hpp"
#include "evoset/types.hpp"

namespace evoset {

class IsoperimetricProfile;

/// Dense kernels refuse graphs larger than this.
inline constexpr std::size_t kMaxKernelVertices = 2000;

/// P(s, x; t, y) for all vertex pairs. Rows of x outside V_s are zero.
template <class Real>
class KernelSlice {
 public:
  KernelSlice(Time s, Time t, std::size_t n) : s_(s), t_(t), n_(n), probs_(n * n, Real(0)) {}

  Time s() const { return s_; }
  Time t() const { return t_; }
  std::size_t size() const { return n_; }

  const Real& operator()(Vertex x, Vertex y) const { return probs_[x * n_ + y]; }
  Real& operator()(Vertex x, Vertex y) { return probs_[x * n_ + y]; }
  std::span<const Real> row(Vertex x) const { return {probs_.data() + x * n_, n_}; }
  std::span<Real> row(Vertex x) { return {probs_.data() + x * n_, n_}; }

  void set_t(Time t) { t_ = t; }
  std::vector<Real>& data() { return probs_; }
  const std::vector<Real>& data() const { return probs_; }

 private:
  Time s_;
  Time t_;
  std::size_t n_;
  std::vector<Real> probs_;
};

/// Sparse one-step kernel P(t, x; t+1, .) for x in V_t; rows of vertices
/// outside V_t are empty.
template <class Real>
struct StepKernel {
  std::vector<std::size_t> offset;
  std::vector<Vertex> target;
  std::vector<Real> prob;
  std::vector<bool> in_support;
};

template <class Real>
StepKernel<Real> one_step_kernel(const DynEnv& env, Time t);

/// P(s, .; t, .) by forward Chapman-Kolmogorov composition.
template <class Real>
KernelSlice<Real> multi_step_kernel(const DynEnv& env, Time s, Time t);

/// Moves `slice` from P(s, .; t, .) to P(s, .; t+1, .). Throws kInvalidState
/// if mass sits on a vertex outside V_t.
template <class Real>
void advance(KernelSlice<Real>& slice, const DynEnv& env);

/// h(s, x; t, y) = P(s, x; t, y) / pi^(t)(y).
double heat_kernel(const DynEnv& env, Time s, Vertex x, Time t, Vertex y);
double heat_kernel(const DynEnv& env, const KernelSlice<double>& slice, Vertex x, Vertex y);

struct EnvelopePoint {
  Time t = 0;
  double psi_gap = 0.0;         // psi_d(t) - psi_d(s)
  double sup_scaled = 0.0;      // sup_{x,y} pi^(s)(x) h(s, x; t, y)
  double value = 0.0;           // sup_scaled * (e + psi_gap)^{d/2}
  double running_max = 0.0;
};

/// Envelope of the normalized heat kernel against (e + psi_d(t) - psi_d(s))^{-d/2}
/// for t = s+1 .. t_end. On a wired lattice box the exterior vertex is left
/// out of the sup. Requires an effectively non-decreasing environment.
std::vector<EnvelopePoint> decay_envelope(const DynEnv& env, Time s, Time t_end,
                                          IsoperimetricProfile& profile);

/// CSV rows "s,t,x,y,prob" for the nonzero entries (vertex labels).
void write_kernel_csv(std::ostream& out, const DynEnv& env, const KernelSlice<double>& slice,
                      bool header = true);

/// Binary kernel files keyed by environment digest and (s, t).
class KernelCache {
 public:
  explicit KernelCache(std::filesystem::path dir);

  std::filesystem::path path_for(const std::string& digest, Time s, Time t) const;
  std::optional<KernelSlice<double>> load(const DynEnv& env, Time s, Time t) const;
  void store(const DynEnv& env, const KernelSlice<double>& slice) const;

 private:
  std::filesystem::path dir_;
};

}  // namespace evoset
