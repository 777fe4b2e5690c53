#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "evoset/dyn_env.hpp"
#include "evoset/monotonicity.hpp"
#include "evoset/types.hpp"

namespace evoset {

enum class IsoMode {
  kExact,            // every nonempty proper subset of V_t
  kHalfVolume,       // subsets with at most half of the total volume
  kLatticeAnalytic,  // closed-form lower bound on a wired lattice box
};

/// How |A| is measured in the denominator.
enum class Volume {
  kConductance,  // pi^(t)(A)
  kVertexCount,  // number of vertices, the counting measure of unit-degree lattices
};

struct IsoConfig {
  double d = 2.0;
  IsoMode mode = IsoMode::kHalfVolume;
  double lambda = 1.0 / 3.0;
  Volume volume = Volume::kConductance;

  void validate() const;
};

inline constexpr std::size_t kMaxEnumerationVertices = 20;

struct KappaResult {
  double value = 0.0;
  Mask argmin = 0;  // bit i <-> i-th vertex of V_t (enumeration modes)
  /// min over admissible singletons {v} of pi^(t)(v)^{1/d}; +inf if none.
  double singleton_bound = 0.0;
  std::size_t subsets_scanned = 0;
};

/// kappa_t = inf_A pi^(t)(A, A^c) / vol(A)^{(d-1)/d}, restricted per mode.
/// Enumeration modes walk the subsets of V_t in Gray-code order with O(deg)
/// boundary updates per step.
KappaResult kappa_detail(const DynEnv& env, Time t, const IsoConfig& cfg);
double kappa(const DynEnv& env, Time t, const IsoConfig& cfg);

/// (min edge weight) * 2d * (max vertex conductance)^{-(d-1)/d}: from the
/// edge-isoperimetric inequality |dA| >= 2d |A|^{(d-1)/d} on Z^d. Needs a
/// wired lattice box.
double lattice_kappa_bound(const DynEnv& env, Time t, double d);

/// Outcome of the search for r in (s, t) whose psi ratio lies in
/// [lambda, 1 - lambda].
struct RChoice {
  std::optional<Time> r;
  bool degenerate = false;  // psi(t) == psi(s)
  std::string diagnostic;
};

/// kappa_u, psi_d and psi_{d,beta} for one environment, with kappa cached
/// per schedule epoch and psi cached as prefix sums.
class IsoperimetricProfile {
 public:
  IsoperimetricProfile(const DynEnv& env, IsoConfig cfg);

  const IsoConfig& config() const { return cfg_; }
  const DynEnv& env() const { return *env_; }

  double kappa(Time u);
  /// sum_{u < t} (beta(u)^{1/d} kappa_u)^2, or without beta.
  double psi(Time t, bool with_beta);
  RChoice r_condition(Time s, Time t);
  const MonotonicityReport& monotonicity();

 private:
  const DynEnv* env_;
  IsoConfig cfg_;
  std::vector<std::optional<double>> kappa_by_epoch_;
  std::optional<MonotonicityReport> mono_;
  std::vector<double> psi_plain_{0.0};
  std::vector<double> psi_beta_{0.0};
};

double psi(const DynEnv& env, Time t, const IsoConfig& cfg, bool with_beta);
RChoice r_condition(const DynEnv& env, Time s, Time t, const IsoConfig& cfg);

}  // namespace evoset
