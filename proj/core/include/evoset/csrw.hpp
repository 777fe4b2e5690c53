#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "evoset/dyn_env.hpp"
#include "evoset/rng.hpp"

namespace evoset {

/// Constant-speed walk built by thinning: a rate-2 clock rings at T_1 < T_2
/// < ...; at each ring the walk stays with probability 1/2, otherwise it
/// draws its next position from the conductances read at T_k.
struct CsrwPath {
  static constexpr double kClockRate = 2.0;
  static constexpr double kLazyProb = 0.5;

  Vertex start = 0;
  double t_max = 0.0;
  std::vector<double> ring_times;
  std::vector<Vertex> positions;  // position right after each ring
  std::vector<std::uint8_t> jumped;  // 1 when the ring used the kernel
  std::optional<double> absorbed_at;

  std::size_t rings() const { return ring_times.size(); }
  std::size_t effective_jumps() const;
  Vertex position_at(double time) const;
  /// Gaps between successive kernel-using rings, the first measured from 0.
  std::vector<double> effective_interarrivals() const;
};

/// Samples the clock and the walk on [0, t_max]. Requires t_max within the
/// horizon and the walk's vertex to keep positive conductance. Reaching
/// `absorbing` ends the path.
CsrwPath simulate_csrw(const DynEnv& env, Vertex x0, double t_max, Rng& rng,
                       std::optional<Vertex> absorbing = std::nullopt);

/// Same walk on a given, increasing ring sequence (quenched in the clock).
CsrwPath simulate_csrw_on_rings(const DynEnv& env, Vertex x0, std::span<const double> ring_times, Rng& rng);

/// Discrete environment whose step k is the ring at ring_times[k]: edge
/// weights read at that time and every self-loop raised by the vertex
/// conductance, which makes the one-step kernel the 1/2-lazy walk in
/// pi^(T_{k+1}). Horizon = number of rings.
DynEnv quenched_ring_env(const DynEnv& env, std::span<const double> ring_times);

struct ReturnSummary {
  std::vector<std::size_t> visits;              // entries into the target per path
  std::vector<std::optional<double>> last_visit;  // time of the last entry
  std::map<std::size_t, std::size_t> histogram;   // visits -> number of paths
  double mean_visits = 0.0;
};

/// Counts entries into `target`; being there at time 0 counts as one.
ReturnSummary return_statistics(std::span<const CsrwPath> paths, Vertex target);

/// CSV rows "replica,time,vertex,moved" for one path.
void write_csrw_csv(std::ostream& out, const DynEnv& env, const CsrwPath& path, std::size_t replica,
                    bool header);

}  // namespace evoset
