#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "evoset/dyn_env.hpp"
#include "evoset/rng.hpp"

namespace evoset {

/// Box vertices are indexed by sum_i (c_i + L) (2L + 1)^i for coordinates
/// c in [-L, L]^d.
using BoxIndex = std::uint64_t;
using BoxEdge = std::pair<BoxIndex, BoxIndex>;

struct GrowthBatch {
  double time = 1.0;
  std::vector<BoxEdge> edges;
};

struct PercConfig {
  int d = 3;
  int L = 10;
  double p = 0.5;
  std::uint64_t seed = 1;
  double min_cluster_fraction = 0.1;
  int max_attempts = 20;
  Time horizon = 0;
  std::vector<GrowthBatch> growth_schedule;

  void validate() const;
};

/// The origin's open cluster in one percolation sample.
struct Cluster {
  int d = 0;
  int L = 0;
  std::vector<BoxIndex> members;  // ascending
  std::vector<BoxEdge> open_edges;  // (a, b) with a < b, both members
  BoxIndex origin = 0;
  int attempts = 0;

  std::size_t box_volume() const;
  /// Lattice edges between members that are not open.
  std::vector<BoxEdge> closed_internal_edges() const;
};

BoxIndex box_index(int d, int L, const std::vector<int>& coords);
std::vector<int> box_coords(int d, int L, BoxIndex index);

/// Keeps each box edge with probability p and extracts the origin's cluster.
/// Resamples while the cluster is below min_cluster_fraction of the box;
/// kRetryExhausted after max_attempts samples.
Cluster generate_cluster(const PercConfig& cfg);

/// Walk environment on the cluster: unit weight on open edges, inserted
/// edges rising from 0 to 1 at their batch time, and a self-loop equal to
/// the current degree (1 for an isolated vertex), so P(stay) >= 1/2 and
/// pi^(t)(x) <= 4d. Lattice geometry is attached with the origin marked.
DynEnv growing_env(const Cluster& cluster, const std::vector<GrowthBatch>& schedule, Time horizon);

/// Spreads `count` closed internal edges of the cluster over `batches`
/// insertion times 1..batches.
std::vector<GrowthBatch> random_growth_schedule(const Cluster& cluster, std::size_t count, int batches, Rng& rng);

struct TransienceSummary {
  std::size_t walks = 0;
  Time t_max = 0;
  std::map<std::size_t, std::size_t> return_histogram;  // returns -> walks
  std::vector<std::size_t> returns;  // per walk, by walk index
  double median_returns = 0.0;
  double late_return_fraction = 0.0;  // share of walks at the origin after t_max / 2
  double kill_fraction = 0.0;  // share of walks stopped on the box face
  bool flagged_non_transient = false;
};

/// Runs lazy walks from the lattice origin for t_max steps; a step counts as
/// a return when X_t is the origin (t >= 1). Walks that touch the box face
/// are killed there. Every step asserts |X_t - origin|_inf <= t. Walk w uses
/// the stream make_rng(seed, stream, w), whatever the worker count.
TransienceSummary transience_experiment(const DynEnv& env, std::size_t n_walks, Time t_max, std::uint64_t seed,
                                        std::uint64_t stream, std::size_t workers);

}  // namespace evoset
