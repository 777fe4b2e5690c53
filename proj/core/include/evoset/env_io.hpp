#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "evoset/dyn_env.hpp"

namespace evoset {

/// Parses a JSON environment document. Two shapes are accepted:
///
///   {"vertices": ["a", "b"], "horizon": 4,
///    "edges": [{"u": "a", "v": "b", "weight": 1, "changes": [[1, 2.0]]}, ...]}
///
/// or a generator request {"generator": "zd_box" | "e2" | "e3", ...}; see
/// BoxSpec for the zd_box fields. Vertices may also be given as a count
/// ("vertices": 5), in which case labels are "0".."4".
DynEnv parse_env_document(std::string_view text);
DynEnv load_env_file(const std::string& path);

/// Serializes to the explicit-graph document shape (lattice geometry kept).
std::string env_document(const DynEnv& env);

/// Hex SHA-256 of a canonical serialization; equal environments give equal
/// digests.
std::string env_digest(const DynEnv& env);

/// Lattice box [0, side-1]^dim with nearest-neighbour edges.
struct BoxSpec {
  int dim = 2;
  int side = 4;
  Boundary boundary = Boundary::kFree;
  double weight_min = 1.0;
  double weight_max = 1.0;
  /// Self-loop weight; a negative value means "equal to the vertex's
  /// off-diagonal conductance", which makes every stay probability 1/2.
  double loop_weight = -1.0;
  /// Number of random weight increases (non-decreasing schedule).
  int changes = 0;
  Time change_horizon = 0;
  Time horizon = 16;
  std::uint64_t seed = 1;
};

/// Builds the box. Initial edge weights are uniform on
/// [weight_min, (weight_min + weight_max) / 2]; each change raises one random
/// edge to a uniform value in [current, weight_max] at a uniform time in
/// [1, change_horizon]. A wired box gets one exterior vertex joined to each
/// face vertex by the combined weight of its missing lattice edges; its loop
/// always equals its off-diagonal conductance.
DynEnv zd_box(const BoxSpec& spec);

/// Two vertices a, b; edge weight 1 and self-loops 1, all multiplied by
/// `factor_at_1` from t = 1 on.
DynEnv e2_env(Time horizon, double factor_at_1 = 1.0);

/// Path a - b - c with unit edges and unit self-loops; the edge b - c rises to
/// 2 at t = 1.
DynEnv e3_env(Time horizon);

}  // namespace evoset
