#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "evoset/types.hpp"

namespace evoset {

struct Edge {
  Vertex u = 0;
  Vertex v = 0;
  bool is_loop() const { return u == v; }
};

/// The edge takes `value` from `time` on (right-continuous).
struct ChangeEvent {
  double time = 0.0;
  double value = 0.0;
};

enum class Boundary { kFree, kWired };

/// Geometry attached to environments generated on a box of Z^d.
///
/// Lattice vertices are 0..coords.size()/dim - 1; a wired box adds one
/// extra exterior vertex standing for the identified complement of the box.
struct LatticeInfo {
  int dim = 0;
  int lo = 0;  // every coordinate lies in [lo, hi]
  int hi = 0;
  Boundary boundary = Boundary::kFree;
  std::vector<std::int32_t> coords;
  std::optional<Vertex> exterior;
  std::optional<Vertex> origin;

  std::size_t lattice_size() const { return dim == 0 ? 0 : coords.size() / dim; }
  bool is_lattice_vertex(Vertex v) const { return v < lattice_size(); }
  std::span<const std::int32_t> coord(Vertex v) const {
    return {coords.data() + static_cast<std::size_t>(v) * dim, static_cast<std::size_t>(dim)};
  }
  bool on_box_face(Vertex v) const;
  int linf_distance(Vertex a, Vertex b) const;
};

/// Finite graph with a piecewise-constant schedule of symmetric, nonnegative
/// edge conductances. Immutable once built.
class DynEnv {
 public:
  struct Incidence {
    Vertex neighbor;
    EdgeId edge;
  };

  std::size_t num_vertices() const { return labels_.size(); }
  std::size_t num_edges() const { return edges_.size(); }
  Time horizon() const { return horizon_; }

  const Edge& edge(EdgeId e) const { return edges_[e]; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::string& label(Vertex v) const { return labels_.at(v); }
  std::optional<Vertex> find_vertex(const std::string& label) const;

  /// Incident edges of `x`; a self-loop appears once.
  std::span<const Incidence> incident(Vertex x) const;
  /// Change events of edge `e`; the first entry is the base weight at time 0.
  std::span<const ChangeEvent> schedule(EdgeId e) const;
  /// Distinct change times after 0, ascending.
  const std::vector<double>& change_times() const { return change_times_; }
  /// True when some edge changes at a time in (a, b].
  bool changes_in(double a, double b) const;

  const LatticeInfo* lattice() const { return lattice_ ? &*lattice_ : nullptr; }

  /// Weight of edge `e` at real time `time` (right-continuous; persists past
  /// the last change). No horizon check.
  double weight(EdgeId e, double time) const;

  /// pi^(t)(x, y); 0 when x and y are not joined.
  double conductance(Time t, Vertex x, Vertex y) const;
  /// pi^(t)(x) = sum_y pi^(t)(x, y), the self-loop counted once.
  double vertex_conductance(Time t, Vertex x) const;
  double vertex_conductance_at(double time, Vertex x) const;
  std::vector<double> vertex_conductances(Time t) const;
  bool in_support(Time t, Vertex x) const { return vertex_conductance(t, x) > 0.0; }
  /// V_t as a sorted vertex list.
  VertexSet support(Time t) const;

  /// pi^(t)(x, y) / pi^(t)(x); requires x in V_t.
  double transition_prob(Time t, Vertex x, Vertex y) const;

  void check_vertex(Vertex x) const;
  void check_time(Time t) const;

 private:
  friend class EnvBuilder;
  DynEnv() = default;

  std::vector<std::string> labels_;
  std::vector<Edge> edges_;
  std::vector<std::size_t> sched_offset_;
  std::vector<ChangeEvent> sched_;
  std::vector<std::size_t> adj_offset_;
  std::vector<Incidence> adj_;
  std::vector<double> change_times_;
  Time horizon_ = 0;
  std::optional<LatticeInfo> lattice_;
};

class EnvBuilder {
 public:
  Vertex add_vertex(std::string label = {});
  void add_vertices(std::size_t count);
  std::size_t num_vertices() const { return labels_.size(); }

  /// Adds the unordered pair {u, v} (u == v for a self-loop) with its weight
  /// at time 0. A pair may be added only once.
  EdgeId add_edge(Vertex u, Vertex v, double base_weight);
  /// From `time` (> 0, strictly after the edge's previous change) on, the
  /// edge carries `value`.
  void add_change(EdgeId e, double time, double value);
  void set_horizon(Time horizon) { horizon_ = horizon; }
  void set_lattice(LatticeInfo info) { lattice_ = std::move(info); }

  /// Validates and freezes. Rejects negative weights and empty V_t for some
  /// t <= horizon.
  DynEnv build() const;

 private:
  std::vector<std::string> labels_;
  std::vector<Edge> edges_;
  std::vector<std::vector<ChangeEvent>> schedules_;
  Time horizon_ = 0;
  std::optional<LatticeInfo> lattice_;
};

/// Delayed random walk: given off-diagonal conductances with
/// sup_{t,x} pi^(t)(x, {x}^c) <= 1 - gamma, sets the self-loop to
/// 1 - pi^(t)(x, {x}^c) so that pi^(t)(x) = 1 everywhere. Existing self-loops
/// of `off_diagonal` are ignored.
DynEnv delayed_walk_env(const DynEnv& off_diagonal, double gamma);

/// Smallest stay probability P(t, x; t+1, x) over t <= horizon, x in V_t.
double laziness_coefficient(const DynEnv& env);

}  // namespace evoset
