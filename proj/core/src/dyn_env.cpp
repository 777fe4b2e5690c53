#include "evoset/dyn_env.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <set>
#include <utility>

#include "evoset/error.hpp"

namespace evoset {

bool LatticeInfo::on_box_face(Vertex v) const {
  if (!is_lattice_vertex(v)) return false;
  for (std::int32_t c : coord(v)) {
    if (c == lo || c == hi) return true;
  }
  return false;
}

int LatticeInfo::linf_distance(Vertex a, Vertex b) const {
  auto ca = coord(a);
  auto cb = coord(b);
  int best = 0;
  for (int i = 0; i < dim; ++i) best = std::max(best, std::abs(ca[i] - cb[i]));
  return best;
}

std::optional<Vertex> DynEnv::find_vertex(const std::string& label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) return std::nullopt;
  return static_cast<Vertex>(it - labels_.begin());
}

std::span<const DynEnv::Incidence> DynEnv::incident(Vertex x) const {
  return {adj_.data() + adj_offset_[x], adj_offset_[x + 1] - adj_offset_[x]};
}

std::span<const ChangeEvent> DynEnv::schedule(EdgeId e) const {
  return {sched_.data() + sched_offset_[e], sched_offset_[e + 1] - sched_offset_[e]};
}

bool DynEnv::changes_in(double a, double b) const {
  auto it = std::upper_bound(change_times_.begin(), change_times_.end(), a);
  return it != change_times_.end() && *it <= b;
}

double DynEnv::weight(EdgeId e, double time) const {
  const std::size_t begin = sched_offset_[e];
  const std::size_t end = sched_offset_[e + 1];
  if (end - begin == 1 || time < sched_[begin + 1].time) return sched_[begin].value;
  auto it = std::upper_bound(sched_.begin() + begin, sched_.begin() + end, time,
                             [](double t, const ChangeEvent& c) { return t < c.time; });
  return std::prev(it)->value;
}

void DynEnv::check_vertex(Vertex x) const {
  if (x >= num_vertices()) {
    fail(ErrorCode::kUnknownVertex, "vertex " + std::to_string(x) + " not in environment of " +
                                        std::to_string(num_vertices()) + " vertices");
  }
}

void DynEnv::check_time(Time t) const {
  if (t < 0 || t > horizon_) {
    fail(ErrorCode::kBeyondHorizon,
         "time " + std::to_string(t) + " outside [0, " + std::to_string(horizon_) + "]");
  }
}

double DynEnv::conductance(Time t, Vertex x, Vertex y) const {
  check_vertex(x);
  check_vertex(y);
  check_time(t);
  for (const Incidence& inc : incident(x)) {
    if (inc.neighbor == y) return weight(inc.edge, static_cast<double>(t));
  }
  return 0.0;
}

double DynEnv::vertex_conductance_at(double time, Vertex x) const {
  double total = 0.0;
  for (const Incidence& inc : incident(x)) total += weight(inc.edge, time);
  return total;
}

double DynEnv::vertex_conductance(Time t, Vertex x) const {
  check_vertex(x);
  check_time(t);
  return vertex_conductance_at(static_cast<double>(t), x);
}

std::vector<double> DynEnv::vertex_conductances(Time t) const {
  check_time(t);
  std::vector<double> out(num_vertices(), 0.0);
  const double time = static_cast<double>(t);
  for (EdgeId e = 0; e < edges_.size(); ++e) {
    const double w = weight(e, time);
    out[edges_[e].u] += w;
    if (!edges_[e].is_loop()) out[edges_[e].v] += w;
  }
  return out;
}

VertexSet DynEnv::support(Time t) const {
  const auto pi = vertex_conductances(t);
  VertexSet out;
  for (Vertex v = 0; v < pi.size(); ++v) {
    if (pi[v] > 0.0) out.push_back(v);
  }
  return out;
}

double DynEnv::transition_prob(Time t, Vertex x, Vertex y) const {
  const double pi_x = vertex_conductance(t, x);
  if (!(pi_x > 0.0)) {
    fail(ErrorCode::kInvalidState, "vertex " + label(x) + " is not in V_" + std::to_string(t));
  }
  return conductance(t, x, y) / pi_x;
}

Vertex EnvBuilder::add_vertex(std::string label) {
  if (label.empty()) label = std::to_string(labels_.size());
  labels_.push_back(std::move(label));
  return static_cast<Vertex>(labels_.size() - 1);
}

void EnvBuilder::add_vertices(std::size_t count) {
  for (std::size_t i = 0; i < count; ++i) add_vertex();
}

EdgeId EnvBuilder::add_edge(Vertex u, Vertex v, double base_weight) {
  if (u >= labels_.size() || v >= labels_.size()) {
    fail(ErrorCode::kUnknownVertex, "edge endpoint out of range");
  }
  if (!(base_weight >= 0.0) || !std::isfinite(base_weight)) {
    fail(ErrorCode::kInvalidArgument, "edge weight must be finite and nonnegative");
  }
  if (u > v) std::swap(u, v);
  edges_.push_back({u, v});
  schedules_.push_back({{0.0, base_weight}});
  return static_cast<EdgeId>(edges_.size() - 1);
}

void EnvBuilder::add_change(EdgeId e, double time, double value) {
  if (e >= edges_.size()) fail(ErrorCode::kInvalidArgument, "unknown edge id");
  if (!(value >= 0.0) || !std::isfinite(value)) {
    fail(ErrorCode::kInvalidArgument, "edge weight must be finite and nonnegative");
  }
  auto& sched = schedules_[e];
  if (!(time > sched.back().time)) {
    fail(ErrorCode::kInvalidArgument,
         "change times must be positive and strictly increasing per edge");
  }
  sched.push_back({time, value});
}

DynEnv EnvBuilder::build() const {
  if (labels_.empty()) fail(ErrorCode::kInvalidArgument, "environment has no vertices");
  if (horizon_ < 0) fail(ErrorCode::kInvalidArgument, "horizon must be nonnegative");

  DynEnv env;
  env.labels_ = labels_;
  env.edges_ = edges_;
  env.horizon_ = horizon_;
  env.lattice_ = lattice_;

  {
    std::vector<std::pair<Vertex, Vertex>> pairs;
    pairs.reserve(edges_.size());
    for (const Edge& e : edges_) pairs.emplace_back(e.u, e.v);
    std::sort(pairs.begin(), pairs.end());
    if (std::adjacent_find(pairs.begin(), pairs.end()) != pairs.end()) {
      fail(ErrorCode::kInvalidArgument, "duplicate edge");
    }
  }

  env.sched_offset_.reserve(edges_.size() + 1);
  env.sched_offset_.push_back(0);
  std::vector<double> times;
  for (const auto& sched : schedules_) {
    for (std::size_t i = 0; i < sched.size(); ++i) {
      env.sched_.push_back(sched[i]);
      if (i > 0) times.push_back(sched[i].time);
    }
    env.sched_offset_.push_back(env.sched_.size());
  }
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  env.change_times_ = std::move(times);

  const std::size_t n = labels_.size();
  std::vector<std::size_t> degree(n, 0);
  for (const Edge& e : edges_) {
    ++degree[e.u];
    if (!e.is_loop()) ++degree[e.v];
  }
  env.adj_offset_.assign(n + 1, 0);
  for (std::size_t v = 0; v < n; ++v) env.adj_offset_[v + 1] = env.adj_offset_[v] + degree[v];
  env.adj_.resize(env.adj_offset_[n]);
  std::vector<std::size_t> cursor(env.adj_offset_.begin(), env.adj_offset_.end() - 1);
  for (EdgeId id = 0; id < edges_.size(); ++id) {
    const Edge& e = edges_[id];
    env.adj_[cursor[e.u]++] = {e.v, id};
    if (!e.is_loop()) env.adj_[cursor[e.v]++] = {e.u, id};
  }

  // V_t only changes at change points, so checking t = 0 and the first
  // integer time at or after each change covers every t <= horizon.
  std::vector<Time> checkpoints{0};
  for (double c : env.change_times_) {
    const auto t = static_cast<Time>(std::ceil(c));
    if (t <= horizon_) checkpoints.push_back(t);
  }
  checkpoints.erase(std::unique(checkpoints.begin(), checkpoints.end()), checkpoints.end());
  for (Time t : checkpoints) {
    const auto pi = env.vertex_conductances(t);
    if (std::none_of(pi.begin(), pi.end(), [](double p) { return p > 0.0; })) {
      fail(ErrorCode::kInvalidArgument, "V_t is empty at t = " + std::to_string(t));
    }
  }
  return env;
}

namespace {

std::vector<Time> integer_checkpoints(const DynEnv& env) {
  std::vector<Time> out{0};
  for (double c : env.change_times()) {
    const auto t = static_cast<Time>(std::ceil(c));
    if (t <= env.horizon()) out.push_back(t);
  }
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

double laziness_coefficient(const DynEnv& env) {
  double best = 1.0;
  for (Time t : integer_checkpoints(env)) {
    const double time = static_cast<double>(t);
    for (Vertex x = 0; x < env.num_vertices(); ++x) {
      double total = 0.0;
      double loop = 0.0;
      for (const auto& inc : env.incident(x)) {
        const double w = env.weight(inc.edge, time);
        total += w;
        if (inc.neighbor == x) loop = w;
      }
      if (total > 0.0) best = std::min(best, loop / total);
    }
  }
  return best;
}

DynEnv delayed_walk_env(const DynEnv& off_diagonal, double gamma) {
  if (!(gamma > 0.0 && gamma <= 0.5)) {
    fail(ErrorCode::kInvalidArgument, "gamma must lie in (0, 1/2]");
  }
  EnvBuilder b;
  for (Vertex v = 0; v < off_diagonal.num_vertices(); ++v) b.add_vertex(off_diagonal.label(v));
  b.set_horizon(off_diagonal.horizon());
  if (off_diagonal.lattice()) b.set_lattice(*off_diagonal.lattice());

  for (EdgeId e = 0; e < off_diagonal.num_edges(); ++e) {
    const Edge& edge = off_diagonal.edge(e);
    if (edge.is_loop()) continue;
    auto sched = off_diagonal.schedule(e);
    const EdgeId id = b.add_edge(edge.u, edge.v, sched[0].value);
    for (std::size_t i = 1; i < sched.size(); ++i) b.add_change(id, sched[i].time, sched[i].value);
  }

  std::vector<double> times{0.0};
  times.insert(times.end(), off_diagonal.change_times().begin(), off_diagonal.change_times().end());
  for (Vertex x = 0; x < off_diagonal.num_vertices(); ++x) {
    EdgeId loop = 0;
    double previous = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 0; i < times.size(); ++i) {
      double off = 0.0;
      for (const auto& inc : off_diagonal.incident(x)) {
        if (inc.neighbor != x) off += off_diagonal.weight(inc.edge, times[i]);
      }
      if (off > 1.0 - gamma + 1e-15) {
        fail(ErrorCode::kInvalidArgument, "off-diagonal conductance of " + off_diagonal.label(x) +
                                              " exceeds 1 - gamma");
      }
      const double value = 1.0 - off;
      if (i == 0) {
        loop = b.add_edge(x, x, value);
      } else if (value != previous) {
        b.add_change(loop, times[i], value);
      }
      previous = value;
    }
  }
  return b.build();
}

}  // namespace evoset
