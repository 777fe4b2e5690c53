#include "evoset/csrw.hpp"

#include <algorithm>
#include <cmath>

#include "evoset/error.hpp"

namespace evoset {

std::size_t CsrwPath::effective_jumps() const {
  return static_cast<std::size_t>(std::count(jumped.begin(), jumped.end(), 1));
}

Vertex CsrwPath::position_at(double time) const {
  auto it = std::upper_bound(ring_times.begin(), ring_times.end(), time);
  if (it == ring_times.begin()) return start;
  return positions[static_cast<std::size_t>(it - ring_times.begin()) - 1];
}

std::vector<double> CsrwPath::effective_interarrivals() const {
  std::vector<double> gaps;
  double last = 0.0;
  for (std::size_t k = 0; k < ring_times.size(); ++k) {
    if (!jumped[k]) continue;
    gaps.push_back(ring_times[k] - last);
    last = ring_times[k];
  }
  return gaps;
}

namespace {

Vertex kernel_step(const DynEnv& env, Vertex x, double time, Rng& rng) {
  const double total = env.vertex_conductance_at(time, x);
  if (!(total > 0.0)) fail(ErrorCode::kVertexLeftSupport, "walk vertex " + env.label(x) + " has zero conductance");
  const double target = uniform_open(rng) * total;
  double acc = 0.0;
  auto inc = env.incident(x);
  for (const auto& i : inc) {
    acc += env.weight(i.edge, time);
    if (target < acc) return i.neighbor;
  }
  // Rounding left target at the very top; take the last edge with weight.
  for (auto it = inc.rbegin(); it != inc.rend(); ++it) {
    if (env.weight(it->edge, time) > 0.0) return it->neighbor;
  }
  return x;
}

void check_ring_range(const DynEnv& env, double t_max) {
  if (!(t_max >= 0.0) || !std::isfinite(t_max)) fail(ErrorCode::kInvalidArgument, "t_max must be finite and >= 0");
  env.check_time(static_cast<Time>(std::ceil(t_max)));
}

void ring(const DynEnv& env, CsrwPath& path, Vertex& x, double time, Rng& rng) {
  const bool use_kernel = uniform_open(rng) >= CsrwPath::kLazyProb;
  if (use_kernel) x = kernel_step(env, x, time, rng);
  path.ring_times.push_back(time);
  path.positions.push_back(x);
  path.jumped.push_back(use_kernel ? 1 : 0);
}

}  // namespace

CsrwPath simulate_csrw(const DynEnv& env, Vertex x0, double t_max, Rng& rng, std::optional<Vertex> absorbing) {
  env.check_vertex(x0);
  check_ring_range(env, t_max);
  CsrwPath path;
  path.start = x0;
  path.t_max = t_max;
  Vertex x = x0;
  if (absorbing && x0 == *absorbing) {
    path.absorbed_at = 0.0;
    return path;
  }
  double time = 0.0;
  for (;;) {
    time += exponential(rng, CsrwPath::kClockRate);
    if (time > t_max) break;
    ring(env, path, x, time, rng);
    if (absorbing && x == *absorbing) {
      path.absorbed_at = time;
      break;
    }
  }
  return path;
}

CsrwPath simulate_csrw_on_rings(const DynEnv& env, Vertex x0, std::span<const double> ring_times, Rng& rng) {
  env.check_vertex(x0);
  if (!std::is_sorted(ring_times.begin(), ring_times.end()) ||
      (!ring_times.empty() && !(ring_times.front() > 0.0))) {
    fail(ErrorCode::kInvalidArgument, "ring times must be positive and increasing");
  }
  CsrwPath path;
  path.start = x0;
  path.t_max = ring_times.empty() ? 0.0 : ring_times.back();
  check_ring_range(env, path.t_max);
  Vertex x = x0;
  for (double time : ring_times) ring(env, path, x, time, rng);
  return path;
}

DynEnv quenched_ring_env(const DynEnv& env, std::span<const double> ring_times) {
  const std::size_t n = env.num_vertices();
  EnvBuilder b;
  for (Vertex v = 0; v < n; ++v) b.add_vertex(env.label(v));
  b.set_horizon(static_cast<Time>(ring_times.size()));

  auto weight_at_step = [&](EdgeId e, std::size_t k) {
    const double time = ring_times[k];
    const Edge& edge = env.edge(e);
    double w = env.weight(e, time);
    if (edge.is_loop()) w += env.vertex_conductance_at(time, edge.u);
    return w;
  };
  auto loop_only_at_step = [&](Vertex v, std::size_t k) { return env.vertex_conductance_at(ring_times[k], v); };

  std::vector<bool> has_loop(n, false);
  for (EdgeId e = 0; e < env.num_edges(); ++e) {
    const Edge& edge = env.edge(e);
    if (edge.is_loop()) has_loop[edge.u] = true;
    if (ring_times.empty()) {
      b.add_edge(edge.u, edge.v, env.weight(e, 0.0));
      continue;
    }
    double current = weight_at_step(e, 0);
    const EdgeId id = b.add_edge(edge.u, edge.v, current);
    for (std::size_t k = 1; k < ring_times.size(); ++k) {
      const double w = weight_at_step(e, k);
      if (w != current) b.add_change(id, static_cast<double>(k), w);
      current = w;
    }
  }
  if (!ring_times.empty()) {
    for (Vertex v = 0; v < n; ++v) {
      if (has_loop[v]) continue;
      double current = loop_only_at_step(v, 0);
      const EdgeId id = b.add_edge(v, v, current);
      for (std::size_t k = 1; k < ring_times.size(); ++k) {
        const double w = loop_only_at_step(v, k);
        if (w != current) b.add_change(id, static_cast<double>(k), w);
        current = w;
      }
    }
  }
  return b.build();
}

ReturnSummary return_statistics(std::span<const CsrwPath> paths, Vertex target) {
  ReturnSummary out;
  double total = 0.0;
  for (const auto& path : paths) {
    std::size_t visits = 0;
    std::optional<double> last;
    Vertex prev = path.start;
    if (prev == target) {
      visits = 1;
      last = 0.0;
    }
    for (std::size_t k = 0; k < path.rings(); ++k) {
      const Vertex x = path.positions[k];
      if (x == target && prev != target) {
        ++visits;
        last = path.ring_times[k];
      }
      prev = x;
    }
    out.visits.push_back(visits);
    out.last_visit.push_back(last);
    ++out.histogram[visits];
    total += static_cast<double>(visits);
  }
  if (!paths.empty()) out.mean_visits = total / static_cast<double>(paths.size());
  return out;
}

void write_csrw_csv(std::ostream& out, const DynEnv& env, const CsrwPath& path, std::size_t replica, bool header) {
  if (header) out << "replica,time,vertex,moved\n";
  const auto old_precision = out.precision(17);
  for (std::size_t k = 0; k < path.rings(); ++k) {
    out << replica << ',' << path.ring_times[k] << ',' << env.label(path.positions[k]) << ','
        << static_cast<int>(path.jumped[k]) << '\n';
  }
  out.precision(old_precision);
}

}  // namespace evoset
