#include "evoset/percolation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "evoset/error.hpp"
#include "evoset/parallel.hpp"

namespace evoset {

namespace {

BoxIndex side_of(int L) { return static_cast<BoxIndex>(2 * L + 1); }

BoxIndex volume_of(int d, int L) {
  BoxIndex v = 1;
  for (int i = 0; i < d; ++i) v *= side_of(L);
  return v;
}

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n), size_(n, 1) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
  }

  std::size_t size_of(std::size_t x) { return size_[find(x)]; }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> size_;
};

bool is_member(const std::vector<BoxIndex>& members, BoxIndex x) {
  return std::binary_search(members.begin(), members.end(), x);
}

Vertex vertex_of(const std::vector<BoxIndex>& members, BoxIndex x) {
  auto it = std::lower_bound(members.begin(), members.end(), x);
  if (it == members.end() || *it != x) fail(ErrorCode::kInvalidArgument, "schedule edge leaves the cluster vertex set");
  return static_cast<Vertex>(it - members.begin());
}

bool is_lattice_edge(int d, int L, BoxIndex a, BoxIndex b) {
  const auto ca = box_coords(d, L, a);
  const auto cb = box_coords(d, L, b);
  int diff = 0;
  for (int i = 0; i < d; ++i) diff += std::abs(ca[i] - cb[i]);
  return diff == 1;
}

BoxEdge ordered(BoxEdge e) {
  if (e.first > e.second) std::swap(e.first, e.second);
  return e;
}

}  // namespace

void PercConfig::validate() const {
  if (d < 1) fail(ErrorCode::kConfig, "d must be >= 1");
  if (L < 1) fail(ErrorCode::kConfig, "L must be >= 1");
  if (!(p >= 0.0 && p <= 1.0)) fail(ErrorCode::kConfig, "p must lie in [0, 1]");
  if (!(min_cluster_fraction >= 0.0 && min_cluster_fraction <= 1.0)) {
    fail(ErrorCode::kConfig, "min_cluster_fraction must lie in [0, 1]");
  }
  if (max_attempts < 1) fail(ErrorCode::kConfig, "max_attempts must be >= 1");
  if (horizon < 0) fail(ErrorCode::kConfig, "horizon must be >= 0");
  const double volume = std::pow(2.0 * L + 1.0, d);
  if (volume > 5e7) fail(ErrorCode::kCapExceeded, "box volume above 5e7 vertices");
}

std::size_t Cluster::box_volume() const { return static_cast<std::size_t>(volume_of(d, L)); }

BoxIndex box_index(int d, int L, const std::vector<int>& coords) {
  if (static_cast<int>(coords.size()) != d) fail(ErrorCode::kInvalidArgument, "coordinate dimension mismatch");
  BoxIndex index = 0;
  BoxIndex stride = 1;
  for (int i = 0; i < d; ++i) {
    if (coords[i] < -L || coords[i] > L) fail(ErrorCode::kInvalidArgument, "coordinate outside the box");
    index += static_cast<BoxIndex>(coords[i] + L) * stride;
    stride *= side_of(L);
  }
  return index;
}

std::vector<int> box_coords(int d, int L, BoxIndex index) {
  std::vector<int> c(d);
  for (int i = 0; i < d; ++i) {
    c[i] = static_cast<int>(index % side_of(L)) - L;
    index /= side_of(L);
  }
  return c;
}

std::vector<BoxEdge> Cluster::closed_internal_edges() const {
  std::vector<BoxEdge> open = open_edges;
  std::sort(open.begin(), open.end());
  std::vector<BoxEdge> closed;
  for (BoxIndex x : members) {
    BoxIndex stride = 1;
    auto c = box_coords(d, L, x);
    for (int i = 0; i < d; ++i) {
      if (c[i] < L) {
        const BoxEdge e{x, x + stride};
        if (is_member(members, e.second) && !std::binary_search(open.begin(), open.end(), e)) closed.push_back(e);
      }
      stride *= side_of(L);
    }
  }
  return closed;
}

Cluster generate_cluster(const PercConfig& cfg) {
  cfg.validate();
  const BoxIndex volume = volume_of(cfg.d, cfg.L);
  const BoxIndex origin = box_index(cfg.d, cfg.L, std::vector<int>(cfg.d, 0));
  const double needed = cfg.min_cluster_fraction * static_cast<double>(volume);

  for (int attempt = 1; attempt <= cfg.max_attempts; ++attempt) {
    Rng rng = make_rng(cfg.seed, 0x9e7c, static_cast<std::uint64_t>(attempt));
    UnionFind uf(static_cast<std::size_t>(volume));
    std::vector<BoxEdge> open;
    for (BoxIndex x = 0; x < volume; ++x) {
      BoxIndex stride = 1;
      BoxIndex rest = x;
      for (int i = 0; i < cfg.d; ++i) {
        const bool has_next = rest % side_of(cfg.L) + 1 < side_of(cfg.L);
        rest /= side_of(cfg.L);
        if (has_next && uniform_open(rng) < cfg.p) {
          uf.unite(x, x + stride);
          open.emplace_back(x, x + stride);
        }
        stride *= side_of(cfg.L);
      }
    }
    if (static_cast<double>(uf.size_of(origin)) < needed) continue;

    Cluster c;
    c.d = cfg.d;
    c.L = cfg.L;
    c.origin = origin;
    c.attempts = attempt;
    const std::size_t root = uf.find(origin);
    for (BoxIndex x = 0; x < volume; ++x) {
      if (uf.find(x) == root) c.members.push_back(x);
    }
    for (const auto& e : open) {
      if (uf.find(e.first) == root) c.open_edges.push_back(e);
    }
    return c;
  }
  fail(ErrorCode::kRetryExhausted, "origin cluster stayed below " + std::to_string(cfg.min_cluster_fraction) +
                                       " of the box after " + std::to_string(cfg.max_attempts) + " samples");
}

DynEnv growing_env(const Cluster& cluster, const std::vector<GrowthBatch>& schedule, Time horizon) {
  const std::size_t n = cluster.members.size();
  if (n == 0) fail(ErrorCode::kInvalidArgument, "empty cluster");
  EnvBuilder b;
  b.add_vertices(n);
  b.set_horizon(horizon);

  LatticeInfo info;
  info.dim = cluster.d;
  info.lo = -cluster.L;
  info.hi = cluster.L;
  info.boundary = Boundary::kFree;
  info.coords.reserve(n * cluster.d);
  for (BoxIndex x : cluster.members) {
    for (int c : box_coords(cluster.d, cluster.L, x)) info.coords.push_back(c);
  }
  info.origin = vertex_of(cluster.members, cluster.origin);
  b.set_lattice(std::move(info));

  std::vector<std::size_t> degree(n, 0);
  std::vector<BoxEdge> present;
  present.reserve(cluster.open_edges.size());
  for (const auto& raw : cluster.open_edges) {
    const BoxEdge e = ordered(raw);
    const Vertex u = vertex_of(cluster.members, e.first);
    const Vertex v = vertex_of(cluster.members, e.second);
    b.add_edge(u, v, 1.0);
    ++degree[u];
    ++degree[v];
    present.push_back(e);
  }
  std::sort(present.begin(), present.end());

  std::vector<GrowthBatch> batches = schedule;
  std::stable_sort(batches.begin(), batches.end(),
                   [](const GrowthBatch& a, const GrowthBatch& c) { return a.time < c.time; });

  // Degree changes per vertex: (time, new degree).
  std::vector<std::vector<std::pair<double, std::size_t>>> degree_changes(n);
  std::vector<BoxEdge> inserted;
  std::vector<std::size_t> running = degree;
  for (const auto& batch : batches) {
    if (!(batch.time > 0.0)) fail(ErrorCode::kInvalidArgument, "growth batch time must be > 0");
    for (const auto& raw : batch.edges) {
      const BoxEdge e = ordered(raw);
      const Vertex u = vertex_of(cluster.members, e.first);
      const Vertex v = vertex_of(cluster.members, e.second);
      if (!is_lattice_edge(cluster.d, cluster.L, e.first, e.second)) {
        fail(ErrorCode::kInvalidArgument, "growth edge is not a lattice edge");
      }
      if (std::binary_search(present.begin(), present.end(), e) ||
          std::find(inserted.begin(), inserted.end(), e) != inserted.end()) {
        fail(ErrorCode::kInvalidArgument, "growth edge is already present");
      }
      inserted.push_back(e);
      const EdgeId id = b.add_edge(u, v, 0.0);
      b.add_change(id, batch.time, 1.0);
      for (Vertex w : {u, v}) {
        ++running[w];
        auto& changes = degree_changes[w];
        if (!changes.empty() && changes.back().first == batch.time) {
          changes.back().second = running[w];
        } else {
          changes.emplace_back(batch.time, running[w]);
        }
      }
    }
  }

  auto loop_weight = [](std::size_t deg) { return static_cast<double>(std::max<std::size_t>(deg, 1)); };
  for (Vertex v = 0; v < n; ++v) {
    const EdgeId loop = b.add_edge(v, v, loop_weight(degree[v]));
    double current = loop_weight(degree[v]);
    for (const auto& [time, deg] : degree_changes[v]) {
      if (loop_weight(deg) == current) continue;
      current = loop_weight(deg);
      b.add_change(loop, time, current);
    }
  }
  return b.build();
}

std::vector<GrowthBatch> random_growth_schedule(const Cluster& cluster, std::size_t count, int batches, Rng& rng) {
  if (batches < 1) fail(ErrorCode::kInvalidArgument, "batches must be >= 1");
  auto closed = cluster.closed_internal_edges();
  std::shuffle(closed.begin(), closed.end(), rng);
  closed.resize(std::min(count, closed.size()));
  std::vector<GrowthBatch> out(static_cast<std::size_t>(batches));
  for (int k = 0; k < batches; ++k) out[k].time = static_cast<double>(k + 1);
  for (std::size_t i = 0; i < closed.size(); ++i) out[i % out.size()].edges.push_back(closed[i]);
  return out;
}

TransienceSummary transience_experiment(const DynEnv& env, std::size_t n_walks, Time t_max, std::uint64_t seed,
                                        std::uint64_t stream, std::size_t workers) {
  const LatticeInfo* lat = env.lattice();
  if (lat == nullptr || !lat->origin) fail(ErrorCode::kNotLattice, "transience experiment needs a lattice origin");
  if (t_max < 1) fail(ErrorCode::kInvalidArgument, "t_max must be >= 1");
  env.check_time(t_max);
  const Vertex origin = *lat->origin;

  struct WalkResult {
    std::size_t returns = 0;
    bool late = false;
    bool killed = false;
  };
  std::vector<WalkResult> results(n_walks);

  parallel_for(n_walks, workers, [&](std::size_t w) {
    Rng rng = make_rng(seed, stream, w);
    WalkResult r;
    Vertex x = origin;
    for (Time t = 0; t < t_max; ++t) {
      const double time = static_cast<double>(t);
      const double total = env.vertex_conductance_at(time, x);
      if (!(total > 0.0)) fail(ErrorCode::kVertexLeftSupport, "walk reached a vertex with zero conductance");
      const double target = uniform_open(rng) * total;
      double acc = 0.0;
      Vertex next = x;
      for (const auto& inc : env.incident(x)) {
        const double wgt = env.weight(inc.edge, time);
        acc += wgt;
        if (wgt > 0.0) next = inc.neighbor;
        if (target < acc) break;
      }
      x = next;
      const Time now = t + 1;
      if (lat->linf_distance(x, origin) > now) fail(ErrorCode::kInvalidState, "walk outran linear growth");
      if (x == origin) {
        ++r.returns;
        if (2 * now > t_max) r.late = true;
      }
      if (lat->on_box_face(x)) {
        r.killed = true;
        break;
      }
    }
    results[w] = r;
  });

  TransienceSummary s;
  s.walks = n_walks;
  s.t_max = t_max;
  std::size_t late = 0;
  std::size_t killed = 0;
  for (const auto& r : results) {
    s.returns.push_back(r.returns);
    ++s.return_histogram[r.returns];
    late += r.late ? 1 : 0;
    killed += r.killed ? 1 : 0;
  }
  if (n_walks > 0) {
    std::vector<std::size_t> sorted = s.returns;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t mid = n_walks / 2;
    s.median_returns = n_walks % 2 == 1 ? static_cast<double>(sorted[mid])
                                        : 0.5 * static_cast<double>(sorted[mid - 1] + sorted[mid]);
    s.late_return_fraction = static_cast<double>(late) / static_cast<double>(n_walks);
    s.kill_fraction = static_cast<double>(killed) / static_cast<double>(n_walks);
  }
  // More than half the walks still at the origin in the second half of the
  // run: no sign of transience.
  s.flagged_non_transient = s.late_return_fraction > 0.5;
  return s;
}

}  // namespace evoset
