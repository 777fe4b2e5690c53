#include "evoset/fuzz.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "evoset/error.hpp"

namespace evoset {

namespace {

// Dyadic values keep every sum and product exact in binary floating point.
double dyadic(Rng& rng, int lo_eighths, int hi_eighths) {
  std::uniform_int_distribution<int> pick(lo_eighths, hi_eighths);
  return pick(rng) / 8.0;
}

struct Skeleton {
  std::size_t n = 0;
  std::vector<Edge> edges;
  std::vector<double> weights;
};

Skeleton random_connected(std::size_t n, Rng& rng) {
  Skeleton g;
  g.n = n;
  std::vector<Vertex> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<Vertex>(i);
  std::shuffle(order.begin(), order.end(), rng);
  // Random tree: each vertex attaches to an earlier one.
  for (std::size_t i = 1; i < n; ++i) {
    std::uniform_int_distribution<std::size_t> parent(0, i - 1);
    Vertex a = order[i];
    Vertex b = order[parent(rng)];
    g.edges.push_back({std::min(a, b), std::max(a, b)});
  }
  std::bernoulli_distribution extra(0.35);
  for (Vertex a = 0; a < n; ++a) {
    for (Vertex b = a + 1; b < n; ++b) {
      const bool present = std::any_of(g.edges.begin(), g.edges.end(),
                                       [&](const Edge& e) { return e.u == a && e.v == b; });
      if (!present && extra(rng)) g.edges.push_back({a, b});
    }
  }
  for (std::size_t i = 0; i < g.edges.size(); ++i) g.weights.push_back(dyadic(rng, 4, 16));
  return g;
}

void check_caps(std::size_t n_vertices, Time horizon) {
  if (n_vertices < 1 || n_vertices > kMaxFuzzVertices) {
    fail(ErrorCode::kCapExceeded, "fuzzer vertex count must lie in [1, 8]");
  }
  if (horizon < 0 || horizon > kMaxFuzzHorizon) fail(ErrorCode::kCapExceeded, "fuzzer horizon must lie in [0, 4]");
}

// Smallest multiple of 1/8 at or above 0.34 * off.
double loop_floor(double off) { return std::ceil(off * 0.34 * 8.0) / 8.0; }

}  // namespace

DynEnv random_env_fuzzer(std::size_t n_vertices, Time horizon, Rng& rng) {
  check_caps(n_vertices, horizon);
  Skeleton g = random_connected(n_vertices, rng);
  const std::size_t m = g.edges.size();

  // weights[t][e] and loops[t][v] for t = 0..horizon.
  std::vector<std::vector<double>> w(horizon + 1, g.weights);
  std::vector<std::vector<double>> loops(horizon + 1, std::vector<double>(n_vertices, 0.0));
  auto off_at = [&](Time t, Vertex v) {
    double s = 0.0;
    for (std::size_t e = 0; e < m; ++e) {
      if (g.edges[e].u == v || g.edges[e].v == v) s += w[t][e];
    }
    return s;
  };
  for (Vertex v = 0; v < n_vertices; ++v) loops[0][v] = loop_floor(off_at(0, v)) + dyadic(rng, 0, 8);
  if (n_vertices == 1) loops[0][0] = dyadic(rng, 4, 16);

  std::bernoulli_distribution bump(0.5);
  std::uniform_int_distribution<int> factor_eighths(8, 16);  // factor in [1, 2]
  for (Time t = 1; t <= horizon; ++t) {
    for (std::size_t e = 0; e < m; ++e) {
      w[t][e] = w[t - 1][e];
      if (bump(rng)) w[t][e] *= factor_eighths(rng) / 8.0;
    }
    for (Vertex v = 0; v < n_vertices; ++v) {
      double loop = std::max(loops[t - 1][v], loop_floor(off_at(t, v)));
      if (bump(rng)) loop *= factor_eighths(rng) / 8.0;
      loops[t][v] = loop;
    }
  }

  EnvBuilder b;
  b.add_vertices(n_vertices);
  b.set_horizon(horizon);
  for (std::size_t e = 0; e < m; ++e) {
    const EdgeId id = b.add_edge(g.edges[e].u, g.edges[e].v, w[0][e]);
    for (Time t = 1; t <= horizon; ++t) {
      if (w[t][e] != w[t - 1][e]) b.add_change(id, static_cast<double>(t), w[t][e]);
    }
  }
  for (Vertex v = 0; v < n_vertices; ++v) {
    const EdgeId id = b.add_edge(v, v, loops[0][v]);
    for (Time t = 1; t <= horizon; ++t) {
      if (loops[t][v] != loops[t - 1][v]) b.add_change(id, static_cast<double>(t), loops[t][v]);
    }
  }
  return b.build();
}

DynEnv random_constant_pi_env(std::size_t n_vertices, Time horizon, Rng& rng) {
  check_caps(n_vertices, horizon);
  Skeleton g = random_connected(n_vertices, rng);
  const std::size_t m = g.edges.size();

  std::vector<std::vector<double>> w(horizon + 1, g.weights);
  std::vector<std::vector<double>> loops(horizon + 1, std::vector<double>(n_vertices, 0.0));
  for (Vertex v = 0; v < n_vertices; ++v) {
    double off = 0.0;
    for (std::size_t e = 0; e < m; ++e) {
      if (g.edges[e].u == v || g.edges[e].v == v) off += w[0][e];
    }
    // At least the off-diagonal weight: stay probability >= 1/2.
    loops[0][v] = off + dyadic(rng, 0, 8);
    if (n_vertices == 1) loops[0][v] = dyadic(rng, 4, 16);
  }
  std::bernoulli_distribution shed(0.4);
  for (Time t = 1; t <= horizon; ++t) {
    w[t] = w[t - 1];
    loops[t] = loops[t - 1];
    for (std::size_t e = 0; e < m; ++e) {
      if (!shed(rng)) continue;
      // Halving keeps the weight dyadic and positive; the endpoints' loops
      // absorb exactly what the edge lost.
      const double delta = w[t][e] / 2.0;
      w[t][e] -= delta;
      loops[t][g.edges[e].u] += delta;
      loops[t][g.edges[e].v] += delta;
    }
  }

  EnvBuilder b;
  b.add_vertices(n_vertices);
  b.set_horizon(horizon);
  for (std::size_t e = 0; e < m; ++e) {
    const EdgeId id = b.add_edge(g.edges[e].u, g.edges[e].v, w[0][e]);
    for (Time t = 1; t <= horizon; ++t) {
      if (w[t][e] != w[t - 1][e]) b.add_change(id, static_cast<double>(t), w[t][e]);
    }
  }
  for (Vertex v = 0; v < n_vertices; ++v) {
    const EdgeId id = b.add_edge(v, v, loops[0][v]);
    for (Time t = 1; t <= horizon; ++t) {
      if (loops[t][v] != loops[t - 1][v]) b.add_change(id, static_cast<double>(t), loops[t][v]);
    }
  }
  return b.build();
}

}  // namespace evoset
