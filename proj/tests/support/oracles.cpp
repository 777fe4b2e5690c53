#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace evoset::oracle {

template <class Real>
Matrix<Real> conductances(const DynEnv& env, Time t) {
  const std::size_t n = env.num_vertices();
  Matrix<Real> c(n, std::vector<Real>(n, Real(0)));
  for (Vertex x = 0; x < n; ++x) {
    for (Vertex y = 0; y < n; ++y) c[x][y] = ScalarTraits<Real>::from_double(env.conductance(t, x, y));
  }
  return c;
}

template <class Real>
Matrix<Real> kernel(const DynEnv& env, Time s, Time t) {
  const std::size_t n = env.num_vertices();
  Matrix<Real> p(n, std::vector<Real>(n, Real(0)));
  for (Vertex x = 0; x < n; ++x) {
    if (env.vertex_conductance(s, x) > 0.0) p[x][x] = Real(1);
  }
  for (Time u = s; u < t; ++u) {
    const auto c = conductances<Real>(env, u);
    Matrix<Real> step(n, std::vector<Real>(n, Real(0)));
    for (Vertex x = 0; x < n; ++x) {
      Real total(0);
      for (Vertex y = 0; y < n; ++y) total += c[x][y];
      if (total == 0) continue;
      for (Vertex y = 0; y < n; ++y) step[x][y] = c[x][y] / total;
    }
    Matrix<Real> next(n, std::vector<Real>(n, Real(0)));
    for (Vertex x = 0; x < n; ++x) {
      for (Vertex z = 0; z < n; ++z) {
        if (p[x][z] == 0) continue;
        for (Vertex y = 0; y < n; ++y) next[x][y] += p[x][z] * step[z][y];
      }
    }
    p = std::move(next);
  }
  return p;
}

template Matrix<double> conductances<double>(const DynEnv&, Time);
template Matrix<Rational> conductances<Rational>(const DynEnv&, Time);
template Matrix<double> kernel<double>(const DynEnv&, Time, Time);
template Matrix<Rational> kernel<Rational>(const DynEnv&, Time, Time);

BruteKappa kappa(const DynEnv& env, Time t, double d, bool half_volume, bool counting_volume) {
  const auto c = conductances<double>(env, t);
  std::vector<Vertex> support;
  std::vector<double> pi;
  for (Vertex x = 0; x < env.num_vertices(); ++x) {
    double s = 0.0;
    for (double w : c[x]) s += w;
    if (s > 0.0) {
      support.push_back(x);
      pi.push_back(s);
    }
  }
  const std::size_t m = support.size();
  double total = 0.0;
  for (std::size_t i = 0; i < m; ++i) total += counting_volume ? 1.0 : pi[i];
  const double exponent = (d - 1.0) / d;

  BruteKappa out;
  out.value = std::numeric_limits<double>::infinity();
  out.singleton_bound = std::numeric_limits<double>::infinity();
  const std::uint64_t full = (std::uint64_t{1} << m) - 1;
  for (std::uint64_t mask = 1; mask < full; ++mask) {
    double vol = 0.0;
    double boundary = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (!(mask >> i & 1U)) continue;
      vol += counting_volume ? 1.0 : pi[i];
      // Every neighbour outside the set, including vertices outside V_t.
      for (Vertex y = 0; y < env.num_vertices(); ++y) {
        const auto pos = std::find(support.begin(), support.end(), y);
        const bool inside = pos != support.end() && (mask >> (pos - support.begin()) & 1U);
        if (!inside) boundary += c[support[i]][y];
      }
    }
    if (half_volume && vol > total / 2.0 * (1.0 + 1e-12)) continue;
    ++out.subsets;
    const double ratio = boundary / std::pow(vol, exponent);
    out.value = std::min(out.value, ratio);
    if (std::popcount(mask) == 1 && !counting_volume) {
      out.singleton_bound = std::min(out.singleton_bound, std::pow(vol, 1.0 / d));
    }
  }
  if (out.subsets == 0) out.value = 0.0;
  return out;
}

std::map<Mask, double> successor_law(const DynEnv& env, Time t, Mask members) {
  const std::size_t n = env.num_vertices();
  std::map<Mask, double> law;
  if (members == 0) {
    law[0] = 1.0;
    return law;
  }
  const auto now = conductances<double>(env, t);
  std::vector<double> q(n, 0.0);
  for (Vertex y = 0; y < n; ++y) {
    double flow = 0.0;
    for (Vertex x = 0; x < n; ++x) {
      if (members >> x & 1U) flow += now[x][y];
    }
    const double pi_next = env.vertex_conductance(t + 1, y);
    q[y] = flow > 0.0 ? std::min(1.0, flow / pi_next) : 0.0;
  }
  std::vector<double> cuts = q;
  cuts.push_back(0.0);
  cuts.push_back(1.0);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  for (std::size_t k = 1; k < cuts.size(); ++k) {
    // For u in (cuts[k-1], cuts[k]] the successor is {y : q_y >= cuts[k]}.
    Mask set = 0;
    for (Vertex y = 0; y < n; ++y) {
      if (q[y] > 0.0 && q[y] >= cuts[k]) set |= Mask{1} << y;
    }
    law[set] += cuts[k] - cuts[k - 1];
  }
  return law;
}

std::map<Mask, double> set_distribution(const DynEnv& env, Vertex start, Time t) {
  std::map<Mask, double> dist{{Mask{1} << start, 1.0}};
  for (Time u = 0; u < t; ++u) {
    std::map<Mask, double> next;
    for (const auto& [set, p] : dist) {
      for (const auto& [succ, r] : successor_law(env, u, set)) next[succ] += p * r;
    }
    dist = std::move(next);
  }
  return dist;
}

}  // namespace evoset::oracle
