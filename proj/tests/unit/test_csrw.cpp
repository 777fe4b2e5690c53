#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "evoset/csrw.hpp"
#include "evoset/env_io.hpp"
#include "evoset/error.hpp"
#include "evoset/exact_chain.hpp"
#include "evoset/stats.hpp"

using namespace evoset;

TEST(Csrw, RingCountsArePoisson) {
  const DynEnv env = e3_env(20);
  const double t_max = 10.0;
  const int n = 4000;
  MomentAccumulator rings;
  MomentAccumulator jumps;
  for (int i = 0; i < n; ++i) {
    Rng rng = make_rng(61, 0, i);
    const auto path = simulate_csrw(env, 0, t_max, rng);
    rings.add(static_cast<double>(path.rings()));
    jumps.add(static_cast<double>(path.effective_jumps()));
    for (double t : path.ring_times) ASSERT_LE(t, t_max);
  }
  const double lambda = CsrwPath::kClockRate * t_max;
  EXPECT_LE(std::abs(rings.result().mean - lambda), 4.0 * std::sqrt(lambda / n));
  EXPECT_LE(std::abs(jumps.result().mean - lambda / 2), 4.0 * std::sqrt(lambda / 2 / n));
  EXPECT_LE(std::abs(rings.result().variance - lambda), 4.0 * std::sqrt((lambda + 2 * lambda * lambda) / n));
}

TEST(Csrw, InterarrivalsAreExponential) {
  const DynEnv env = e2_env(50);
  std::vector<double> gaps;
  for (int i = 0; i < 3000; ++i) {
    Rng rng = make_rng(62, 0, i);
    const auto g = simulate_csrw(env, 0, 50.0, rng).effective_interarrivals();
    if (!g.empty()) gaps.push_back(g.front());
  }
  const double d = ks_statistic(gaps, [](double x) { return x <= 0 ? 0.0 : 1.0 - std::exp(-x); });
  EXPECT_GE(ks_pvalue(d, gaps.size()), 0.01);
}

TEST(Csrw, PositionAtIsRightContinuous) {
  Rng rng = make_rng(63, 0, 0);
  const auto path = simulate_csrw(e3_env(10), 1, 5.0, rng);
  EXPECT_EQ(path.position_at(0.0), 1u);
  for (std::size_t k = 0; k < path.rings(); ++k) EXPECT_EQ(path.position_at(path.ring_times[k]), path.positions[k]);
}

TEST(Csrw, UnreachableTargetIsNeverVisited) {
  EnvBuilder b;
  b.add_vertices(3);
  b.add_edge(0, 1, 1.0);
  b.add_edge(2, 2, 1.0);
  b.set_horizon(10);
  const DynEnv env = b.build();
  std::vector<CsrwPath> paths;
  for (int i = 0; i < 50; ++i) {
    Rng rng = make_rng(64, 0, i);
    paths.push_back(simulate_csrw(env, 0, 10.0, rng));
  }
  const auto far = return_statistics(paths, 2);
  EXPECT_EQ(far.mean_visits, 0.0);
  EXPECT_EQ(far.histogram.at(0), 50u);
  const auto home = return_statistics(paths, 0);
  for (std::size_t v : home.visits) EXPECT_GE(v, 1u);
}

TEST(Csrw, AbsorptionStopsThePath) {
  Rng rng = make_rng(65, 0, 0);
  const auto path = simulate_csrw(e3_env(50), 0, 50.0, rng, Vertex{2});
  ASSERT_TRUE(path.absorbed_at.has_value());
  EXPECT_EQ(path.positions.back(), 2u);
  EXPECT_EQ(*path.absorbed_at, path.ring_times.back());
}

TEST(Csrw, QuenchedReplayMatchesExactChain) {
  const DynEnv env = e3_env(4);
  const std::vector<double> rings{0.3, 0.9, 1.2, 2.5, 3.1};
  const DynEnv discrete = quenched_ring_env(env, rings);
  ASSERT_EQ(discrete.horizon(), static_cast<Time>(rings.size()));
  const auto k = multi_step_kernel<double>(discrete, 0, discrete.horizon());
  const int n = 40000;
  std::vector<double> counts(3, 0.0);
  for (int i = 0; i < n; ++i) {
    Rng rng = make_rng(66, 0, i);
    counts[simulate_csrw_on_rings(env, 0, rings, rng).positions.back()] += 1.0 / n;
  }
  const std::vector<double> exact(k.row(0).begin(), k.row(0).end());
  EXPECT_LE(tv_distance(counts, exact), 0.015);
}

TEST(Csrw, HorizonChecked) {
  Rng rng = make_rng(67, 0, 0);
  EXPECT_THROW(simulate_csrw(e2_env(5), 0, 6.0, rng), Error);
}

TEST(Csrw, CsvRows) {
  Rng rng = make_rng(68, 0, 0);
  const DynEnv env = e2_env(5);
  const auto path = simulate_csrw(env, 0, 2.0, rng);
  std::ostringstream out;
  write_csrw_csv(out, env, path, 3, true);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "replica,time,vertex,moved");
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    EXPECT_EQ(line.rfind("3,", 0), 0u);
    ++rows;
  }
  EXPECT_GE(rows, path.rings());
}
