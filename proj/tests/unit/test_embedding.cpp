#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "evoset/embedding.hpp"
#include "evoset/env_io.hpp"
#include "evoset/fuzz.hpp"
#include "evoset/identities.hpp"
#include "evoset/normal.hpp"
#include "evoset/stats.hpp"

using namespace evoset;

TEST(Normal, KnownQuantiles) {
  EXPECT_NEAR(normal_cdf(1.959963985), 0.975, 1e-9);
  EXPECT_NEAR(normal_cdf(0.0), 0.5, 1e-16);
  EXPECT_NEAR(normal_quantile(0.975), 1.959963985, 1e-8);
  EXPECT_NEAR(normal_quantile(normal_cdf(-7.5)), -7.5, 1e-9);
  EXPECT_EQ(normal_quantile(1.0), std::numeric_limits<double>::infinity());
}

TEST(DriveUniforms, StayInsideOpenInterval) {
  const std::vector<double> z{-60.0, 0.0, 60.0};
  const auto u = drive_uniforms(z);
  EXPECT_GT(u[0], 0.0);
  EXPECT_DOUBLE_EQ(u[1], 0.5);
  EXPECT_LT(u[2], 1.0);
}

TEST(MInterpolate, TwoVertexMidStep) {
  const DynEnv env = e2_env(1);
  // Both candidates have q = 1/2, so H = 0 and M = 4 Phi(-b / sqrt(1 - s)).
  EXPECT_NEAR(m_interpolate(env, VertexSet{0}, 0, 0.5, 0.0), 2.0, 1e-15);
  EXPECT_NEAR(m_interpolate(env, VertexSet{0}, 0, 0.5, 0.3), 4.0 * normal_cdf(-0.3 / std::sqrt(0.5)), 1e-15);
  EXPECT_EQ(m_interpolate(env, VertexSet{}, 0, 0.5, 0.3), 0.0);
}

TEST(MInterpolate, StartOfStepIsTheMass) {
  for (int i = 0; i < 40; ++i) {
    Rng rng = make_rng(51, 0, i);
    const DynEnv env = random_env_fuzzer(2 + i % 7, 1 + i % 4, rng);
    EXPECT_LE(embedding_start_gap(env), 1e-12);
  }
}

TEST(SampleBridge, MeanAndVariance) {
  Rng rng = make_rng(52, 0, 0);
  const double e = 0.8;
  const double s = 0.3;
  MomentAccumulator acc;
  const int n = 100000;
  for (int i = 0; i < n; ++i) acc.add(sample_bridge(e, s, rng));
  const auto m = acc.result();
  const double var = s * (1.0 - s);
  EXPECT_LE(std::abs(m.mean - s * e), 4.0 * std::sqrt(var / n));
  // Var of the sample variance of a normal is 2 sigma^4 / (n - 1).
  EXPECT_LE(std::abs(m.variance - var), 4.0 * var * std::sqrt(2.0 / (n - 1)));
}

TEST(EndpointConsistency, ErrorsShrinkTowardsOne) {
  const DynEnv env = e2_env(1);
  const auto law = successor_law(env, make_state<double>(env, 0, VertexSet{0}));
  const std::vector<double> s{0.9, 0.99, 0.999};
  for (double e : {-1.0, 1.0}) {
    const auto c = endpoint_consistency(law, e, s);
    ASSERT_TRUE(c.applicable);
    EXPECT_TRUE(c.pass);
    for (std::size_t k = 0; k < s.size(); ++k) EXPECT_LE(c.errors[k], c.tolerances[k]);
    for (std::size_t k = 1; k < s.size(); ++k) EXPECT_LE(c.errors[k], c.errors[k - 1]);
  }
  // Endpoint on top of the threshold: no convergence claim.
  EXPECT_FALSE(endpoint_consistency(law, 0.1, s).applicable);
}

TEST(EmbeddedPath, IntegerSamplesAreMasses) {
  Rng env_rng = make_rng(53, 0, 0);
  const DynEnv env = random_env_fuzzer(6, 4, env_rng);
  Rng rng = make_rng(53, 1, 0);
  const std::vector<double> q{0.25, 0.75};
  const auto path = simulate_embedded_path(env, 0, 4, q, BridgeMode::kJointPath, rng);
  ASSERT_EQ(path.sets.size(), 5u);
  ASSERT_EQ(path.masses.size(), 5u);
  for (const auto& sample : path.m_samples) {
    const double whole = std::floor(sample.u);
    if (sample.u == whole) {
      EXPECT_NEAR(sample.m, path.masses[static_cast<std::size_t>(whole)], 1e-12);
    }
    EXPECT_GE(sample.m, 0.0);
  }
  for (std::size_t i = 0; i < path.uniforms.size(); ++i) {
    EXPECT_DOUBLE_EQ(path.uniforms[i], normal_cdf(path.brownian_incs[i]));
  }
}

TEST(EmbeddedPath, MartingaleMeanOverReplicas) {
  const DynEnv env = e3_env(3);
  const std::vector<double> q{0.5};
  MomentAccumulator at_half;
  MomentAccumulator at_end;
  for (int r = 0; r < 20000; ++r) {
    Rng rng = make_rng(54, 0, r);
    const auto path = simulate_embedded_path(env, 0, 3, q, BridgeMode::kIndependent, rng);
    for (const auto& sample : path.m_samples) {
      if (sample.u == 1.5) at_half.add(sample.m);
    }
    at_end.add(path.masses.back());
  }
  const auto h = at_half.result();
  const auto e = at_end.result();
  EXPECT_LE(std::abs(h.mean - 2.0), 4.0 * h.std_error());
  EXPECT_LE(std::abs(e.mean - 2.0), 4.0 * e.std_error());
}
