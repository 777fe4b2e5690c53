#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <sstream>

#include "evoset/env_io.hpp"
#include "evoset/error.hpp"
#include "evoset/exact_chain.hpp"
#include "evoset/fuzz.hpp"
#include "evoset/isoperimetry.hpp"
#include "oracles.hpp"

using namespace evoset;

TEST(MultiStep, SameTimeIsIdentity) {
  const DynEnv env = e3_env(3);
  const auto k = multi_step_kernel<double>(env, 2, 2);
  for (Vertex x = 0; x < 3; ++x) {
    for (Vertex y = 0; y < 3; ++y) EXPECT_EQ(k(x, y), x == y ? 1.0 : 0.0);
  }
}

TEST(MultiStep, TwoVertexTwoSteps) {
  // Hand composition of the 1/2-1/2 kernel: (1/2)(1/2) + (1/2)(1/2).
  EXPECT_DOUBLE_EQ((multi_step_kernel<double>(e2_env(2), 0, 2)(0, 0)), 0.5);
  EXPECT_DOUBLE_EQ((multi_step_kernel<double>(e2_env(2, 2.0), 0, 2)(0, 0)), 0.5);
}

TEST(MultiStep, RationalE3IsExact) {
  const DynEnv env = e3_env(2);
  const auto k = multi_step_kernel<Rational>(env, 0, 2);
  // a -> a: stay twice (1/2 * 1/2) or go to b and back, where b has
  // conductance 4 once b - c has risen.
  const auto o = oracle::kernel<Rational>(env, 0, 2);
  for (Vertex x = 0; x < 3; ++x) {
    for (Vertex y = 0; y < 3; ++y) EXPECT_EQ(k(x, y), o[x][y]);
  }
  EXPECT_EQ(k(0, 0), Rational(1, 2) * Rational(1, 2) + Rational(1, 2) * Rational(1, 4));
}

TEST(MultiStep, AgreesWithDenseOracleOnFuzzedEnvs) {
  for (int i = 0; i < 60; ++i) {
    Rng rng = make_rng(5, 0, i);
    const DynEnv env = random_env_fuzzer(2 + i % 7, 1 + i % 4, rng);
    const auto k = multi_step_kernel<double>(env, 0, env.horizon());
    const auto o = oracle::kernel<double>(env, 0, env.horizon());
    for (Vertex x = 0; x < env.num_vertices(); ++x) {
      double row = 0.0;
      for (Vertex y = 0; y < env.num_vertices(); ++y) {
        EXPECT_NEAR(k(x, y), o[x][y], 1e-14);
        EXPECT_GE(k(x, y), 0.0);
        row += k(x, y);
      }
      EXPECT_NEAR(row, 1.0, 1e-12);
    }
  }
}

TEST(MultiStep, HorizonChecked) {
  EXPECT_THROW(multi_step_kernel<double>(e2_env(2), 0, 3), Error);
  EXPECT_THROW(multi_step_kernel<double>(e2_env(2), 2, 1), Error);
}

TEST(HeatKernel, TwoVertexValues) {
  const DynEnv env = e2_env(2);
  EXPECT_DOUBLE_EQ(heat_kernel(env, 0, 0, 1, 1), 0.25);
  EXPECT_DOUBLE_EQ(heat_kernel(env, 1, 0, 1, 0), 0.5);  // 1 / pi(a)
}

TEST(HeatKernel, DelayedWalkEqualsTransition) {
  EnvBuilder b;
  b.add_vertices(3);
  b.add_edge(0, 1, 0.3);
  b.add_edge(1, 2, 0.2);
  b.set_horizon(1);
  const DynEnv env = delayed_walk_env(b.build(), 0.5);
  for (Vertex x = 0; x < 3; ++x) {
    for (Vertex y = 0; y < 3; ++y) {
      EXPECT_NEAR(heat_kernel(env, 0, x, 1, y) * env.vertex_conductance(1, y), env.transition_prob(0, x, y), 1e-15);
    }
  }
}

TEST(HeatKernel, TargetOutsideSupport) {
  EnvBuilder b;
  b.add_vertices(2);
  b.add_edge(0, 0, 1.0);
  b.add_edge(1, 1, 0.0);
  b.set_horizon(1);
  const DynEnv env = b.build();
  EXPECT_THROW(heat_kernel(env, 0, 0, 1, 1), Error);
}

TEST(DecayEnvelope, TwoVertexBounded) {
  const DynEnv env = e2_env(64);
  IsoConfig cfg;
  cfg.d = 2.0;
  cfg.mode = IsoMode::kHalfVolume;
  IsoperimetricProfile profile(env, cfg);
  const auto env_points = decay_envelope(env, 0, 64, profile);
  ASSERT_EQ(env_points.size(), 64u);
  // t = 1: kernel 1/2 everywhere, so pi^(0)(x) h = 2 * (1/2) / 2.
  EXPECT_DOUBLE_EQ(env_points[0].sup_scaled, 0.5);
  EXPECT_NEAR(env_points[0].value, 0.5 * std::pow(std::exp(1.0) + env_points[0].psi_gap, 1.0), 1e-12);
  for (const auto& p : env_points) EXPECT_TRUE(std::isfinite(p.value));
}

TEST(DecayEnvelope, CompensatesAUniformDrop) {
  // Halving every weight is undone by beta, so the envelope is still defined.
  const DynEnv env = e2_env(4, 0.5);
  IsoConfig cfg;
  IsoperimetricProfile profile(env, cfg);
  EXPECT_EQ(decay_envelope(env, 0, 4, profile).size(), 4u);
}

TEST(DecayEnvelope, RejectsAVertexLeavingTheSupport) {
  EnvBuilder b;
  b.add_vertices(2);
  const EdgeId edge = b.add_edge(0, 1, 1.0);
  b.add_edge(0, 0, 1.0);
  const EdgeId loop = b.add_edge(1, 1, 1.0);
  b.add_change(edge, 2.0, 0.0);
  b.add_change(loop, 2.0, 0.0);
  b.set_horizon(3);
  const DynEnv env = b.build();
  IsoConfig cfg;
  IsoperimetricProfile profile(env, cfg);
  EXPECT_THROW(decay_envelope(env, 0, 3, profile), Error);
}

TEST(KernelCsv, NonzeroEntriesWithLabels) {
  const DynEnv env = e2_env(1);
  std::ostringstream out;
  write_kernel_csv(out, env, multi_step_kernel<double>(env, 0, 1));
  EXPECT_EQ(out.str(), "s,t,x,y,prob\n0,1,a,a,0.5\n0,1,a,b,0.5\n0,1,b,a,0.5\n0,1,b,b,0.5\n");
}

TEST(KernelCache, StoreThenLoad) {
  const auto dir = std::filesystem::temp_directory_path() / "evoset_kernel_cache_test";
  std::filesystem::remove_all(dir);
  KernelCache cache(dir);
  const DynEnv env = e3_env(3);
  EXPECT_FALSE(cache.load(env, 0, 2).has_value());
  const auto k = multi_step_kernel<double>(env, 0, 2);
  cache.store(env, k);
  const auto back = cache.load(env, 0, 2);
  ASSERT_TRUE(back.has_value());
  EXPECT_EQ(back->data(), k.data());
  EXPECT_FALSE(cache.load(e2_env(3), 0, 2).has_value());
  std::filesystem::remove_all(dir);
}
