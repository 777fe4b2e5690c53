#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <utility>

#include "evoset/env_io.hpp"
#include "evoset/error.hpp"
#include "evoset/fuzz.hpp"
#include "evoset/isoperimetry.hpp"
#include "oracles.hpp"

using namespace evoset;

namespace {

IsoConfig half_volume(double d) {
  IsoConfig cfg;
  cfg.d = d;
  cfg.mode = IsoMode::kHalfVolume;
  return cfg;
}

DynEnv constant_path(std::size_t n, Time horizon) {
  EnvBuilder b;
  b.add_vertices(n);
  for (Vertex v = 0; v + 1 < n; ++v) b.add_edge(v, v + 1, 1.0);
  for (Vertex v = 0; v < n; ++v) b.add_edge(v, v, 1.0);
  b.set_horizon(horizon);
  return b.build();
}

}  // namespace

TEST(Kappa, TwoVertexHalfVolume) {
  const auto r = kappa_detail(e2_env(1), 0, half_volume(2.0));
  EXPECT_NEAR(r.value, 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_LE(r.value, r.singleton_bound);
}

TEST(Kappa, SingleVertexHasNoAdmissibleSet) {
  EnvBuilder b;
  b.add_vertices(1);
  b.add_edge(0, 0, 1.0);
  b.set_horizon(1);
  const auto r = kappa_detail(b.build(), 0, half_volume(2.0));
  EXPECT_EQ(r.value, 0.0);
  EXPECT_EQ(r.singleton_bound, std::numeric_limits<double>::infinity());
}

TEST(Kappa, AgreesWithBruteForce) {
  for (int i = 0; i < 60; ++i) {
    Rng rng = make_rng(41, 0, i);
    const DynEnv env = random_env_fuzzer(2 + i % 7, 2, rng);
    for (IsoMode mode : {IsoMode::kExact, IsoMode::kHalfVolume}) {
      for (Volume vol : {Volume::kConductance, Volume::kVertexCount}) {
        IsoConfig cfg;
        cfg.d = 1.5 + i % 3;
        cfg.mode = mode;
        cfg.volume = vol;
        const auto lib = kappa_detail(env, 1, cfg);
        const auto brute = oracle::kappa(env, 1, cfg.d, mode == IsoMode::kHalfVolume, vol == Volume::kVertexCount);
        EXPECT_NEAR(lib.value, brute.value, 1e-12);
        EXPECT_EQ(lib.subsets_scanned, brute.subsets);
        if (std::isinf(brute.singleton_bound)) {
          EXPECT_EQ(lib.singleton_bound, brute.singleton_bound);
        } else {
          EXPECT_NEAR(lib.singleton_bound, brute.singleton_bound, 1e-12);
        }
        EXPECT_LE(lib.value, lib.singleton_bound + 1e-12);
      }
    }
  }
}

TEST(Kappa, CountingVolumeMonotoneUnderEdgeAddition) {
  for (int i = 0; i < 30; ++i) {
    Rng rng = make_rng(42, 0, i);
    const std::size_t n = 3 + i % 5;
    EnvBuilder b;
    b.add_vertices(n);
    for (Vertex v = 0; v < n; ++v) b.add_edge(v, v, 1.0);
    std::uniform_int_distribution<Vertex> pick(0, static_cast<Vertex>(n - 1));
    std::set<std::pair<Vertex, Vertex>> present{{0, static_cast<Vertex>(n - 1)}};
    for (int k = 0; k < 4; ++k) {
      const Vertex u = pick(rng);
      const Vertex v = pick(rng);
      if (u != v && present.insert(std::minmax(u, v)).second) b.add_edge(u, v, 1.0);
    }
    const EdgeId added = b.add_edge(0, static_cast<Vertex>(n - 1), 0.0);
    b.add_change(added, 1.0, 1.0);
    b.set_horizon(1);
    const DynEnv env = b.build();
    IsoConfig cfg = half_volume(2.0);
    cfg.volume = Volume::kVertexCount;
    EXPECT_LE(kappa(env, 0, cfg), kappa(env, 1, cfg) + 1e-12);
  }
}

TEST(Kappa, EnumerationCap) {
  BoxSpec spec;
  spec.side = 5;  // 25 vertices
  spec.horizon = 1;
  try {
    kappa(zd_box(spec), 0, half_volume(2.0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kCapExceeded);
  }
}

TEST(Kappa, LatticeAnalyticNeedsWiredBox) {
  IsoConfig cfg;
  cfg.d = 2.0;
  cfg.mode = IsoMode::kLatticeAnalytic;
  EXPECT_THROW(kappa(e2_env(1), 0, cfg), Error);
  BoxSpec spec;
  spec.side = 3;
  spec.horizon = 1;
  spec.boundary = Boundary::kWired;
  const DynEnv box = zd_box(spec);
  const double k = kappa(box, 0, cfg);
  EXPECT_GT(k, 0.0);
  // Unit weights and every lattice vertex at pi = 8: w_min 2d pi_max^{-1/2}.
  EXPECT_NEAR(k, 4.0 / std::sqrt(8.0), 1e-12);
}

TEST(Psi, ConstantTwoVertex) {
  const DynEnv env = e2_env(4);
  IsoperimetricProfile profile(env, half_volume(2.0));
  EXPECT_NEAR(profile.psi(4, false), 2.0, 1e-14);
  EXPECT_NEAR(profile.psi(4, true), 2.0, 1e-14);
  EXPECT_EQ(profile.psi(0, false), 0.0);
}

TEST(RCondition, ConstantKappaPicksFirstAdmissible) {
  const DynEnv env = constant_path(3, 10);
  const RChoice r = r_condition(env, 0, 10, half_volume(2.0));
  ASSERT_TRUE(r.r.has_value());
  EXPECT_EQ(*r.r, 4);
  EXPECT_FALSE(r.degenerate);
}

TEST(RCondition, AdjacentTimesHaveNoInteriorPoint) {
  const RChoice r = r_condition(constant_path(3, 10), 3, 4, half_volume(2.0));
  EXPECT_FALSE(r.r.has_value());
  EXPECT_FALSE(r.degenerate);
  EXPECT_FALSE(r.diagnostic.empty());
}

TEST(RCondition, ZeroGrowthIsDegenerate) {
  EnvBuilder b;
  b.add_vertices(2);
  b.add_edge(0, 0, 1.0);
  b.add_edge(1, 1, 1.0);
  b.set_horizon(5);
  const RChoice r = r_condition(b.build(), 0, 5, half_volume(2.0));
  EXPECT_TRUE(r.degenerate);
  EXPECT_FALSE(r.r.has_value());
}

TEST(IsoConfig, Validation) {
  IsoConfig cfg;
  cfg.d = 0.5;
  EXPECT_THROW(cfg.validate(), Error);
  cfg.d = 2.0;
  cfg.lambda = 0.6;
  EXPECT_THROW(cfg.validate(), Error);
}
