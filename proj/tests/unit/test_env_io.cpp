#include <gtest/gtest.h>

#include "evoset/env_io.hpp"
#include "evoset/error.hpp"
#include "evoset/monotonicity.hpp"

using namespace evoset;

TEST(EnvDocument, ExplicitGraphParses) {
  const DynEnv env = parse_env_document(R"({
    "vertices": ["a", "b", "c"], "horizon": 3,
    "edges": [{"u": "a", "v": "b", "weight": 1.5},
              {"u": "b", "v": "c", "weight": 1, "changes": [[2, 3.0]]},
              {"u": "c", "v": "c", "weight": 0.5}]})");
  EXPECT_EQ(env.num_vertices(), 3u);
  EXPECT_EQ(env.horizon(), 3);
  const Vertex b = *env.find_vertex("b");
  const Vertex c = *env.find_vertex("c");
  EXPECT_DOUBLE_EQ(env.vertex_conductance(1, b), 2.5);
  EXPECT_DOUBLE_EQ(env.vertex_conductance(2, b), 4.5);
  EXPECT_DOUBLE_EQ(env.vertex_conductance(2, c), 3.5);
}

TEST(EnvDocument, VertexCountForm) {
  const DynEnv env = parse_env_document(R"({"vertices": 2, "horizon": 0,
    "edges": [{"u": "0", "v": "1", "weight": 2}]})");
  EXPECT_EQ(env.label(1), "1");
  EXPECT_DOUBLE_EQ(env.vertex_conductance(0, 0), 2.0);
}

TEST(EnvDocument, RoundTripKeepsDigest) {
  BoxSpec spec;
  spec.dim = 2;
  spec.side = 4;
  spec.boundary = Boundary::kWired;
  spec.weight_max = 2.0;
  spec.changes = 6;
  spec.change_horizon = 3;
  spec.horizon = 4;
  const DynEnv env = zd_box(spec);
  const DynEnv back = parse_env_document(env_document(env));
  EXPECT_EQ(env_digest(env), env_digest(back));
  ASSERT_NE(back.lattice(), nullptr);
  EXPECT_EQ(back.lattice()->exterior, env.lattice()->exterior);
  for (Time t = 0; t <= 4; ++t) {
    for (Vertex x = 0; x < env.num_vertices(); ++x) {
      EXPECT_EQ(env.vertex_conductance(t, x), back.vertex_conductance(t, x));
    }
  }
}

TEST(EnvDocument, DigestSeesWeightChanges) {
  EXPECT_NE(env_digest(e2_env(2, 1.0)), env_digest(e2_env(2, 2.0)));
  EXPECT_EQ(env_digest(e2_env(2, 2.0)), env_digest(e2_env(2, 2.0)));
}

TEST(EnvDocument, ErrorsAreConfigErrors) {
  for (const char* doc : {"{not json", R"({"generator": "zd_box", "L": 3})", R"({"generator": "nope"})",
                          R"({"vertices": ["a"], "horizon": 1, "edges": [{"u": "a", "v": "q", "weight": 1}]})"}) {
    try {
      parse_env_document(doc);
      ADD_FAILURE() << doc;
    } catch (const Error& e) {
      EXPECT_TRUE(e.code() == ErrorCode::kConfig || e.code() == ErrorCode::kUnknownVertex) << doc;
    }
  }
}

TEST(ZdBox, FreeBoxCounts) {
  BoxSpec spec;
  spec.dim = 3;
  spec.side = 4;
  const DynEnv env = zd_box(spec);
  EXPECT_EQ(env.num_vertices(), 64u);
  // 3 * 4 * 4 * 3 lattice edges plus 64 loops.
  EXPECT_EQ(env.num_edges(), 144u + 64u);
  EXPECT_DOUBLE_EQ(laziness_coefficient(env), 0.5);
}

TEST(ZdBox, WiredExteriorCarriesMissingEdges) {
  BoxSpec spec;
  spec.dim = 2;
  spec.side = 3;
  spec.boundary = Boundary::kWired;
  const DynEnv env = zd_box(spec);  // unit weights
  const auto* lat = env.lattice();
  ASSERT_NE(lat, nullptr);
  ASSERT_TRUE(lat->exterior.has_value());
  const Vertex ext = *lat->exterior;
  // Corner: 2 missing lattice edges; side middle: 1; centre: 0.
  EXPECT_DOUBLE_EQ(env.conductance(0, 0, ext), 2.0);
  EXPECT_DOUBLE_EQ(env.conductance(0, 1, ext), 1.0);
  EXPECT_DOUBLE_EQ(env.conductance(0, 4, ext), 0.0);
  // Every lattice vertex then has off-diagonal conductance 2d = 4.
  for (Vertex v = 0; v < 9; ++v) EXPECT_DOUBLE_EQ(env.vertex_conductance(0, v), 8.0);
  EXPECT_EQ(*lat->origin, 4u);
  EXPECT_TRUE(lat->on_box_face(0));
  EXPECT_FALSE(lat->on_box_face(4));
}

TEST(ZdBox, ScheduleIsNonDecreasingAndElliptic) {
  BoxSpec spec;
  spec.dim = 2;
  spec.side = 5;
  spec.weight_min = 0.5;
  spec.weight_max = 2.0;
  spec.changes = 40;
  spec.change_horizon = 8;
  spec.horizon = 10;
  const DynEnv env = zd_box(spec);
  EXPECT_TRUE(monotonicity_report(env).is_nondecreasing);
  for (EdgeId e = 0; e < env.num_edges(); ++e) {
    if (env.edge(e).is_loop()) continue;
    for (const auto& c : env.schedule(e)) {
      EXPECT_GE(c.value, 0.5);
      EXPECT_LE(c.value, 2.0);
    }
  }
}

TEST(HandGraphs, E3Values) {
  const DynEnv env = e3_env(2);
  EXPECT_DOUBLE_EQ(env.vertex_conductance(0, 1), 3.0);
  EXPECT_DOUBLE_EQ(env.vertex_conductance(1, 1), 4.0);
  EXPECT_DOUBLE_EQ(env.vertex_conductance(1, 2), 3.0);
}
