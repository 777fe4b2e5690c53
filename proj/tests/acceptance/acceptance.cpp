// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Exact checks compare the library against the dense and
// brute-force references in tests/support.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "evoset/config.hpp"
#include "evoset/coupling.hpp"
#include "evoset/embedding.hpp"
#include "evoset/env_io.hpp"
#include "evoset/evolving_set.hpp"
#include "evoset/exact_chain.hpp"
#include "evoset/fuzz.hpp"
#include "evoset/identities.hpp"
#include "evoset/isoperimetry.hpp"
#include "evoset/monotonicity.hpp"
#include "evoset/parallel.hpp"
#include "evoset/run.hpp"
#include "evoset/stats.hpp"
#include "oracles.hpp"

using namespace evoset;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kMaster = 20240601;
constexpr double kTol = 1e-12;

struct Verdict {
  bool pass = true;
  std::string detail;
  double seconds = 0.0;
};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

// The fuzz corpus shared by the exact criteria.
std::vector<DynEnv> fuzz_corpus(std::size_t count, std::size_t max_n, Time max_h, std::uint64_t stream) {
  std::vector<DynEnv> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Rng rng = make_rng(kMaster, stream, i);
    const std::size_t n = 2 + rng() % (max_n - 1);
    const Time h = 1 + static_cast<Time>(rng() % static_cast<std::uint64_t>(max_h));
    out.push_back(random_env_fuzzer(n, h, rng));
  }
  return out;
}

Verdict duality(const std::vector<DynEnv>& envs) {
  double worst = 0.0;
  double worst_oracle = 0.0;
  std::size_t rational_misses = 0;
  std::size_t entries = 0;
  for (const DynEnv& env : envs) {
    const std::size_t n = env.num_vertices();
    for (Vertex x = 0; x < n; ++x) {
      for (Time t = 0; t <= env.horizon(); ++t) {
        const auto k = multi_step_kernel<double>(env, 0, t);
        const auto kr = multi_step_kernel<Rational>(env, 0, t);
        const auto dense = oracle::kernel<double>(env, 0, t);
        const auto sd = exact_set_distribution<double>(env, x, t);
        const auto sr = exact_set_distribution<Rational>(env, x, t);
        const Rational pi0 = ScalarTraits<Rational>::from_double(env.vertex_conductance(0, x));
        for (Vertex y = 0; y < n; ++y) {
          const double dual = env.vertex_conductance(t, y) / env.vertex_conductance(0, x) * sd.membership(y);
          worst = std::max(worst, std::abs(k(x, y) - dual));
          worst_oracle = std::max(worst_oracle, std::abs(dense[x][y] - k(x, y)));
          const Rational pit = ScalarTraits<Rational>::from_double(env.vertex_conductance(t, y));
          if (kr(x, y) != pit / pi0 * sr.membership(y)) ++rational_misses;
          ++entries;
        }
      }
    }
  }
  Verdict o;
  o.pass = worst <= kTol && worst_oracle <= kTol && rational_misses == 0;
  o.detail = std::to_string(envs.size()) + " envs, " + std::to_string(entries) + " (x,y,t) entries; max |P - dual| " +
             fmt(worst) + ", max |P - dense oracle| " + fmt(worst_oracle) + ", rational mismatches " +
             std::to_string(rational_misses);
  return o;
}

Verdict martingale() {
  const LawAudit audit = law_audit();
  Verdict o;
  o.pass = audit.laws > 0 && audit.max_gap <= kTol;
  o.detail = std::to_string(audit.laws) + " successor laws audited, max |E mass - source| " + fmt(audit.max_gap);
  return o;
}

Verdict drift(const std::vector<DynEnv>& envs) {
  const std::vector<double> alphas{0.25, 0.5, 0.75, 1.5, 2.0};
  std::size_t checked = 0;
  std::size_t failures = 0;
  double worst = std::numeric_limits<double>::infinity();
  for (const DynEnv& env : envs) {
    const double gamma = std::min(laziness_coefficient(env), 0.5);
    const DriftSweep s = drift_sweep(env, alphas, gamma, false);
    checked += s.checked;
    failures += s.failures;
    worst = std::min(worst, s.worst_margin);
  }
  Verdict o;
  o.pass = failures == 0 && checked > 0;
  o.detail = std::to_string(checked) + " (state, alpha) checks, " + std::to_string(failures) +
             " failures, smallest margin " + fmt(worst);
  return o;
}

Verdict coupling() {
  const auto envs = fuzz_corpus(150, 6, 3, 41);
  double x_gap = 0.0;
  double s_gap = 0.0;
  double cond_gap = 0.0;
  double oracle_gap = 0.0;
  std::size_t trajectories = 0;
  for (const DynEnv& env : envs) {
    for (Vertex x = 0; x < env.num_vertices(); ++x) {
      const auto r = verify_coupling<double>(env, x, env.horizon());
      x_gap = std::max(x_gap, r.x_marginal_gap);
      s_gap = std::max(s_gap, r.s_marginal_gap);
      cond_gap = std::max(cond_gap, r.conditional_gap);
      trajectories += r.trajectories;
      // Walker marginal of the joint law against the dense reference.
      const auto joint = joint_exact_distribution<double>(env, x, env.horizon());
      const auto dense = oracle::kernel<double>(env, 0, env.horizon());
      std::vector<double> marginal(env.num_vertices(), 0.0);
      for (const auto& [key, p] : joint) marginal[key.first] += p;
      for (Vertex y = 0; y < env.num_vertices(); ++y) {
        oracle_gap = std::max(oracle_gap, std::abs(marginal[y] - dense[x][y]));
      }
    }
  }
  Verdict o;
  o.pass = x_gap <= kTol && s_gap <= kTol && cond_gap <= kTol && oracle_gap <= kTol;
  o.detail = std::to_string(envs.size()) + " envs, " + std::to_string(trajectories) + " trajectories; X gap " +
             fmt(x_gap) + ", S gap " + fmt(s_gap) + ", conditional gap " + fmt(cond_gap) + ", dense oracle gap " +
             fmt(oracle_gap);
  return o;
}

Verdict complement() {
  double worst = 0.0;
  double worst_oracle = 0.0;
  std::size_t checks = 0;
  for (std::size_t i = 0; i < 100; ++i) {
    Rng rng = make_rng(kMaster, 51, i);
    const std::size_t n = 2 + rng() % 7;
    const Time h = 1 + static_cast<Time>(rng() % 4);
    const DynEnv env = random_constant_pi_env(n, h, rng);
    const Mask full = (Mask{1} << n) - 1;
    for (int k = 0; k < 6; ++k) {
      const Mask a = rng() & full;
      const Time t = static_cast<Time>(rng() % static_cast<std::uint64_t>(h));
      worst = std::max(worst, complement_dual_check<double>(env, t, a).max_deviation);
      const auto forward = oracle::successor_law(env, t, a);
      const auto backward = oracle::successor_law(env, t, full & ~a);
      for (const auto& [b, p] : forward) {
        const auto it = backward.find(full & ~b);
        worst_oracle = std::max(worst_oracle, std::abs(p - (it == backward.end() ? 0.0 : it->second)));
      }
      for (const auto& [bc, p] : backward) {
        if (!forward.count(full & ~bc)) worst_oracle = std::max(worst_oracle, p);
      }
      ++checks;
    }
  }
  Verdict o;
  o.pass = worst <= kTol && worst_oracle <= kTol;
  o.detail = "100 constant-conductance envs, " + std::to_string(checks) + " random sets; max deviation " +
             fmt(worst) + ", oracle " + fmt(worst_oracle);
  return o;
}

Verdict embedding(const std::vector<DynEnv>& envs) {
  double start_gap = 0.0;
  for (const DynEnv& env : envs) start_gap = std::max(start_gap, embedding_start_gap(env));

  // Intra-step mean of M_{i+s}: B_{i+s} - B_i drawn through the bridge given a
  // standard normal endpoint.
  std::size_t mean_checks = 0;
  std::size_t mean_fails = 0;
  double worst_z = 0.0;
  for (std::size_t i = 0; i < 8; ++i) {
    const DynEnv& env = envs[i];
    Rng rng = make_rng(kMaster, 61, i);
    const Mask a = 1 + rng() % ((Mask{1} << env.num_vertices()) - 1);
    const auto law = successor_law(env, make_state<double>(env, 0, a));
    for (double s : {0.25, 0.5, 0.9}) {
      MomentAccumulator acc;
      for (int draw = 0; draw < 100000; ++draw) {
        const double e = standard_normal(rng);
        acc.add(m_interpolate(law, s, sample_bridge(e, s, rng)));
      }
      const auto m = acc.result();
      const double z = std::abs(m.mean - law.source_mass) / m.std_error();
      worst_z = std::max(worst_z, z);
      ++mean_checks;
      if (z > 4.0) ++mean_fails;
    }
  }

  const std::vector<double> s_values{0.9, 0.99, 0.999};
  std::size_t applicable = 0;
  std::size_t endpoint_fails = 0;
  for (std::size_t i = 0; i < envs.size(); ++i) {
    const DynEnv& env = envs[i];
    Rng rng = make_rng(kMaster, 62, i);
    const Mask a = 1 + rng() % ((Mask{1} << env.num_vertices()) - 1);
    const auto law = successor_law(env, make_state<double>(env, 0, a));
    for (int k = 0; k < 4; ++k) {
      const auto c = endpoint_consistency(law, 2.0 * standard_normal(rng), s_values);
      if (!c.applicable) continue;
      ++applicable;
      if (!c.pass) ++endpoint_fails;
    }
  }
  Verdict o;
  o.pass = start_gap <= kTol && mean_fails == 0 && applicable > 0 && endpoint_fails == 0;
  o.detail = "s=0 gap " + fmt(start_gap) + "; " + std::to_string(mean_checks) + " bridge means of 1e5 draws, worst " +
             fmt(worst_z) + " sigma; endpoint limit " + std::to_string(applicable - endpoint_fails) + "/" +
             std::to_string(applicable) + " non-tie cases";
  return o;
}

double metric(const RunReport& r, const std::string& key) {
  for (const auto& [k, v] : r.metrics) {
    if (k == key) return v;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

RunReport run_shipped(const std::string& config_name, std::size_t workers) {
  const ExperimentConfig cfg = load_config_file(std::string(EVOSET_CONFIG_DIR) + "/" + config_name);
  const fs::path out = fs::path(EVOSET_ACCEPTANCE_OUT) / fs::path(config_name).stem();
  return execute_task(cfg, out, workers);
}

std::string failing_records(const RunReport& r) {
  std::string s;
  for (const auto& rec : r.records) {
    if (!rec.pass) s += " [failed: " + rec.name + " measured " + fmt(rec.measured) + "]";
  }
  return s;
}

Verdict decay(std::size_t workers) {
  const RunReport r = run_shipped("decay_box10.json", workers);
  Verdict o;
  o.pass = r.all_pass();
  o.detail = "side-10 wired box to t=200: envelope running max " + fmt(metric(r, "envelope_running_max")) +
             ", " + std::to_string(r.records.size()) + " records" + failing_records(r);
  return o;
}

Verdict csrw(std::size_t workers) {
  const RunReport r = run_shipped("csrw_e2.json", workers);
  Verdict o;
  o.pass = r.all_pass();
  std::ostringstream d;
  d << r.records.size() << " records over 1e4 paths to t=50";
  for (const auto& rec : r.records) d << "; " << rec.name << " " << fmt(rec.measured) << " vs " << fmt(rec.tolerance);
  o.detail = d.str();
  return o;
}

Verdict percolation(std::size_t workers) {
  const RunReport r = run_shipped("percolation_d3.json", workers);
  Verdict o;
  o.pass = r.all_pass();
  o.detail = "late-return fraction " + fmt(metric(r, "late_return_fraction")) + " vs d=1 control " +
             fmt(metric(r, "control_late_return_fraction")) + ", kill fraction " +
             fmt(metric(r, "kill_fraction")) + ", cluster fraction " + fmt(metric(r, "cluster_fraction")) +
             failing_records(r);
  return o;
}

// Graphs of 9..16 vertices: free lattice boxes and sparse random graphs.
std::vector<DynEnv> larger_graphs() {
  std::vector<DynEnv> out;
  for (int side : {3, 4}) {
    BoxSpec spec;
    spec.dim = 2;
    spec.side = side;
    spec.weight_min = 1.0;
    spec.weight_max = 3.0;
    spec.changes = 6;
    spec.change_horizon = 2;
    spec.horizon = 2;
    spec.seed = 7 + side;
    out.push_back(zd_box(spec));
  }
  for (std::size_t i = 0; i < 12; ++i) {
    Rng rng = make_rng(kMaster, 71, i);
    const std::size_t n = 9 + rng() % 8;
    EnvBuilder b;
    b.add_vertices(n);
    std::set<std::pair<Vertex, Vertex>> present;
    // Random spanning tree, then about n / 2 extra chords.
    for (Vertex v = 1; v < n; ++v) {
      const Vertex u = static_cast<Vertex>(rng() % v);
      present.insert({u, v});
      b.add_edge(u, v, 0.5 + static_cast<double>(rng() % 8) / 4.0);
    }
    for (std::size_t k = 0; k < n / 2; ++k) {
      const Vertex u = static_cast<Vertex>(rng() % n);
      const Vertex v = static_cast<Vertex>(rng() % n);
      if (u != v && present.insert(std::minmax(u, v)).second) {
        b.add_edge(u, v, 0.25 + static_cast<double>(rng() % 4) / 4.0);
      }
    }
    for (Vertex v = 0; v < n; ++v) b.add_edge(v, v, 1.0);
    b.set_horizon(1);
    out.push_back(b.build());
  }
  return out;
}

Verdict isoperimetry(const std::vector<DynEnv>& fuzzed) {
  std::vector<const DynEnv*> graphs;
  for (const DynEnv& env : fuzzed) graphs.push_back(&env);
  const std::vector<DynEnv> larger = larger_graphs();
  for (const DynEnv& env : larger) graphs.push_back(&env);

  double worst = 0.0;
  std::size_t comparisons = 0;
  std::size_t singleton_violations = 0;
  std::size_t max_vertices = 0;
  for (const DynEnv* env : graphs) {
    max_vertices = std::max(max_vertices, env->num_vertices());
    for (Time t = 0; t <= env->horizon(); ++t) {
      for (double d : {2.0, 3.0}) {
        IsoConfig cfg;
        cfg.d = d;
        cfg.mode = IsoMode::kExact;
        const KappaResult lib = kappa_detail(*env, t, cfg);
        const oracle::BruteKappa brute = oracle::kappa(*env, t, d, false, false);
        worst = std::max(worst, std::abs(lib.value - brute.value));
        ++comparisons;
        // Independent singleton bound from the vertex conductances.
        double bound = std::numeric_limits<double>::infinity();
        for (Vertex v = 0; v < env->num_vertices(); ++v) {
          const double pv = env->vertex_conductance(t, v);
          if (pv > 0.0 && env->support(t).size() > 1) bound = std::min(bound, std::pow(pv, 1.0 / d));
        }
        if (lib.value > bound + kTol || brute.value > bound + kTol) ++singleton_violations;
      }
    }
  }
  Verdict o;
  o.pass = worst <= kTol && singleton_violations == 0;
  o.detail = std::to_string(comparisons) + " exact-mode comparisons on graphs up to " +
             std::to_string(max_vertices) + " vertices, max difference " + fmt(worst) +
             ", singleton-bound violations " + std::to_string(singleton_violations);
  return o;
}

template <class F>
Verdict timed(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  Verdict o = f();
  o.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return o;
}

}  // namespace

int main() {
  const std::size_t workers = worker_count_from_env();
  reset_law_audit();

  std::vector<DynEnv> fuzzed = fuzz_corpus(500, 8, 4, 31);
  fuzzed.push_back(e2_env(4));
  fuzzed.push_back(e2_env(4, 2.0));
  fuzzed.push_back(e3_env(4));

  const char* names[] = {"duality identity",
                         "martingale property of successor laws",
                         "drift inequalities",
                         "walk/set coupling",
                         "complement duality",
                         "continuous embedding",
                         "heat-kernel decay envelope",
                         "constant-speed walk by thinning",
                         "percolation transience trend",
                         "isoperimetric enumerators"};
  std::vector<Verdict> results(10);
  auto guarded = [&](std::size_t idx, auto&& f) {
    try {
      results[idx] = timed(f);
    } catch (const std::exception& e) {
      results[idx].pass = false;
      results[idx].detail = std::string("error: ") + e.what();
    }
  };
  guarded(0, [&] { return duality(fuzzed); });
  guarded(2, [&] { return drift(fuzzed); });
  guarded(3, [&] { return coupling(); });
  guarded(4, [&] { return complement(); });
  guarded(5, [&] { return embedding(fuzzed); });
  guarded(6, [&] { return decay(workers); });
  guarded(7, [&] { return csrw(workers); });
  guarded(8, [&] { return percolation(workers); });
  guarded(9, [&] { return isoperimetry(fuzzed); });
  // Audited over every law built above.
  guarded(1, [&] { return martingale(); });

  bool all = true;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const Verdict& o = results[i];
    all = all && o.pass;
    std::printf("%s %zu %s: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", i + 1, names[i], o.detail.c_str(), o.seconds);
  }
  std::fflush(stdout);
  return all ? 0 : 1;
}
