#include <algorithm>
#include <bit>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "evoset/config.hpp"
#include "evoset/coupling.hpp"
#include "evoset/csrw.hpp"
#include "evoset/drift.hpp"
#include "evoset/embedding.hpp"
#include "evoset/env_io.hpp"
#include "evoset/error.hpp"
#include "evoset/exact_chain.hpp"
#include "evoset/fuzz.hpp"
#include "evoset/identities.hpp"
#include "evoset/isoperimetry.hpp"
#include "evoset/monotonicity.hpp"
#include "evoset/parallel.hpp"
#include "evoset/percolation.hpp"
#include "evoset/run.hpp"
#include "evoset/stats.hpp"

namespace evoset {

namespace {

// Stream ids for make_rng(master, stream, replica).
enum Stream : std::uint64_t {
  kFuzzStream = 1,
  kSetStream = 2,
  kEmbeddingStream = 3,
  kCsrwStream = 4,
  kGrowthStream = 5,
  kWalkStream = 6,
  kControlStream = 7,
  kConstantPiStream = 8,
  kComplementStream = 9,
};

constexpr double kExactTol = 1e-12;
const std::vector<double> kDefaultAlphas = {0.25, 0.5, 0.75, 1.5, 2.0};

class CsvFile {
 public:
  CsvFile(const std::filesystem::path& dir, const std::string& name, RunReport& report)
      : out_(dir / name) {
    if (!out_) fail(ErrorCode::kIo, "cannot write " + name);
    out_.precision(17);
    report.artifacts.push_back(name);
  }
  std::ofstream& operator*() { return out_; }
  std::ofstream* operator->() { return &out_; }

 private:
  std::ofstream out_;
};

DynEnv load_env(const ExperimentConfig& cfg) { return parse_env_document(*cfg.env_document); }

Vertex resolve_vertex(const DynEnv& env, const std::string& label, const std::string& field) {
  if (auto v = env.find_vertex(label)) return *v;
  fail(ErrorCode::kConfig, field + ": unknown vertex '" + label + "'");
}

std::string fmt(double x) {
  std::ostringstream s;
  s.precision(6);
  s << x;
  return s.str();
}

bool all_vertices_supported(const DynEnv& env) {
  for (Time t = 0; t <= env.horizon(); ++t) {
    if (env.support(t).size() != env.num_vertices()) return false;
  }
  return true;
}

// ---------------------------------------------------------------- identities

struct IdentityTotals {
  std::size_t envs = 0;
  double row_sum = 0.0;
  double reversibility = 0.0;
  double compensated = 0.0;
  std::size_t duality_envs = 0;
  double duality = 0.0;
  std::size_t rational_envs = 0;
  std::size_t rational_mismatches = 0;
  std::size_t drift_checked = 0;
  std::size_t drift_failures = 0;
  double drift_margin = std::numeric_limits<double>::infinity();
  double embedding = 0.0;
  std::size_t coupling_envs = 0;
  double coupling = 0.0;
  std::size_t complement_envs = 0;
  double complement = 0.0;
  bool complement_pass = true;
  std::vector<std::string> skipped;
};

void check_identities(const DynEnv& env, const std::string& source, IdentityTotals& tot, Rng& rng) {
  ++tot.envs;
  tot.row_sum = std::max(tot.row_sum, row_sum_gap(env));
  tot.reversibility = std::max(tot.reversibility, reversibility_gap(env));

  MonotonicityReport mono;
  try {
    mono = monotonicity_report(env);
  } catch (const Error& e) {
    tot.skipped.push_back(source + ": " + e.what());
    return;
  }
  tot.compensated = std::max(tot.compensated, compensated_drop(env));
  if (!mono.is_nondecreasing) {
    tot.skipped.push_back(source + ": vertex conductances decrease; set-process checks skipped");
    return;
  }
  const std::size_t n = env.num_vertices();
  if (n > kMaxSetDpVertices) {
    tot.skipped.push_back(source + ": too many vertices for the set DP");
    return;
  }

  ++tot.duality_envs;
  tot.duality = std::max(tot.duality, duality_gap<double>(env, env.horizon()));
  if (n <= 8) {
    ++tot.rational_envs;
    if (duality_gap<Rational>(env, env.horizon()) != 0) ++tot.rational_mismatches;
  }

  const double lazy = laziness_coefficient(env);
  if (lazy > 0.0) {
    const auto sweep = drift_sweep(env, kDefaultAlphas, std::min(lazy, 0.5), false);
    tot.drift_checked += sweep.checked;
    tot.drift_failures += sweep.failures;
    if (sweep.checked > 0) tot.drift_margin = std::min(tot.drift_margin, sweep.worst_margin);
  }
  tot.embedding = std::max(tot.embedding, embedding_start_gap(env));

  if (n <= 6) {
    ++tot.coupling_envs;
    const Time t = std::min<Time>(env.horizon(), 3);
    for (Vertex x = 0; x < n; ++x) {
      if (!env.in_support(0, x)) continue;
      const auto r = verify_coupling<double>(env, x, t);
      tot.coupling = std::max({tot.coupling, r.x_marginal_gap, r.s_marginal_gap, r.conditional_gap});
    }
  }
  if (n >= 2 && env.horizon() >= 1 && has_constant_vertex_conductance(env) && all_vertices_supported(env)) {
    ++tot.complement_envs;
    const auto c = complement_sweep(env, 16, rng);
    tot.complement = std::max(tot.complement, c.max_deviation);
    tot.complement_pass = tot.complement_pass && c.pass;
  }
}

void emit_identity_records(RunReport& report, const IdentityTotals& tot, const std::string& source) {
  const std::string tag = source + " (" + std::to_string(tot.envs) + " envs)";
  report.add_bound("transition-rule", tag + " row sums", tot.row_sum, kExactTol);
  report.add_bound("transition-rule", tag + " reversibility", tot.reversibility, kExactTol);
  report.add_bound("effective-monotonicity", tag + " compensated conductance never drops", tot.compensated,
                   kExactTol);
  if (tot.duality_envs > 0) {
    report.add_bound("duality-identity", tag + " kernel vs set membership", tot.duality, kExactTol,
                     std::to_string(tot.duality_envs) + " envs checked");
  }
  if (tot.rational_envs > 0) {
    report.add("duality-identity", tag + " kernel vs set membership, rational", tot.rational_mismatches == 0,
               static_cast<double>(tot.rational_mismatches), 0.0, std::to_string(tot.rational_envs) + " envs");
  }
  if (tot.drift_checked > 0) {
    report.add("drift-bounds", tag + " drift inequalities", tot.drift_failures == 0,
               static_cast<double>(tot.drift_failures), 0.0,
               std::to_string(tot.drift_checked) + " checks, worst slack " + fmt(tot.drift_margin));
  }
  if (tot.duality_envs > 0) {
    report.add_bound("continuous-embedding", tag + " M at s = 0 equals the set mass", tot.embedding, kExactTol);
  }
  if (tot.coupling_envs > 0) {
    report.add_bound("coupling", tag + " marginals and uniform conditional", tot.coupling, kExactTol,
                     std::to_string(tot.coupling_envs) + " envs");
  }
  if (tot.complement_envs > 0) {
    report.add("complement-duality", tag + " K(A, B) = K(A^c, B^c)", tot.complement_pass, tot.complement, kExactTol,
               std::to_string(tot.complement_envs) + " envs");
  }
  for (const auto& s : tot.skipped) report.note("skipped", s);
}

void verify_identities(const ExperimentConfig& cfg, const std::filesystem::path& out, RunReport& report) {
  reset_law_audit();
  const DynEnv env = load_env(cfg);
  report.env_digest = env_digest(env);
  Rng rng = make_rng(cfg.master_seed(), kComplementStream, 0);

  IdentityTotals given;
  check_identities(env, "env", given, rng);
  emit_identity_records(report, given, "env");

  if (cfg.fuzz.count > 0) {
    IdentityTotals fuzzed;
    for (std::size_t i = 0; i < cfg.fuzz.count; ++i) {
      Rng frng = make_rng(cfg.master_seed(), kFuzzStream, i);
      const std::size_t n = std::uniform_int_distribution<std::size_t>(2, cfg.fuzz.max_vertices)(frng);
      const Time h = std::uniform_int_distribution<Time>(1, std::max<Time>(1, cfg.fuzz.max_horizon))(frng);
      check_identities(random_env_fuzzer(n, std::min(h, cfg.fuzz.max_horizon), frng), "fuzz#" + std::to_string(i),
                       fuzzed, rng);
    }
    emit_identity_records(report, fuzzed, "fuzz");
  }
  if (cfg.fuzz.constant_pi_count > 0) {
    IdentityTotals constant;
    for (std::size_t i = 0; i < cfg.fuzz.constant_pi_count; ++i) {
      Rng frng = make_rng(cfg.master_seed(), kConstantPiStream, i);
      const std::size_t n = std::uniform_int_distribution<std::size_t>(2, cfg.fuzz.max_vertices)(frng);
      const Time h = std::uniform_int_distribution<Time>(1, std::max<Time>(1, cfg.fuzz.max_horizon))(frng);
      check_identities(random_constant_pi_env(n, std::min(h, cfg.fuzz.max_horizon), frng),
                       "constant#" + std::to_string(i), constant, rng);
    }
    emit_identity_records(report, constant, "constant-pi fuzz");
  }

  const LawAudit audit = law_audit();
  report.add_bound("martingale", "every successor law conserves expected mass", audit.max_gap, kExactTol,
                   std::to_string(audit.laws) + " laws audited");

  CsvFile csv(out, "identities.csv", report);
  *csv << "anchor,check,measured,tolerance,pass\n";
  for (const auto& r : report.records) {
    *csv << r.anchor << ",\"" << r.name << "\"," << r.measured << ',' << r.tolerance << ',' << (r.pass ? 1 : 0)
         << '\n';
  }
}

// --------------------------------------------------------------------- drift

void drift_suite(const ExperimentConfig& cfg, const std::filesystem::path& out, RunReport& report) {
  const DynEnv env = load_env(cfg);
  report.env_digest = env_digest(env);
  const double lazy = laziness_coefficient(env);
  double gamma = cfg.drift.gamma.value_or(std::min(lazy, 0.5));
  if (!(gamma > 0.0)) fail(ErrorCode::kConfig, "drift.gamma: environment has zero laziness");
  if (gamma > lazy) {
    fail(ErrorCode::kConfig, "drift.gamma: " + fmt(gamma) + " exceeds the laziness " + fmt(lazy));
  }
  report.metric("gamma", gamma);
  report.metric("laziness", lazy);

  CsvFile csv(out, "drift.csv", report);
  *csv << "source,replica,t,size,mass,alpha,lhs,rhs,r,pass\n";
  std::size_t checked = 0;
  std::size_t failures = 0;
  double worst = std::numeric_limits<double>::infinity();
  auto tally = [&](const DriftResult& r, double alpha) {
    ++checked;
    failures += r.pass ? 0 : 1;
    worst = std::min(worst, alpha < 1.0 ? r.rhs - r.lhs : r.lhs - r.rhs);
  };

  if (env.num_vertices() <= kMaxSetDpVertices) {
    const auto sweep = drift_sweep(env, cfg.drift.alphas, gamma, true);
    for (const auto& row : sweep.rows) {
      tally(row.result, row.alpha);
      *csv << "exact,0," << row.t << ',' << std::popcount(row.set) << ',' << row.mass << ',' << row.alpha << ','
           << row.result.lhs << ',' << row.result.rhs << ',' << row.result.r << ',' << (row.result.pass ? 1 : 0)
           << '\n';
    }
  } else {
    const Vertex start = resolve_vertex(env, cfg.start.value_or(env.label(0)), "start");
    const Time steps = cfg.steps.value_or(env.horizon());
    env.check_time(steps);
    for (std::size_t r = 0; r < cfg.replicas; ++r) {
      Rng rng = make_rng(cfg.master_seed(), kSetStream, r);
      SetState<double> state = make_state<double>(env, 0, VertexSet{start});
      for (Time t = 0; t < steps && !state.empty(); ++t) {
        for (double alpha : cfg.drift.alphas) {
          const DriftResult res = drift_check(env, state, alpha, gamma);
          tally(res, alpha);
          *csv << "sampled," << r << ',' << t << ',' << state.members.size() << ',' << state.mass << ',' << alpha
               << ',' << res.lhs << ',' << res.rhs << ',' << res.r << ',' << (res.pass ? 1 : 0) << '\n';
        }
        const auto law = successor_law(env, state);
        const std::size_t k = successor_size(law, uniform_open(rng));
        state = SetState<double>{t + 1, law.members({0.0, k}), law.prefix_mass[k]};
      }
    }
  }
  report.add("drift-bounds", "drift inequalities on every visited state", failures == 0,
             static_cast<double>(failures), 0.0, std::to_string(checked) + " checks, worst slack " + fmt(worst));
}

// ------------------------------------------------------------- evolving sets

void evolving_sim(const ExperimentConfig& cfg, const std::filesystem::path& out, std::size_t workers,
                  RunReport& report) {
  const DynEnv env = load_env(cfg);
  report.env_digest = env_digest(env);
  const Vertex start = resolve_vertex(env, *cfg.start, "start");
  const Time steps = cfg.steps.value_or(env.horizon());
  env.check_time(steps);
  const double pi0 = env.vertex_conductance(0, start);

  std::vector<std::vector<TrajectoryRow>> runs(cfg.replicas);
  parallel_for(cfg.replicas, workers, [&](std::size_t r) {
    Rng rng = make_rng(cfg.master_seed(), kSetStream, r);
    runs[r] = simulate_evolving_set(env, start, steps, rng, cfg.coupled, r);
  });

  CsvFile csv(out, "trajectories.csv", report);
  *csv << "seed,replica,t,size,mass,walker\n";
  MomentAccumulator final_mass;
  std::size_t empty_conditioned = 0;
  for (const auto& rows : runs) {
    for (const auto& row : rows) {
      *csv << cfg.master_seed() << ',' << row.replica << ',' << row.t << ',' << row.size << ',' << row.mass << ','
           << (row.walker ? env.label(*row.walker) : std::string()) << '\n';
      if (cfg.coupled && row.size == 0) ++empty_conditioned;
    }
    final_mass.add(rows.back().mass);
  }
  const auto m = final_mass.result();
  report.metric("final_mass_mean", m.mean);
  report.metric("final_mass_std_error", m.std_error());
  if (cfg.coupled) {
    report.add("conditioned-kernel", "size-biased chain never empties", empty_conditioned == 0,
               static_cast<double>(empty_conditioned), 0.0);
  } else {
    const double tol = 4.0 * m.std_error() + kExactTol;
    report.add_bound("martingale", "mean final mass within 4 sigma of the start mass", std::fabs(m.mean - pi0), tol,
                     "start mass " + fmt(pi0));
  }

  if (!cfg.embedding.query_s.empty()) {
    const Time emb_steps = std::max<Time>(1, std::min<Time>(steps, env.horizon()));
    std::vector<EmbeddedPath> paths(cfg.replicas);
    parallel_for(cfg.replicas, workers, [&](std::size_t r) {
      Rng rng = make_rng(cfg.master_seed(), kEmbeddingStream, r);
      paths[r] = simulate_embedded_path(env, start, emb_steps, cfg.embedding.query_s, cfg.embedding.mode, rng);
    });
    CsvFile ecsv(out, "embedding.csv", report);
    const char* mode = cfg.embedding.mode == BridgeMode::kJointPath ? "joint" : "independent";
    *ecsv << "seed,replica,u,m,set_size,mode\n";
    for (std::size_t r = 0; r < paths.size(); ++r) {
      for (const auto& s : paths[r].m_samples) {
        *ecsv << cfg.master_seed() << ',' << r << ',' << s.u << ',' << s.m << ',' << s.set_size << ',' << mode
              << '\n';
      }
    }
    // M is a martingale in the continuous clock: E[M_s] = pi^(0)({start})
    // for every s in the first step.
    std::vector<double> qs = cfg.embedding.query_s;
    std::sort(qs.begin(), qs.end());
    for (std::size_t k = 0; k < qs.size(); ++k) {
      MomentAccumulator acc;
      for (const auto& p : paths) acc.add(p.m_samples[1 + k].m);
      const auto mk = acc.result();
      report.add_bound("continuous-embedding", "E[M] at s = " + fmt(qs[k]) + " within 4 sigma",
                       std::fabs(mk.mean - pi0), 4.0 * mk.std_error() + kExactTol, std::string("bridge mode ") + mode);
    }
  }
}

// -------------------------------------------------------------- kernel decay

void kernel_decay(const ExperimentConfig& cfg, const std::filesystem::path& out, RunReport& report) {
  const DynEnv env = load_env(cfg);
  report.env_digest = env_digest(env);
  const Time t_end = cfg.decay.t_end.value_or(env.horizon());
  IsoperimetricProfile profile(env, cfg.iso);
  const auto points = decay_envelope(env, cfg.decay.s, t_end, profile);

  CsvFile csv(out, "envelope.csv", report);
  *csv << "t,psi_gap,sup_scaled,value,running_max\n";
  bool finite = true;
  for (const auto& p : points) {
    *csv << p.t << ',' << p.psi_gap << ',' << p.sup_scaled << ',' << p.value << ',' << p.running_max << '\n';
    finite = finite && std::isfinite(p.value);
  }
  report.add("heat-kernel-decay", "envelope finite", finite, finite ? 0.0 : 1.0, 0.0);
  if (points.size() >= 2) {
    const std::size_t mid = (points.size() - 1) / 2;
    const double at_mid = points[mid].running_max;
    const double final_max = points.back().running_max;
    report.add_bound("heat-kernel-decay", "running max flat over the last half", final_max / at_mid, 1.0 + 1e-9,
                     "running max " + fmt(at_mid) + " at t = " + std::to_string(points[mid].t));
    report.metric("envelope_running_max", final_max);
  }
  report.metric("psi_at_end", points.empty() ? 0.0 : points.back().psi_gap);
}

// ---------------------------------------------------------------------- csrw

void csrw_sim(const ExperimentConfig& cfg, const std::filesystem::path& out, std::size_t workers,
              RunReport& report) {
  const DynEnv env = load_env(cfg);
  report.env_digest = env_digest(env);
  const Vertex start = resolve_vertex(env, *cfg.start, "start");
  std::optional<Vertex> absorbing;
  if (cfg.csrw.absorbing) absorbing = resolve_vertex(env, *cfg.csrw.absorbing, "csrw.absorbing");
  const Vertex target = cfg.csrw.target ? resolve_vertex(env, *cfg.csrw.target, "csrw.target") : start;
  const double t_max = cfg.csrw.t_max;

  std::vector<CsrwPath> paths(cfg.replicas);
  parallel_for(cfg.replicas, workers, [&](std::size_t r) {
    Rng rng = make_rng(cfg.master_seed(), kCsrwStream, r);
    paths[r] = simulate_csrw(env, start, t_max, rng, absorbing);
  });

  {
    CsvFile csv(out, "csrw_paths.csv", report);
    const std::size_t shown = std::min(cfg.csrw.csv_paths, paths.size());
    for (std::size_t r = 0; r < shown; ++r) write_csrw_csv(*csv, env, paths[r], r, r == 0);
    if (shown == 0) *csv << "replica,time,vertex,moved\n";
  }
  const auto ret = return_statistics(paths, target);
  {
    CsvFile csv(out, "csrw_returns.csv", report);
    *csv << "seed,replica,visits,last_visit\n";
    for (std::size_t r = 0; r < paths.size(); ++r) {
      *csv << cfg.master_seed() << ',' << r << ',' << ret.visits[r] << ',';
      if (ret.last_visit[r]) *csv << *ret.last_visit[r];
      *csv << '\n';
    }
  }
  report.metric("mean_visits", ret.mean_visits);

  if (absorbing) {
    std::size_t absorbed = 0;
    for (const auto& p : paths) absorbed += p.absorbed_at ? 1 : 0;
    report.metric("absorbed_fraction", static_cast<double>(absorbed) / static_cast<double>(paths.size()));
    report.note("thinning", "clock checks skipped: absorption truncates paths");
    return;
  }

  std::vector<double> counts;
  std::vector<double> first_gaps;
  for (const auto& p : paths) {
    counts.push_back(static_cast<double>(p.rings()));
    const auto gaps = p.effective_interarrivals();
    if (!gaps.empty()) first_gaps.push_back(gaps.front());
  }
  const auto m = moments(counts);
  const double lambda = CsrwPath::kClockRate * t_max;
  const double n = static_cast<double>(counts.size());
  report.add_bound("csrw-thinning", "ring count mean within 4 sigma of 2t", std::fabs(m.mean - lambda),
                   4.0 * std::sqrt(lambda / n));
  if (counts.size() >= 2) {
    // Var of the sample variance of Poisson(lambda) is about (lambda + 2 lambda^2) / n.
    report.add_bound("csrw-thinning", "ring count variance within 4 sigma of 2t", std::fabs(m.variance - lambda),
                     4.0 * std::sqrt((lambda + 2.0 * lambda * lambda) / n));
  }
  if (first_gaps.size() >= 2) {
    const double d = ks_statistic(first_gaps, [](double x) { return x <= 0.0 ? 0.0 : 1.0 - std::exp(-x); });
    const double pval = ks_pvalue(d, first_gaps.size());
    report.add("csrw-thinning", "effective jump gaps exp(1), KS at level 0.01", pval >= 0.01, pval, 0.01,
               "KS statistic " + fmt(d) + " on " + std::to_string(first_gaps.size()) + " gaps");
  }
}

// --------------------------------------------------------------- percolation

void write_histogram(std::ofstream& csv, const std::string& run, const TransienceSummary& s) {
  for (const auto& [returns, walks] : s.return_histogram) csv << run << ',' << returns << ',' << walks << '\n';
}

void percolation_transience(const ExperimentConfig& cfg, const std::filesystem::path& out, std::size_t workers,
                            RunReport& report) {
  const auto& o = cfg.percolation;
  PercConfig pc;
  pc.d = o.d;
  pc.L = o.L;
  pc.p = o.p;
  pc.seed = cfg.master_seed();
  pc.min_cluster_fraction = o.min_cluster_fraction;
  pc.max_attempts = o.max_attempts;
  const Cluster cluster = generate_cluster(pc);
  Rng grow_rng = make_rng(cfg.master_seed(), kGrowthStream, 0);
  const auto growth = o.growth_edges > 0 ? random_growth_schedule(cluster, o.growth_edges, o.growth_batches, grow_rng)
                                         : std::vector<GrowthBatch>{};
  const DynEnv env = growing_env(cluster, growth, o.t_max);
  report.env_digest = env_digest(env);
  report.metric("cluster_size", static_cast<double>(cluster.members.size()));
  report.metric("cluster_fraction",
                static_cast<double>(cluster.members.size()) / static_cast<double>(cluster.box_volume()));
  report.metric("cluster_attempts", cluster.attempts);

  const double lazy = laziness_coefficient(env);
  report.add_bound("percolation-growth", "stay probability at least 1/2", 0.5 - lazy, kExactTol);
  const auto mono = monotonicity_report(env);
  report.add("percolation-growth", "vertex conductances non-decreasing", mono.is_nondecreasing,
             mono.eta_star, 1.0);
  double max_pi = 0.0;
  for (Vertex v = 0; v < env.num_vertices(); ++v) max_pi = std::max(max_pi, env.vertex_conductance(env.horizon(), v));
  report.add_bound("percolation-growth", "vertex conductance at most 4d", max_pi, 4.0 * o.d);

  const auto main = transience_experiment(env, o.walks, o.t_max, cfg.master_seed(), kWalkStream, workers);
  report.metric("median_returns", main.median_returns);
  report.metric("late_return_fraction", main.late_return_fraction);
  report.metric("kill_fraction", main.kill_fraction);
  report.note("non_transient_flag", main.flagged_non_transient ? "true" : "false");

  CsvFile csv(out, "percolation_returns.csv", report);
  *csv << "run,returns,walks\n";
  write_histogram(*csv, "cluster", main);

  if (o.control) {
    PercConfig line;
    line.d = 1;
    line.L = o.control_L.value_or(static_cast<int>(std::ceil(5.0 * std::sqrt(static_cast<double>(o.t_max)))));
    line.p = 1.0;
    line.seed = cfg.master_seed();
    line.min_cluster_fraction = 0.0;
    const DynEnv control_env = growing_env(generate_cluster(line), {}, o.t_max);
    const auto control = transience_experiment(control_env, o.walks, o.t_max, cfg.master_seed(), kControlStream,
                                               workers);
    write_histogram(*csv, "control", control);
    report.metric("control_late_return_fraction", control.late_return_fraction);
    report.metric("control_kill_fraction", control.kill_fraction);
    report.metric("control_L", line.L);
    report.add_bound("strong-transience", "late returns at most 1/5 of the recurrent control",
                     5.0 * main.late_return_fraction, control.late_return_fraction,
                     "cluster " + fmt(main.late_return_fraction) + " vs control " +
                         fmt(control.late_return_fraction) + ", kill fraction " + fmt(main.kill_fraction));
  }
}

// --------------------------------------------------------------------- kappa

void kappa_table(const ExperimentConfig& cfg, const std::filesystem::path& out, RunReport& report) {
  const DynEnv env = load_env(cfg);
  report.env_digest = env_digest(env);
  IsoperimetricProfile profile(env, cfg.iso);
  const bool enumerate = cfg.iso.mode != IsoMode::kLatticeAnalytic;

  CsvFile csv(out, "kappa.csv", report);
  *csv << "t,kappa,singleton_bound,psi,psi_beta,subsets_scanned\n";
  std::size_t violations = 0;
  double worst_ratio = 0.0;
  double prev_psi = 0.0;
  double worst_psi_drop = 0.0;
  for (Time t = 0; t <= env.horizon(); ++t) {
    double k = 0.0;
    double bound = std::numeric_limits<double>::infinity();
    std::size_t scanned = 0;
    if (enumerate) {
      const auto kr = kappa_detail(env, t, cfg.iso);
      k = kr.value;
      bound = kr.singleton_bound;
      scanned = kr.subsets_scanned;
      if (std::isfinite(bound)) {
        worst_ratio = std::max(worst_ratio, k / bound);
        if (k > bound * (1.0 + kExactTol)) ++violations;
      }
    } else {
      k = profile.kappa(t);
    }
    const double ps = profile.psi(t, false);
    const double pb = profile.psi(t, true);
    worst_psi_drop = std::max(worst_psi_drop, prev_psi - ps);
    prev_psi = ps;
    *csv << t << ',' << k << ',' << bound << ',' << ps << ',' << pb << ',' << scanned << '\n';
  }
  if (enumerate && cfg.iso.volume == Volume::kConductance) {
    report.add("lattice-isoperimetry", "kappa never exceeds the singleton bound", violations == 0, worst_ratio, 1.0);
  }
  report.add_bound("isoperimetric-growth", "psi non-decreasing (largest drop)", worst_psi_drop, 0.0);
  if (env.horizon() >= 2) {
    const auto rc = profile.r_condition(0, env.horizon());
    report.note("r_condition", rc.r ? "r = " + std::to_string(*rc.r) : rc.diagnostic);
  }
}

}  // namespace

RunReport execute_task(const ExperimentConfig& cfg, const std::filesystem::path& out_dir, std::size_t workers) {
  cfg.validate();
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) fail(ErrorCode::kIo, "cannot create output directory '" + out_dir.string() + "': " + ec.message());
  RunReport report;
  report.task = task_name(cfg.task);
  report.seeds = cfg.seeds;
  report.workers = workers;
  switch (cfg.task) {
    case Task::kVerifyIdentities:
      verify_identities(cfg, out_dir, report);
      break;
    case Task::kDriftSuite:
      drift_suite(cfg, out_dir, report);
      break;
    case Task::kEvolvingSim:
      evolving_sim(cfg, out_dir, workers, report);
      break;
    case Task::kKernelDecay:
      kernel_decay(cfg, out_dir, report);
      break;
    case Task::kCsrwSim:
      csrw_sim(cfg, out_dir, workers, report);
      break;
    case Task::kPercolationTransience:
      percolation_transience(cfg, out_dir, workers, report);
      break;
    case Task::kKappaTable:
      kappa_table(cfg, out_dir, report);
      break;
  }
  return report;
}

}  // namespace evoset
