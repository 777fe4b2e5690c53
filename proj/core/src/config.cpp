#include "evoset/config.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "evoset/error.hpp"

namespace evoset {

namespace {

using nlohmann::json;

struct TaskName {
  Task task;
  const char* name;
};

constexpr TaskName kTaskNames[] = {
    {Task::kVerifyIdentities, "verify-identities"},
    {Task::kDriftSuite, "drift-suite"},
    {Task::kEvolvingSim, "evolving-sim"},
    {Task::kKernelDecay, "kernel-decay"},
    {Task::kCsrwSim, "csrw-sim"},
    {Task::kPercolationTransience, "percolation-transience"},
    {Task::kKappaTable, "kappa-table"},
};

[[noreturn]] void config_error(const std::string& field, const std::string& message) {
  fail(ErrorCode::kConfig, field + ": " + message);
}

// Reads `key` from `obj` as T, naming the dotted field on type errors.
template <class T>
std::optional<T> get(const json& obj, const char* key, const std::string& prefix) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    config_error(prefix + key, "wrong type");
  }
}

std::string read_file(const std::string& path, const std::string& field) {
  std::ifstream in(path);
  if (!in) config_error(field, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

IsoMode parse_iso_mode(const std::string& s) {
  if (s == "exact") return IsoMode::kExact;
  if (s == "half_volume") return IsoMode::kHalfVolume;
  if (s == "lattice_analytic") return IsoMode::kLatticeAnalytic;
  config_error("iso.mode", "expected exact | half_volume | lattice_analytic, got '" + s + "'");
}

Volume parse_volume(const std::string& s) {
  if (s == "conductance") return Volume::kConductance;
  if (s == "vertex_count") return Volume::kVertexCount;
  config_error("iso.volume", "expected conductance | vertex_count, got '" + s + "'");
}

bool needs_env(Task task) { return task != Task::kPercolationTransience; }

}  // namespace

std::string task_name(Task task) {
  for (const auto& t : kTaskNames) {
    if (t.task == task) return t.name;
  }
  return "?";
}

Task parse_task(std::string_view name) {
  std::string known;
  for (const auto& t : kTaskNames) {
    if (name == t.name) return t.task;
    known += known.empty() ? "" : " | ";
    known += t.name;
  }
  config_error("task", "unknown task '" + std::string(name) + "' (expected " + known + ")");
}

void ExperimentConfig::validate() const {
  const std::string name = task_name(task);
  if (seeds.empty()) config_error("seeds", "at least one seed required");
  if (replicas < 1) config_error("replicas", "must be >= 1");
  if (horizon && *horizon < 0) config_error("horizon", "must be >= 0");
  if (needs_env(task) && !env_document) config_error("env", "required for " + name);
  try {
    iso.validate();
  } catch (const Error& e) {
    config_error("iso", e.what());
  }
  if (fuzz.max_vertices < 1 || fuzz.max_vertices > 8) config_error("fuzz.max_vertices", "must lie in [1, 8]");
  if (fuzz.max_horizon < 0 || fuzz.max_horizon > 4) config_error("fuzz.max_horizon", "must lie in [0, 4]");
  for (double s : embedding.query_s) {
    if (!(s > 0.0 && s < 1.0)) config_error("embedding.query_s", "values must lie in (0, 1)");
  }

  switch (task) {
    case Task::kVerifyIdentities:
      break;
    case Task::kDriftSuite:
      if (drift.alphas.empty()) config_error("drift.alphas", "required for drift-suite");
      for (double a : drift.alphas) {
        if (a == 1.0) config_error("drift.alphas", "alpha=1 vacuous");
        if (!(a > 0.0)) config_error("drift.alphas", "alpha must be > 0");
      }
      if (drift.gamma && !(*drift.gamma > 0.0 && *drift.gamma <= 0.5)) {
        config_error("drift.gamma", "must lie in (0, 1/2]");
      }
      break;
    case Task::kEvolvingSim:
      if (!start) config_error("start", "required for evolving-sim");
      if (steps && *steps < 1) config_error("steps", "must be >= 1");
      break;
    case Task::kKernelDecay:
      if (!iso_d_given) config_error("iso.d", "required for kernel-decay");
      if (decay.s < 0) config_error("decay.s", "must be >= 0");
      if (decay.t_end && *decay.t_end <= decay.s) config_error("decay.t_end", "must exceed decay.s");
      break;
    case Task::kCsrwSim:
      if (!start) config_error("start", "required for csrw-sim");
      if (!(csrw.t_max > 0.0)) config_error("csrw.t_max", "must be > 0");
      break;
    case Task::kPercolationTransience:
      if (percolation.d < 1) config_error("percolation.d", "required, >= 1");
      if (percolation.L < 1) config_error("percolation.L", "required, >= 1");
      if (!(percolation.p >= 0.0 && percolation.p <= 1.0)) config_error("percolation.p", "required, in [0, 1]");
      if (percolation.walks < 1) config_error("percolation.walks", "must be >= 1");
      if (percolation.t_max < 2) config_error("percolation.t_max", "must be >= 2");
      if (percolation.growth_batches < 1) config_error("percolation.growth_batches", "must be >= 1");
      if (percolation.control_L && *percolation.control_L < 1) config_error("percolation.control_L", "must be >= 1");
      break;
    case Task::kKappaTable:
      if (!iso_d_given) config_error("iso.d", "required for kappa-table");
      break;
  }
}

ExperimentConfig parse_config(std::string_view text, const std::string& base_dir, std::optional<Task> task) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    config_error("config", std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) config_error("config", "top level must be an object");

  ExperimentConfig cfg;
  const auto file_task = get<std::string>(j, "task", "");
  if (file_task && task && parse_task(*file_task) != *task) {
    config_error("task", "config names '" + *file_task + "' but the command asks for '" + task_name(*task) + "'");
  }
  if (task) {
    cfg.task = *task;
  } else if (file_task) {
    cfg.task = parse_task(*file_task);
  } else {
    config_error("task", "required");
  }

  if (auto seeds = get<std::vector<std::uint64_t>>(j, "seeds", "")) cfg.seeds = *seeds;
  if (auto seed = get<std::uint64_t>(j, "seed", "")) cfg.seeds = {*seed};
  if (auto r = get<std::size_t>(j, "replicas", "")) cfg.replicas = *r;
  if (auto h = get<Time>(j, "horizon", "")) cfg.horizon = *h;
  if (auto out = get<std::string>(j, "out", "")) cfg.out_dir = *out;
  if (auto s = get<std::string>(j, "start", "")) cfg.start = *s;
  if (auto s = get<Time>(j, "steps", "")) cfg.steps = *s;
  if (auto c = get<bool>(j, "coupled", "")) cfg.coupled = *c;

  // Environment: inline document or file.
  std::optional<json> env;
  if (j.contains("env") && j.contains("env_file")) config_error("env", "give either env or env_file, not both");
  if (j.contains("env")) {
    if (!j["env"].is_object()) config_error("env", "must be an object");
    env = j["env"];
  } else if (auto file = get<std::string>(j, "env_file", "")) {
    std::filesystem::path p(*file);
    if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
    try {
      env = json::parse(read_file(p.string(), "env_file"));
    } catch (const json::parse_error& e) {
      config_error("env_file", std::string("invalid JSON: ") + e.what());
    }
  }
  if (env) {
    if (cfg.horizon) (*env)["horizon"] = *cfg.horizon;
    cfg.env_document = env->dump();
  }

  if (j.contains("iso")) {
    const json& iso = j["iso"];
    if (!iso.is_object()) config_error("iso", "must be an object");
    if (auto d = get<double>(iso, "d", "iso.")) {
      cfg.iso.d = *d;
      cfg.iso_d_given = true;
    }
    if (auto m = get<std::string>(iso, "mode", "iso.")) cfg.iso.mode = parse_iso_mode(*m);
    if (auto l = get<double>(iso, "lambda", "iso.")) cfg.iso.lambda = *l;
    if (auto v = get<std::string>(iso, "volume", "iso.")) cfg.iso.volume = parse_volume(*v);
  }
  if (j.contains("drift")) {
    const json& d = j["drift"];
    if (auto a = get<std::vector<double>>(d, "alphas", "drift.")) cfg.drift.alphas = *a;
    cfg.drift.gamma = get<double>(d, "gamma", "drift.");
  }
  if (j.contains("fuzz")) {
    const json& f = j["fuzz"];
    if (auto v = get<std::size_t>(f, "count", "fuzz.")) cfg.fuzz.count = *v;
    if (auto v = get<std::size_t>(f, "max_vertices", "fuzz.")) cfg.fuzz.max_vertices = *v;
    if (auto v = get<Time>(f, "max_horizon", "fuzz.")) cfg.fuzz.max_horizon = *v;
    if (auto v = get<std::size_t>(f, "constant_pi_count", "fuzz.")) cfg.fuzz.constant_pi_count = *v;
  }
  if (j.contains("embedding")) {
    const json& e = j["embedding"];
    if (auto v = get<std::vector<double>>(e, "query_s", "embedding.")) cfg.embedding.query_s = *v;
    if (auto m = get<std::string>(e, "mode", "embedding.")) {
      if (*m == "joint") {
        cfg.embedding.mode = BridgeMode::kJointPath;
      } else if (*m == "independent") {
        cfg.embedding.mode = BridgeMode::kIndependent;
      } else {
        config_error("embedding.mode", "expected joint | independent");
      }
    }
  }
  if (j.contains("decay")) {
    const json& d = j["decay"];
    if (auto v = get<Time>(d, "s", "decay.")) cfg.decay.s = *v;
    cfg.decay.t_end = get<Time>(d, "t_end", "decay.");
  }
  if (j.contains("csrw")) {
    const json& c = j["csrw"];
    if (auto v = get<double>(c, "t_max", "csrw.")) cfg.csrw.t_max = *v;
    cfg.csrw.target = get<std::string>(c, "target", "csrw.");
    cfg.csrw.absorbing = get<std::string>(c, "absorbing", "csrw.");
    if (auto v = get<std::size_t>(c, "csv_paths", "csrw.")) cfg.csrw.csv_paths = *v;
  }
  if (j.contains("percolation")) {
    const json& p = j["percolation"];
    auto& o = cfg.percolation;
    if (auto v = get<int>(p, "d", "percolation.")) o.d = *v;
    if (auto v = get<int>(p, "L", "percolation.")) o.L = *v;
    if (auto v = get<double>(p, "p", "percolation.")) o.p = *v;
    if (auto v = get<double>(p, "min_cluster_fraction", "percolation.")) o.min_cluster_fraction = *v;
    if (auto v = get<int>(p, "max_attempts", "percolation.")) o.max_attempts = *v;
    if (auto v = get<std::size_t>(p, "walks", "percolation.")) o.walks = *v;
    if (auto v = get<Time>(p, "t_max", "percolation.")) o.t_max = *v;
    if (auto v = get<std::size_t>(p, "growth_edges", "percolation.")) o.growth_edges = *v;
    if (auto v = get<int>(p, "growth_batches", "percolation.")) o.growth_batches = *v;
    if (auto v = get<bool>(p, "control", "percolation.")) o.control = *v;
    o.control_L = get<int>(p, "control_L", "percolation.");
  }

  cfg.validate();
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path, std::optional<Task> task) {
  const std::string text = read_file(path, "config");
  const auto base = std::filesystem::path(path).parent_path();
  return parse_config(text, base.empty() ? "." : base.string(), task);
}

}  // namespace evoset
