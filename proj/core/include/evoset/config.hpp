#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "evoset/dyn_env.hpp"
#include "evoset/embedding.hpp"
#include "evoset/isoperimetry.hpp"

namespace evoset {

enum class Task {
  kVerifyIdentities,
  kDriftSuite,
  kEvolvingSim,
  kKernelDecay,
  kCsrwSim,
  kPercolationTransience,
  kKappaTable,
};

std::string task_name(Task task);
/// kConfig error naming the accepted tasks when `name` is unknown.
Task parse_task(std::string_view name);

struct DriftOptions {
  std::vector<double> alphas;
  std::optional<double> gamma;  // defaults to min(laziness, 1/2)
};

struct FuzzOptions {
  std::size_t count = 0;
  std::size_t max_vertices = 8;
  Time max_horizon = 4;
  std::size_t constant_pi_count = 0;
};

struct EmbeddingOptions {
  std::vector<double> query_s;
  BridgeMode mode = BridgeMode::kJointPath;
};

struct DecayOptions {
  Time s = 0;
  std::optional<Time> t_end;
};

struct CsrwOptions {
  double t_max = 10.0;
  std::optional<std::string> target;
  std::optional<std::string> absorbing;
  std::size_t csv_paths = 10;
};

struct PercolationOptions {
  int d = 0;
  int L = 0;
  double p = -1.0;
  double min_cluster_fraction = 0.1;
  int max_attempts = 20;
  std::size_t walks = 100;
  Time t_max = 1000;
  std::size_t growth_edges = 0;
  int growth_batches = 1;
  bool control = true;
  std::optional<int> control_L;
};

struct ExperimentConfig {
  Task task = Task::kVerifyIdentities;
  /// Environment document (inline or read from env_file), with the
  /// top-level "horizon" override already applied.
  std::optional<std::string> env_document;
  IsoConfig iso;
  bool iso_d_given = false;
  std::vector<std::uint64_t> seeds{1};
  std::size_t replicas = 1;
  std::optional<Time> horizon;
  std::string out_dir = "out";
  std::optional<std::string> start;
  std::optional<Time> steps;
  bool coupled = false;
  DriftOptions drift;
  FuzzOptions fuzz;
  EmbeddingOptions embedding;
  DecayOptions decay;
  CsrwOptions csrw;
  PercolationOptions percolation;

  std::uint64_t master_seed() const { return seeds.front(); }
  /// Task-specific checks; kConfig errors name the offending field.
  void validate() const;
};

/// Parses a JSON config. Relative env_file paths resolve against
/// `base_dir`. A `task` given here must agree with the file's "task" field
/// when both are present. Runs validate().
ExperimentConfig parse_config(std::string_view text, const std::string& base_dir = ".",
                              std::optional<Task> task = std::nullopt);
ExperimentConfig load_config_file(const std::string& path, std::optional<Task> task = std::nullopt);

}  // namespace evoset
