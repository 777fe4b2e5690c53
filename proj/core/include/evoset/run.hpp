#pragma once

#include <cstddef>
#include <filesystem>

#include "evoset/config.hpp"
#include "evoset/report.hpp"

namespace evoset {

/// Runs the configured task, writing its CSVs into `out_dir` (created if
/// needed). Every random stream is make_rng(master seed, stream, replica),
/// so outputs do not depend on `workers`.
RunReport execute_task(const ExperimentConfig& cfg, const std::filesystem::path& out_dir, std::size_t workers);

/// execute_task plus timing and report.json in cfg.out_dir.
RunReport run(const ExperimentConfig& cfg, std::size_t workers);

}  // namespace evoset
