#include "evoset/run.hpp"

#include <chrono>
#include <fstream>

#include "evoset/error.hpp"

namespace evoset {

RunReport run(const ExperimentConfig& cfg, std::size_t workers) {
  const std::filesystem::path out(cfg.out_dir);
  const auto begin = std::chrono::steady_clock::now();
  RunReport report = execute_task(cfg, out, workers);
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - begin).count();
  report.artifacts.push_back("report.json");

  std::ofstream file(out / "report.json");
  if (!file) fail(ErrorCode::kIo, "cannot write report.json");
  file << to_json(report);
  return report;
}

}  // namespace evoset
