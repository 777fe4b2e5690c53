// evoset <task> --config <path> [--seed N] [--out DIR]
//
// Worker count comes from EVOSET_WORKERS. Exit status: 0 when every
// invariant record passes, 1 when some record fails, 2 on errors.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "evoset/config.hpp"
#include "evoset/parallel.hpp"
#include "evoset/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Evolving-set and dynamic-conductance random walk laboratory"};
  app.require_subcommand(1, 1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  const char* tasks[] = {"verify-identities", "drift-suite",            "evolving-sim", "kernel-decay",
                         "csrw-sim",          "percolation-transience", "kappa-table"};
  for (const char* name : tasks) {
    CLI::App* sub = app.add_subcommand(name, std::string("run the ") + name + " task");
    sub->add_option("--config", config_path, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "master seed; replaces the config's seeds");
    sub->add_option("--out", out_dir, "output directory; replaces the config's out");
  }
  CLI11_PARSE(app, argc, argv);

  try {
    const std::string task_arg = app.get_subcommands().front()->get_name();
    evoset::ExperimentConfig cfg = evoset::load_config_file(config_path, evoset::parse_task(task_arg));
    if (seed) cfg.seeds = {*seed};
    if (out_dir) cfg.out_dir = *out_dir;
    const std::size_t workers = evoset::worker_count_from_env();

    const evoset::RunReport report = evoset::run(cfg, workers);
    std::size_t failed = 0;
    for (const auto& r : report.records) {
      std::cout << (r.pass ? "PASS " : "FAIL ") << '[' << r.anchor << "] " << r.name << " (measured " << r.measured
                << ", tolerance " << r.tolerance << ")\n";
      failed += r.pass ? 0 : 1;
    }
    std::cout << report.records.size() - failed << '/' << report.records.size() << " records pass; report in "
              << cfg.out_dir << "/report.json\n";
    return failed == 0 ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "evoset: " << e.what() << '\n';
    return 2;
  }
}
