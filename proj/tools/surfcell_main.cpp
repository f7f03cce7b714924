#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "surfcell/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"surfcell: effective surface tension of surfactant-loaded two-well "
               "interfaces via second-gradient phase-field cell problems"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  int jobs = 1;
  bool strict = false;
  std::uint64_t seed = 0;
  bool seed_set = false;

  CLI::App* run = app.add_subcommand("run", "execute a task described by a JSON config");
  run->add_option("--config", config_path, "path to the run config")->required();
  run->add_option("--out", out_dir, "output directory for artifacts");
  run->add_option("--jobs", jobs, "task-level parallelism for sweep points / eps values");
  run->add_flag("--strict", strict, "exit 2 when solvers report non-convergence flags");
  run->add_option("--seed", seed, "override the config seed")->each([&](const std::string&) {
    seed_set = true;
  });

  std::string artifact_path;
  std::string kind;
  std::string export_out = "plotdata.csv";
  CLI::App* exp = app.add_subcommand("export-plotdata",
                                     "flatten a stored artifact into a plottable CSV");
  exp->add_option("--artifact", artifact_path, "path to a JSON artifact")->required();
  exp->add_option("--kind", kind, "artifact kind: phi | recovery")->required();
  exp->add_option("--out", export_out, "output CSV path");

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) {
    surfcell::json config;
    try {
      config = surfcell::json::parse(surfcell::read_file(config_path));
    } catch (const std::exception& e) {
      std::fprintf(stderr, "config error: %s\n", e.what());
      return 1;
    }
    surfcell::RunOptions opts;
    opts.out_dir = out_dir;
    opts.jobs = jobs;
    opts.strict = strict;
    opts.has_seed_override = seed_set;
    opts.seed_override = seed;
    const surfcell::RunOutcome outcome = surfcell::run_task(config, opts);
    if (!outcome.message.empty()) std::fprintf(stderr, "%s\n", outcome.message.c_str());
    return outcome.exit_code;
  }
  return surfcell::export_plotdata(artifact_path, kind, export_out);
}
