#include "surfcell/runner.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <stdexcept>

namespace surfcell {

namespace {

constexpr const char* kVersion = "0.1.0";

SolverOptions solver_from_json(const json& j, std::uint64_t seed) {
  SolverOptions opts;
  opts.seed = seed;
  if (!j.is_object()) return opts;
  opts.max_sweeps = j.value("max_sweeps", opts.max_sweeps);
  opts.u_iters = j.value("u_iters", opts.u_iters);
  opts.energy_tol = j.value("energy_tol", opts.energy_tol);
  opts.grad_tol = j.value("grad_tol", opts.grad_tol);
  opts.l_min = j.value("l_min", opts.l_min);
  opts.l_max = j.value("l_max", opts.l_max);
  opts.golden_iters = j.value("golden_iters", opts.golden_iters);
  opts.ramp_width = j.value("ramp_width", opts.ramp_width);
  opts.init_perturb = j.value("init_perturb", opts.init_perturb);
  opts.band = j.value("band", opts.band);
  return opts;
}

void write_manifest(const json& config, const RunOptions& opts, std::uint64_t seed,
                    const std::string& task, const std::vector<std::string>& artifacts) {
  json manifest;
  manifest["tool"] = "surfcell";
  manifest["version"] = kVersion;
  manifest["task"] = task;
  manifest["seed"] = seed;
  manifest["jobs"] = opts.jobs;
  manifest["strict"] = opts.strict;
  manifest["config"] = config;
  manifest["artifacts"] = artifacts;
  manifest["timestamp"] =
      std::chrono::duration_cast<std::chrono::seconds>(
          std::chrono::system_clock::now().time_since_epoch())
          .count();
  write_file((std::filesystem::path(opts.out_dir) / "manifest.json").string(),
             manifest.dump(2) + "\n");
}

std::string out_path(const RunOptions& opts, const std::string& name) {
  return (std::filesystem::path(opts.out_dir) / name).string();
}

// Recovery and liminf-probe share the full construction setup.
struct RecoverySetup {
  RecoveryConfig cfg;
  bool converged = true;
};

RecoverySetup build_recovery_setup(const json& config, std::uint64_t seed, int jobs) {
  RecoverySetup setup;
  RecoveryConfig& cfg = setup.cfg;
  cfg.potential = potential_from_json(require_field(config, "potential", "config"));
  cfg.laminate = laminate_from_json(require_field(config, "laminate", "config"));
  cfg.measure = measure_from_json(require_field(config, "measure", "config"));
  cfg.epsilons =
      require_field(config, "epsilons", "config").get<std::vector<double>>();
  cfg.delta = config.value("delta", 0.1);
  cfg.tilde_delta = config.value("tilde_delta", 0.0);
  cfg.slab_half_height = config.value("slab_half_height", 0.125);
  cfg.seed = seed;

  if (config.contains("grids")) {
    for (const auto& jg : config["grids"]) {
      Grid g = grid_from_json(jg);
      g.N = 2;
      g.d = cfg.potential.d;
      cfg.grids.push_back(g);
    }
  } else {
    Grid g = grid_from_json(require_field(config, "grid", "config"));
    g.N = 2;
    g.d = cfg.potential.d;
    cfg.grids.assign(cfg.epsilons.size(), g);
  }

  // cell solutions and the surface-tension curve
  const int n_cell = config.value("n_cell", 1024);
  SolverOptions sopts = solver_from_json(config.value("solver", json::object()), seed);
  double density = 0.0;
  for (const auto& p : cfg.measure.patches) density = std::max(density, p.density);

  std::vector<double> gammas{0.0};
  if (density > 0.0) gammas.push_back(density);
  if (config.contains("phi_gammas"))
    for (double g : config["phi_gammas"].get<std::vector<double>>()) gammas.push_back(g);
  std::sort(gammas.begin(), gammas.end());
  gammas.erase(std::unique(gammas.begin(), gammas.end(),
                           [](double a, double b) { return std::abs(a - b) < 1e-12; }),
               gammas.end());

  std::vector<int> schedule{n_cell};
  std::vector<CellSolution> sols;
  cfg.curve = sweep_phi(cfg.potential, gammas, schedule, sopts, true, nullptr, &sols, jobs);
  for (std::size_t i = 0; i < sols.size(); ++i) {
    if (!sols[i].converged) setup.converged = false;
    if (std::abs(gammas[i]) < 1e-12) cfg.cell_zero = sols[i];
    if (density > 0.0 && std::abs(gammas[i] - density) < 1e-12) cfg.cell_gamma = sols[i];
  }
  if (density == 0.0) cfg.cell_gamma = cfg.cell_zero;
  return setup;
}

}  // namespace

RunOutcome run_task(const json& config, const RunOptions& opts) {
  RunOutcome outcome;
  try {
    std::filesystem::create_directories(opts.out_dir);
    const std::string task = require_field(config, "task", "config").get<std::string>();
    const std::uint64_t seed =
        opts.has_seed_override ? opts.seed_override : config.value("seed", std::uint64_t{0});
    std::vector<std::string> artifacts;

    if (task == "check-potential") {
      const PotentialSpec spec =
          potential_from_json(require_field(config, "potential", "config"));
      const int samples = config.value("samples", 2000);
      const double tol = config.value("tol", 1e-9);
      const AssumptionReport rep = check_assumptions(spec, samples, tol, seed);
      write_file(out_path(opts, "assumption_report.json"), to_json(rep).dump(2) + "\n");
      artifacts.push_back("assumption_report.json");
    } else if (task == "phi-1d" || task == "phi-2d") {
      const PotentialSpec spec =
          potential_from_json(require_field(config, "potential", "config"));
      const double gamma = require_field(config, "gamma", "config").get<double>();
      const SolverOptions sopts =
          solver_from_json(config.value("solver", json::object()), seed);
      CellSolution sol;
      if (task == "phi-1d") {
        const int n = config.value("n", 1024);
        sol = solve_profile_1d(spec, gamma, n, sopts);
      } else {
        Grid grid = grid_from_json(require_field(config, "grid", "config"));
        grid.N = 2;
        grid.d = spec.d;
        sol = solve_profile_nd(spec, gamma, grid, sopts);
      }
      outcome.convergence_flag = !sol.converged || sol.bracket_hit;
      json out = to_json(sol);
      if (task == "phi-2d") out["prime_variance"] = prime_variance(sol.profile);
      write_file(out_path(opts, "cell_solution.json"), out.dump(2) + "\n");
      write_file(out_path(opts, "profile.csv"), field_csv(sol.profile));
      artifacts = {"cell_solution.json", "profile.csv"};
    } else if (task == "sweep") {
      const PotentialSpec spec =
          potential_from_json(require_field(config, "potential", "config"));
      const std::vector<double> gammas =
          require_field(config, "gamma_list", "config").get<std::vector<double>>();
      std::vector<int> schedule;
      if (config.contains("resolution_schedule"))
        schedule = config["resolution_schedule"].get<std::vector<int>>();
      else
        schedule = {config.value("n", 1024)};
      const SolverOptions sopts =
          solver_from_json(config.value("solver", json::object()), seed);
      const bool warm = config.value("warm_start", true);
      const PhiCurve curve = sweep_phi(spec, gammas, schedule, sopts, warm, nullptr,
                                       nullptr, opts.jobs);
      for (const auto& p : curve.points)
        if (!p.converged) outcome.convergence_flag = true;
      write_file(out_path(opts, "phi_curve.csv"), phi_curve_csv(curve));
      write_file(out_path(opts, "phi_curve.json"), to_json(curve).dump(2) + "\n");
      artifacts = {"phi_curve.csv", "phi_curve.json"};
    } else if (task == "recovery") {
      RecoverySetup setup = build_recovery_setup(config, seed, opts.jobs);
      outcome.convergence_flag = !setup.converged;
      const LimsupReport rep = validate_limsup(setup.cfg, opts.jobs);
      write_file(out_path(opts, "recovery_table.csv"), limsup_csv(rep));
      json out = to_json(rep);
      out["curve"] = to_json(setup.cfg.curve);
      write_file(out_path(opts, "recovery_table.json"), out.dump(2) + "\n");
      artifacts = {"recovery_table.csv", "recovery_table.json"};
    } else if (task == "liminf-probe") {
      RecoverySetup setup = build_recovery_setup(config, seed, opts.jobs);
      outcome.convergence_flag = !setup.converged;
      const int trials = config.value("trials", 200);
      const LiminfReport rep = probe_liminf(setup.cfg, trials, seed);
      write_file(out_path(opts, "liminf_report.csv"), liminf_csv(rep));
      write_file(out_path(opts, "liminf_report.json"), to_json(rep).dump(2) + "\n");
      artifacts = {"liminf_report.csv", "liminf_report.json"};
    } else {
      throw std::invalid_argument("config: unknown task '" + task + "'");
    }

    write_manifest(config, opts, seed, task, artifacts);
    if (opts.strict && outcome.convergence_flag) {
      outcome.exit_code = 2;
      outcome.message = "solver reported non-convergence flags (strict mode)";
    }
  } catch (const std::exception& e) {
    outcome.exit_code = 1;
    outcome.message = e.what();
  }
  return outcome;
}

int export_plotdata(const std::string& artifact_path, const std::string& kind,
                    const std::string& out_path_arg) {
  try {
    std::string out;
    const std::string text = read_file(artifact_path);
    if (kind == "phi") {
      out = "gamma,phi\n";
      if (!text.empty()) {
        const json j = json::parse(text);
        PhiCurve curve = phi_curve_from_json(j);
        for (const auto& p : curve.points)
          out += format_double(p.gamma) + "," + format_double(p.phi) + "\n";
      }
    } else if (kind == "recovery") {
      out = "epsilon,energy,target\n";
      if (!text.empty()) {
        const json j = json::parse(text);
        for (const auto& row : require_field(j, "rows", "recovery artifact"))
          out += format_double(row.value("eps", 0.0)) + "," +
                 format_double(row.value("energy", 0.0)) + "," +
                 format_double(row.value("target", 0.0)) + "\n";
      }
    } else {
      std::fprintf(stderr, "unknown export kind '%s' (use: phi, recovery)\n", kind.c_str());
      return 1;
    }
    write_file(out_path_arg, out);
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "export failed: %s\n", e.what());
    return 1;
  }
}

}  // namespace surfcell
