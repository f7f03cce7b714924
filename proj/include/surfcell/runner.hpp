#pragma once

#include <string>

#include "surfcell/io.hpp"

namespace surfcell {

// Batch task execution behind the CLI. Config is the parsed JSON run file;
// artifacts (CSV/JSON plus manifest.json) land in out_dir.
struct RunOptions {
  std::string out_dir = ".";
  int jobs = 1;
  bool strict = false;          // exit 2 on solver non-convergence flags
  bool has_seed_override = false;
  std::uint64_t seed_override = 0;
};

struct RunOutcome {
  int exit_code = 0;            // 0 ok, 1 validation, 2 strict non-convergence
  bool convergence_flag = false;
  std::string message;
};

RunOutcome run_task(const json& config, const RunOptions& opts);

// Flat two/three-column CSV views of stored artifacts for external plotting.
// kind: "phi" (gamma,phi) or "recovery" (epsilon,energy,target).
int export_plotdata(const std::string& artifact_path, const std::string& kind,
                    const std::string& out_path);

}  // namespace surfcell
