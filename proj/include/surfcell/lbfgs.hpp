#pragma once

#include <functional>
#include <vector>

namespace surfcell {

// Limited-memory BFGS with Armijo backtracking. The objective callback fills
// the gradient and returns the value. Entries whose gradient is identically
// zero (pinned DOFs) never move.
struct LbfgsOptions {
  int max_iters = 100;
  int history = 8;
  double grad_tol = 1e-10;   // stop when the scaled gradient norm drops below
  int max_backtracks = 40;
  double armijo_c1 = 1e-4;
  // Optional H0: apply an SPD preconditioner in place (v <- M^{-1} v). The
  // default is the scaled identity from the latest curvature pair.
  std::function<void(std::vector<double>&)> precondition;
};

struct LbfgsResult {
  double value = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  bool converged = false;   // hit grad_tol (vs. iteration/line-search stop)
};

using ObjectiveFn = std::function<double(const std::vector<double>&, std::vector<double>&)>;
using ValueFn = std::function<double(const std::vector<double>&)>;

// value_only, when given, serves the line-search probes (no gradient work).
LbfgsResult minimize_lbfgs(std::vector<double>& x, const ObjectiveFn& fn,
                           const LbfgsOptions& opts, const ValueFn& value_only = {});

// Golden-section search for a unimodal scalar function on [lo, hi]. Keeps the
// best of the probed points; iters counts interval shrink steps.
double golden_section(const std::function<double(double)>& f, double lo, double hi, int iters,
                      double* value_out = nullptr);

}  // namespace surfcell
