#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "surfcell/energy.hpp"
#include "surfcell/grid.hpp"
#include "surfcell/potential.hpp"

namespace surfcell {

// Cell problem: the surface tension Phi(budget) is the infimum of
// F_{1/L}(u, lambda) over scales L > 0, profiles u with matched affine
// boundary data (periodic in x'), and levels lambda <= 0 subject to
// integral max{lambda + |hess u|, 0} <= budget. Solved by alternating
// u-descent (L-BFGS on grad_f), water-fill lambda updates, and golden-section
// scale updates, warm-started throughout.

struct SolverOptions {
  int max_sweeps = 60;
  int u_iters = 80;            // L-BFGS iterations per sweep
  double energy_tol = 1e-8;    // relative decrease per sweep that stops the loop
  double grad_tol = 1e-12;     // L-BFGS gradient stop (raw 2-norm)
  double l_min = 0.5;
  double l_max = 50.0;
  int golden_iters = 40;
  double ramp_width = 0.4;     // clamped-cubic initial transition width
  double init_perturb = 0.0;   // seeded perturbation amplitude (relative to |a|)
  std::uint64_t seed = 0;
  int band = 2;
};

struct CellSolution {
  double value = 0.0;    // Phi estimate per unit cross-section area
  double lambda = 0.0;   // <= 0
  double scale_l = 0.0;  // optimal L
  double gamma = 0.0;    // budget
  GridField profile;
  EnergyBreakdown breakdown;
  double constraint_mass = 0.0;
  double final_grad_norm = 0.0;
  int sweeps = 0;
  int u_iterations = 0;
  bool converged = false;
  bool bracket_hit = false;
};

// Shared alternating solver; init (when given) must live on `grid`.
CellSolution solve_cell(const PotentialSpec& spec, double gamma, const Grid& grid,
                        const SolverOptions& opts, const GridField* init = nullptr);

// 1D reduction: profiles depending on x_N only (valid under the
// profile-reduction bound on W).
CellSolution solve_profile_1d(const PotentialSpec& spec, double gamma, int n,
                              const SolverOptions& opts);

// Full N = 2 solve; initialized from the rasterized 1D solution plus an
// optional seeded perturbation unless an explicit init is provided.
CellSolution solve_profile_nd(const PotentialSpec& spec, double gamma, const Grid& grid,
                              const SolverOptions& opts, const GridField* init = nullptr);

// Golden-section scale search on [l_min, l_max] with one widen-and-retry when
// the minimizer lands on an endpoint; sets *bracket_hit when it still does.
double optimize_scale(const std::function<double(double)>& value_at, double l_min,
                      double l_max, int iters, bool* bracket_hit);

struct PhiPoint {
  double gamma = 0.0;
  double phi = 0.0;
  double lambda = 0.0;
  double scale_l = 0.0;
  int iterations = 0;
  double grad_norm = 0.0;
  bool converged = false;
};

struct PhiCurve {
  std::vector<PhiPoint> points;  // strictly increasing gamma
  std::vector<int> resolution_schedule;
  int dimension = 1;  // 1 for profile sweeps, 2 for full solves
  std::uint64_t seed = 0;

  void validate() const;
  // Monotone piecewise-linear interpolation, clamped beyond the range;
  // *extrapolated is set when clamping happened.
  double interpolate(double gamma, bool* extrapolated = nullptr) const;
};

// Solves every budget in `gammas` (strictly increasing), warm-starting each
// point from the previous solution when warm_chain is set, refining through
// the resolution schedule. With grid2d set, points come from full solves.
PhiCurve sweep_phi(const PotentialSpec& spec, std::span<const double> gammas,
                   std::span<const int> resolution_schedule, const SolverOptions& opts,
                   bool warm_chain = true, const Grid* grid2d = nullptr,
                   std::vector<CellSolution>* solutions = nullptr, int jobs = 1);

struct MonotoneReport {
  bool pass = true;
  int worst_index = -1;
  double worst_violation = 0.0;  // max of phi[i+1] - phi[i]
};

MonotoneReport check_monotone(const PhiCurve& curve, double slack);

// Sample a 1D profile at coordinate t (cubic interpolation, affine tails).
void sample_profile(const GridField& profile1d, double t, std::span<double> out);

// Max over rows/components of the variance across the periodic axis.
double prime_variance(const GridField& f);

// Clamped-cubic V-ramp initial guess: u = a * s(x_N), transition width w.
GridField ramp_profile(const Grid& grid, std::span<const double> a, double width);

}  // namespace surfcell
