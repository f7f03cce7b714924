#pragma once

#include <cstdint>
#include <vector>

#include "surfcell/cellproblem.hpp"
#include "surfcell/grid.hpp"
#include "surfcell/sharp_interface.hpp"

namespace surfcell {

// Recovery construction for a single-interface laminate: inside the slab
// |x_N - t1| <= eps L / 2 the deformation is the rescaled cell profile
// eps L v((x_N - t1) / (eps L)), glued to the laminate through a smoothstep
// cutoff in x_N and, for partial patches, blended in x' between the
// budget-gamma profile and the budget-0 profile. The density carries
// max{|hess| + lambda/(eps L), 0} on the slab (renormalized to the exact
// branch budget), the vanishing budget slack on the sqrt(eps)-wide strips,
// and flat renormalized bumps of radius eps^{1/(2N)} at the atoms.
struct RecoveryConfig {
  PotentialSpec potential;
  Laminate laminate;            // exactly one interface
  SurfactantMeasure measure;    // patches share one density; atoms arbitrary
  PhiCurve curve;               // targets for validate_limsup
  CellSolution cell_gamma;      // 1D cell solution at the patch density
  CellSolution cell_zero;       // 1D cell solution at budget 0
  std::vector<double> epsilons; // strictly decreasing
  std::vector<Grid> grids;      // one per epsilon
  double delta = 0.1;           // x' cutoff width around patch edges
  double tilde_delta = 0.0;     // budget slack coefficient: slack = tilde_delta sqrt(eps)
  double slab_half_height = 0.125;  // cutoff geometry: blend zone between /3 and /2
  std::uint64_t seed = 0;

  void validate() const;
  double patch_density() const;  // common patch density (0 when no patches)
};

struct RecoveryPair {
  GridField u;
  DensityField rho;
  double eps = 0.0;
  double slack = 0.0;        // tilde_delta * sqrt(eps)
  double total_mass = 0.0;   // integral of rho
  double target_mass = 0.0;  // measure mass
};

// Throws std::invalid_argument (naming the minimum resolution) when the slab
// is thinner than four grid rows.
RecoveryPair build_recovery(const RecoveryConfig& cfg, int eps_index);

struct LimsupRow {
  double eps = 0.0;
  double energy = 0.0;
  double target = 0.0;
  double ratio = 0.0;
  double mass = 0.0;
  double mass_target = 0.0;
  double mass_err = 0.0;
  double glue_share = 0.0;  // energy fraction carried by the cutoff zones
  bool pre_asymptotic = false;
};

struct LimsupReport {
  std::vector<LimsupRow> rows;
  double target = 0.0;
  double final_ratio = 0.0;
  bool ratios_nonincreasing = true;  // over non-flagged rows
  double mass_slope = 0.0;           // log-log endpoints slope over non-flagged rows
};

LimsupReport validate_limsup(const RecoveryConfig& cfg, int jobs = 1);

struct LiminfReport {
  int trials = 0;
  int violations = 0;        // energies below target * (1 - tolerance)
  double tolerance = 0.02;
  double baseline = 0.0;     // unperturbed energy
  double min_energy = 0.0;
  double target = 0.0;
  std::vector<double> energies;
};

// Stochastic lower-bound probe at the finest eps: random smooth
// band-preserving perturbations of u with the density re-balanced by
// water-fill at fixed total mass.
LiminfReport probe_liminf(const RecoveryConfig& cfg, int trials, std::uint64_t seed);

}  // namespace surfcell
