#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "surfcell/grid.hpp"

namespace surfcell {

// Water-fill projection: given samples g >= 0 with quadrature weights w > 0
// and a mass budget, find the level lambda <= 0 with
//   sum w_i max{lambda + g_i, 0} = budget,
// whose clipped density v* = max{lambda + g, 0} minimizes sum w (v - g)^2
// among all v >= 0 of that mass. The minimum value equals
// sum w min{lambda^2, g^2}.
struct WaterfillResult {
  double lambda = 0.0;             // <= 0
  std::vector<double> v_star;      // max{lambda + g, 0} per sample
  double objective = 0.0;          // sum w (v* - g)^2
  double objective_min_form = 0.0; // sum w min{lambda^2, g^2}
  double constraint_residual = 0.0;// mass(lambda) - budget
  double supply = 0.0;             // sum w g
  int iterations = 0;
};

// Conventions outside the interior budget range:
//   budget >= sum w g  -> lambda = 0, v* = g (slack constraint)
//   budget = 0         -> lambda = -max g (largest level with zero mass)
// Otherwise bisection on [-max g, 0] to |mass - budget| <= 1e-12 max(1, sum w g).
WaterfillResult solve_lambda(std::span<const double> g, std::span<const double> weights,
                             double budget);

// Uniform-weight convenience for a density field (weight h^N per node).
WaterfillResult solve_lambda(const DensityField& g, double budget);

struct OptimalityReport {
  int trials = 0;
  int violations = 0;
  double worst_gap = 0.0;  // most negative objective(v)-objective(v*) observed
};

// Randomized dominance check of the projection: samples feasible densities
// v >= 0 with sum w v = budget (normalized exponentials) and verifies the
// objective never drops below the water-fill optimum (tolerance 1e-10).
OptimalityReport verify_optimality(std::span<const double> g, std::span<const double> weights,
                                   double budget, const WaterfillResult& result, int trials,
                                   std::uint64_t seed);

}  // namespace surfcell
