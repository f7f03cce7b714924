#pragma once

#include <utility>

#include "surfcell/grid.hpp"
#include "surfcell/potential.hpp"

namespace surfcell {

// Regularized interface energies on grid fields, eps > 0:
//   E(u, rho) = integral (1/eps) W(grad u) + eps |hess u|^2 + eps (rho - |hess u|)^2
//   F(u, l)   = integral (1/eps) W(grad u) + eps |hess u|^2 + eps min{l^2, |hess u|^2}
// Quadrature runs over every node. Band rows enter with their pinned affine
// values (W = 0, |hess u| = 0) and, for E, their rho contribution; all other
// rows use central stencils (bands >= 2 keep them in range).

struct EnergyBreakdown {
  double potential = 0.0;
  double second_gradient = 0.0;
  double surfactant = 0.0;
  double total = 0.0;  // potential + second_gradient + surfactant, in that order
  double eps = 0.0;
};

EnergyBreakdown energy_e(const GridField& u, const DensityField& rho, double eps,
                         const PotentialSpec& spec, const Region* region = nullptr);

EnergyBreakdown energy_f(const GridField& u, double lambda, double eps,
                         const PotentialSpec& spec, const Region* region = nullptr);

// Exact gradient of the discrete F with respect to non-band values; band rows
// are zero. Ties min{l^2, w^2} resolve to the l^2 branch (zero derivative).
GridField grad_f(const GridField& u, double lambda, double eps, const PotentialSpec& spec);

// |hess u| in the energy convention: band rows pinned to zero, central
// stencils elsewhere. This is the g fed to the water-fill step and the w in
// the E/F bridge.
DensityField curvature_field(const GridField& u);

// Optimal density at multiplier lambda <= 0: max{lambda + |hess u|, 0}.
DensityField rho_from_lambda(const GridField& u, double lambda);

// integral max{lambda + |hess u|, 0} (energy convention).
double constraint_mass(const GridField& u, double lambda);

// Both closed forms of min{l^2 + w^2, 2 w^2} = w^2 + (max{l + w, 0} - w)^2
// for l <= 0, w >= 0. Returns (lhs, rhs).
std::pair<double, double> clipped_min_identity(double lambda, double w);

}  // namespace surfcell
