#pragma once

#include <span>
#include <vector>

#include "surfcell/grid.hpp"

namespace surfcell {

// Discrete differential operators on grid fields. Periodic axes use central
// differences with wraparound; the x_N axis uses central differences at
// interior rows and one-sided stencils at rows 0 and n_last-1.

// First gradient, one d x N matrix per node.
MatrixField gradient(const GridField& f);

// Frobenius norm of the second gradient (d x N x N per node, mixed entries
// counted twice), one scalar per node.
DensityField hessian_norm(const GridField& f);

// Overwrite the band layers at x_N ~ -1/2 with -a x_N + c_lo and at
// x_N ~ +1/2 with +a x_N + c_hi, the constants matched to the mean of the
// adjacent free layer. Idempotent.
void apply_boundary_bands(GridField& f, std::span<const double> a);

// Midpoint quadrature: sum of h^N * g over nodes whose centers lie in the
// region (all of Q when region is null).
double integrate(const DensityField& g, const Region* region = nullptr);

// Cyclic shift by k nodes along the periodic axis (N = 2 only; identity on
// N = 1 fields). Used by shift-equivariance tests and perturbation tooling.
GridField shift_prime(const GridField& f, int k);

}  // namespace surfcell
