#pragma once

#include "surfcell/energy.hpp"
#include "surfcell/grid.hpp"

namespace surfcell::ref {

// Naive serial re-implementations of the hot kernels, kept as independent
// oracles for the OpenMP versions and as the baseline in the benchmark.
// They accumulate left-to-right (no block tree), so agreement with the
// parallel kernels is up to summation roundoff, not bitwise.

EnergyBreakdown energy_e(const GridField& u, const DensityField& rho, double eps,
                         const PotentialSpec& spec);
EnergyBreakdown energy_f(const GridField& u, double lambda, double eps,
                         const PotentialSpec& spec);

// Forward-mode scatter gradient of F: loops over interior integrand nodes and
// pushes each stencil weight onto the touched values; contrast with the
// gather kernel in energy.cpp.
GridField grad_f(const GridField& u, double lambda, double eps, const PotentialSpec& spec);

DensityField hessian_norm(const GridField& f);
double integrate(const DensityField& g);

}  // namespace surfcell::ref
