#pragma once

#include <span>
#include <vector>

#include "surfcell/cellproblem.hpp"
#include "surfcell/grid.hpp"

namespace surfcell {

// Sharp-interface limit objects on the unit box: laminate deformations whose
// gradient alternates between the wells across horizontal planes, and
// surfactant measures made of piecewise-constant interface densities plus
// point atoms off the interfaces.

struct Laminate {
  std::vector<double> gamma0;   // offset, orthogonal to a
  std::vector<double> a;        // well vector
  std::vector<double> heights;  // strictly increasing in (-1/2, 1/2)

  // Convention: the slab above the top interface has gradient +a (x) e_N,
  // alternating downward; the single-interface laminate at height 0 with
  // gamma0 = 0 is u = |x_N| a.
  void validate() const;

  int dim() const { return static_cast<int>(a.size()); }
};

// u(x) = gamma0 + a * g(x_N), g piecewise linear with slopes +-1.
std::vector<double> eval_laminate(const Laminate& lam, std::span<const double> x);

// Nodewise evaluation; throws when consecutive heights are closer than two
// grid cells.
GridField rasterize(const Laminate& lam, const Grid& grid);

struct SurfactantPatch {
  int interface_index = 0;  // index into Laminate::heights
  double lo = -0.5;         // patch interval in the cross-section
  double hi = 0.5;
  double density = 0.0;     // >= 0
};

struct SurfactantAtom {
  double x_prime = 0.0;
  double x_last = 0.0;
  double mass = 0.0;  // >= 0
};

struct SurfactantMeasure {
  std::vector<SurfactantPatch> patches;  // disjoint per interface
  std::vector<SurfactantAtom> atoms;     // off every interface
  double atom_clearance = 0.05;          // min distance from any interface

  void validate(const Laminate& lam) const;
  double total_mass(const Laminate& lam) const;  // patch mass + atom mass
};

// Sharp-interface energy: sum over interfaces of Phi(patch density) * length
// plus Phi(0) on the uncovered remainder; atoms carry interface density zero
// and contribute nothing. *extrapolated reports curve clamping.
double limit_energy(const Laminate& lam, const SurfactantMeasure& mu, const PhiCurve& curve,
                    bool* extrapolated = nullptr);

}  // namespace surfcell
