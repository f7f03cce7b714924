#include "surfcell/sharp_interface.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace surfcell {

void Laminate::validate() const {
  if (a.empty()) throw std::invalid_argument("laminate: a must be nonempty");
  double a2 = 0.0, dotp = 0.0, g2 = 0.0;
  for (double v : a) a2 += v * v;
  if (a2 <= 0.0) throw std::invalid_argument("laminate: a must be nonzero");
  if (gamma0.size() != a.size())
    throw std::invalid_argument("laminate: gamma0 and a size mismatch");
  for (std::size_t c = 0; c < a.size(); ++c) {
    dotp += gamma0[c] * a[c];
    g2 += gamma0[c] * gamma0[c];
  }
  if (std::abs(dotp) > 1e-12 * std::sqrt(a2) * std::max(1.0, std::sqrt(g2)))
    throw std::invalid_argument("laminate: gamma0 must be orthogonal to a");
  for (std::size_t i = 0; i < heights.size(); ++i) {
    if (!(heights[i] > -0.5 && heights[i] < 0.5))
      throw std::invalid_argument("laminate: heights must lie in (-1/2, 1/2)");
    if (i > 0 && !(heights[i] > heights[i - 1]))
      throw std::invalid_argument("laminate: heights must be strictly increasing");
  }
}

namespace {

// Piecewise-linear g with slope +1 above the top interface, alternating
// downward, normalized by g(1/2) = 1/2.
double laminate_g(const Laminate& lam, double t) {
  double g = 0.5;
  double pos = 0.5;
  double slope = 1.0;
  for (int i = static_cast<int>(lam.heights.size()) - 1; i >= 0; --i) {
    const double hgt = lam.heights[i];
    if (t >= hgt) return g - slope * (pos - t);
    g -= slope * (pos - hgt);
    pos = hgt;
    slope = -slope;
  }
  return g - slope * (pos - t);
}

}  // namespace

std::vector<double> eval_laminate(const Laminate& lam, std::span<const double> x) {
  lam.validate();
  if (x.empty()) throw std::invalid_argument("eval_laminate: empty point");
  const double t = x[x.size() - 1];
  for (double xi : x)
    if (!(xi >= -0.5 && xi <= 0.5))
      throw std::invalid_argument("eval_laminate: point outside the domain");
  const double g = laminate_g(lam, t);
  std::vector<double> u(lam.a.size());
  for (std::size_t c = 0; c < u.size(); ++c) u[c] = lam.gamma0[c] + lam.a[c] * g;
  return u;
}

GridField rasterize(const Laminate& lam, const Grid& grid) {
  lam.validate();
  grid.validate();
  if (grid.d != lam.dim()) throw std::invalid_argument("rasterize: d mismatch");
  const double min_sep = 2.0 * grid.h_last();
  for (std::size_t i = 1; i < lam.heights.size(); ++i)
    if (lam.heights[i] - lam.heights[i - 1] < min_sep)
      throw std::invalid_argument("rasterize: heights closer than two grid cells");
  GridField out(grid);
  for (int i = 0; i < grid.rows(); ++i) {
    const double g = laminate_g(lam, grid.x_last(i));
    for (int j = 0; j < grid.cols(); ++j)
      for (int c = 0; c < grid.d; ++c) out.at(i, j, c) = lam.gamma0[c] + lam.a[c] * g;
  }
  return out;
}

void SurfactantMeasure::validate(const Laminate& lam) const {
  lam.validate();
  const int n = static_cast<int>(lam.heights.size());
  for (const auto& p : patches) {
    if (p.interface_index < 0 || p.interface_index >= n)
      throw std::invalid_argument("measure: patch interface index out of range");
    if (!(p.lo >= -0.5 && p.hi <= 0.5 && p.lo < p.hi))
      throw std::invalid_argument("measure: patch outside the cross-section");
    if (p.density < 0.0) throw std::invalid_argument("measure: negative patch density");
  }
  for (std::size_t i = 0; i < patches.size(); ++i)
    for (std::size_t j = i + 1; j < patches.size(); ++j) {
      if (patches[i].interface_index != patches[j].interface_index) continue;
      if (patches[i].lo < patches[j].hi && patches[j].lo < patches[i].hi)
        throw std::invalid_argument("measure: overlapping patches on one interface");
    }
  for (const auto& atom : atoms) {
    if (atom.mass < 0.0) throw std::invalid_argument("measure: negative atom mass");
    for (double hgt : lam.heights)
      if (std::abs(atom.x_last - hgt) < atom_clearance)
        throw std::invalid_argument("measure: atom too close to an interface");
  }
}

double SurfactantMeasure::total_mass(const Laminate& lam) const {
  validate(lam);
  double m = 0.0;
  for (const auto& p : patches) m += p.density * (p.hi - p.lo);
  for (const auto& atom : atoms) m += atom.mass;
  return m;
}

double limit_energy(const Laminate& lam, const SurfactantMeasure& mu, const PhiCurve& curve,
                    bool* extrapolated) {
  mu.validate(lam);
  curve.validate();
  if (extrapolated) *extrapolated = false;
  bool clamped = false;
  double energy = 0.0;
  for (std::size_t i = 0; i < lam.heights.size(); ++i) {
    double covered = 0.0;
    for (const auto& p : mu.patches) {
      if (p.interface_index != static_cast<int>(i)) continue;
      bool ex = false;
      energy += curve.interpolate(p.density, &ex) * (p.hi - p.lo);
      clamped = clamped || ex;
      covered += p.hi - p.lo;
    }
    bool ex0 = false;
    energy += curve.interpolate(0.0, &ex0) * (1.0 - covered);
    clamped = clamped || ex0;
  }
  if (extrapolated) *extrapolated = clamped;
  return energy;
}

}  // namespace surfcell
