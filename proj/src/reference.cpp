#include "surfcell/reference.hpp"

#include <cmath>
#include <vector>

namespace surfcell::ref {

namespace {

inline int wrap(int j, int n) { return ((j % n) + n) % n; }

// Gradient matrix at an interior node, N-padded for the potential.
std::vector<double> interior_gradient(const GridField& u, int i, int j,
                                      const PotentialSpec& spec) {
  const Grid& g = u.grid;
  std::vector<double> xi(spec.d * spec.N, 0.0);
  for (int c = 0; c < g.d; ++c) {
    xi[c * spec.N + spec.N - 1] =
        (u.at(i + 1, wrap(j, g.cols()), c) - u.at(i - 1, wrap(j, g.cols()), c)) /
        (2.0 * g.h_last());
    if (g.N == 2)
      xi[c * spec.N + 0] = (u.at(i, wrap(j + 1, g.cols()), c) -
                            u.at(i, wrap(j - 1, g.cols()), c)) /
                           (2.0 * g.h_prime());
  }
  return xi;
}

double interior_hess2(const GridField& u, int i, int j) {
  const Grid& g = u.grid;
  double acc = 0.0;
  for (int c = 0; c < g.d; ++c) {
    const double dll = (u.at(i + 1, j, c) - 2.0 * u.at(i, j, c) + u.at(i - 1, j, c)) /
                       (g.h_last() * g.h_last());
    acc += dll * dll;
    if (g.N == 2) {
      const int jm = wrap(j - 1, g.cols());
      const int jp = wrap(j + 1, g.cols());
      const double dpp = (u.at(i, jp, c) - 2.0 * u.at(i, j, c) + u.at(i, jm, c)) /
                         (g.h_prime() * g.h_prime());
      const double dpl = (u.at(i + 1, jp, c) - u.at(i + 1, jm, c) - u.at(i - 1, jp, c) +
                          u.at(i - 1, jm, c)) /
                         (4.0 * g.h_prime() * g.h_last());
      acc += dpp * dpp + 2.0 * dpl * dpl;
    }
  }
  return acc;
}

}  // namespace

EnergyBreakdown energy_e(const GridField& u, const DensityField& rho, double eps,
                         const PotentialSpec& spec) {
  const Grid& g = u.grid;
  EnergyBreakdown b;
  b.eps = eps;
  for (int i = 0; i < g.rows(); ++i)
    for (int j = 0; j < g.cols(); ++j) {
      if (i == 0 || i == g.n_last - 1) {
        const double r = rho.at(i, j);
        b.surfactant += eps * r * r;
        continue;
      }
      const auto xi = interior_gradient(u, i, j, spec);
      const double w2 = interior_hess2(u, i, j);
      b.potential += eval_w(spec, xi) / eps;
      b.second_gradient += eps * w2;
      const double diff = rho.at(i, j) - std::sqrt(w2);
      b.surfactant += eps * diff * diff;
    }
  const double vol = g.cell_volume();
  b.potential *= vol;
  b.second_gradient *= vol;
  b.surfactant *= vol;
  b.total = b.potential + b.second_gradient + b.surfactant;
  return b;
}

EnergyBreakdown energy_f(const GridField& u, double lambda, double eps,
                         const PotentialSpec& spec) {
  const Grid& g = u.grid;
  EnergyBreakdown b;
  b.eps = eps;
  const double l2 = lambda * lambda;
  for (int i = 0; i < g.rows(); ++i)
    for (int j = 0; j < g.cols(); ++j) {
      if (i == 0 || i == g.n_last - 1) continue;
      const auto xi = interior_gradient(u, i, j, spec);
      const double w2 = interior_hess2(u, i, j);
      b.potential += eval_w(spec, xi) / eps;
      b.second_gradient += eps * w2;
      b.surfactant += eps * std::min(l2, w2);
    }
  const double vol = g.cell_volume();
  b.potential *= vol;
  b.second_gradient *= vol;
  b.surfactant *= vol;
  b.total = b.potential + b.second_gradient + b.surfactant;
  return b;
}

GridField grad_f(const GridField& u, double lambda, double eps, const PotentialSpec& spec) {
  const Grid& g = u.grid;
  GridField out(g);
  const double vol = g.cell_volume();
  const double l2 = lambda * lambda;
  const double inv2hl = 1.0 / (2.0 * g.h_last());
  const double invhl2 = 1.0 / (g.h_last() * g.h_last());
  const double inv2hp = g.N == 2 ? 1.0 / (2.0 * g.h_prime()) : 0.0;
  const double invhp2 = g.N == 2 ? 1.0 / (g.h_prime() * g.h_prime()) : 0.0;
  const double inv4 = inv2hp * inv2hl;
  std::vector<double> wgrad(spec.d * spec.N);
  auto add = [&](int i, int j, int c, double v) {
    out.at(i, wrap(j, g.cols()), c) += v;
  };
  for (int i = 1; i < g.n_last - 1; ++i)
    for (int j = 0; j < g.cols(); ++j) {
      const auto xi = interior_gradient(u, i, j, spec);
      const double w2 = interior_hess2(u, i, j);
      grad_w(spec, xi, wgrad);
      const double cmul = 2.0 * eps * (w2 < l2 ? 2.0 : 1.0);
      for (int c = 0; c < g.d; ++c) {
        // potential term through the first differences
        const double pl = wgrad[c * spec.N + spec.N - 1] / eps;
        add(i + 1, j, c, vol * pl * inv2hl);
        add(i - 1, j, c, -vol * pl * inv2hl);
        if (g.N == 2) {
          const double pp = wgrad[c * spec.N + 0] / eps;
          add(i, j + 1, c, vol * pp * inv2hp);
          add(i, j - 1, c, -vol * pp * inv2hp);
        }
        // curvature terms through the second differences
        const double dll = (u.at(i + 1, j, c) - 2.0 * u.at(i, j, c) + u.at(i - 1, j, c)) *
                           invhl2;
        add(i + 1, j, c, vol * cmul * dll * invhl2);
        add(i, j, c, -2.0 * vol * cmul * dll * invhl2);
        add(i - 1, j, c, vol * cmul * dll * invhl2);
        if (g.N == 2) {
          const int jm = wrap(j - 1, g.cols());
          const int jp = wrap(j + 1, g.cols());
          const double dpp = (u.at(i, jp, c) - 2.0 * u.at(i, j, c) + u.at(i, jm, c)) *
                             invhp2;
          add(i, j + 1, c, vol * cmul * dpp * invhp2);
          add(i, j, c, -2.0 * vol * cmul * dpp * invhp2);
          add(i, j - 1, c, vol * cmul * dpp * invhp2);
          const double dpl = (u.at(i + 1, jp, c) - u.at(i + 1, jm, c) - u.at(i - 1, jp, c) +
                              u.at(i - 1, jm, c)) *
                             inv4;
          const double s = 2.0 * vol * cmul * dpl * inv4;
          add(i + 1, j + 1, c, s);
          add(i + 1, j - 1, c, -s);
          add(i - 1, j + 1, c, -s);
          add(i - 1, j - 1, c, s);
        }
      }
    }
  // band DOFs are pinned
  for (int i = 0; i < g.rows(); ++i)
    if (g.is_band_row(i))
      for (int j = 0; j < g.cols(); ++j)
        for (int c = 0; c < g.d; ++c) out.at(i, j, c) = 0.0;
  return out;
}

DensityField hessian_norm(const GridField& f) {
  const Grid& g = f.grid;
  DensityField out(g);
  const int n = g.n_last;
  const double invhl2 = 1.0 / (g.h_last() * g.h_last());
  const double invhp2 = g.N == 2 ? 1.0 / (g.h_prime() * g.h_prime()) : 0.0;
  auto d2l = [&](int i, int j, int c) {
    if (i == 0)
      return (35.0 * f.at(0, j, c) - 104.0 * f.at(1, j, c) + 114.0 * f.at(2, j, c) -
              56.0 * f.at(3, j, c) + 11.0 * f.at(4, j, c)) *
             invhl2 / 12.0;
    if (i == n - 1)
      return (35.0 * f.at(n - 1, j, c) - 104.0 * f.at(n - 2, j, c) +
              114.0 * f.at(n - 3, j, c) - 56.0 * f.at(n - 4, j, c) +
              11.0 * f.at(n - 5, j, c)) *
             invhl2 / 12.0;
    return (f.at(i + 1, j, c) - 2.0 * f.at(i, j, c) + f.at(i - 1, j, c)) * invhl2;
  };
  auto d1p = [&](int i, int j, int c) {
    const int jm = wrap(j - 1, g.cols());
    const int jp = wrap(j + 1, g.cols());
    return (f.at(i, jp, c) - f.at(i, jm, c)) / (2.0 * g.h_prime());
  };
  for (int i = 0; i < g.rows(); ++i)
    for (int j = 0; j < g.cols(); ++j) {
      double acc = 0.0;
      for (int c = 0; c < g.d; ++c) {
        const double dll = d2l(i, j, c);
        acc += dll * dll;
        if (g.N == 2) {
          const int jm = wrap(j - 1, g.cols());
          const int jp = wrap(j + 1, g.cols());
          const double dpp = (f.at(i, jp, c) - 2.0 * f.at(i, j, c) + f.at(i, jm, c)) *
                             invhp2;
          double dpl;
          if (i == 0)
            dpl = (-3.0 * d1p(0, j, c) + 4.0 * d1p(1, j, c) - d1p(2, j, c)) /
                  (2.0 * g.h_last());
          else if (i == n - 1)
            dpl = (3.0 * d1p(n - 1, j, c) - 4.0 * d1p(n - 2, j, c) + d1p(n - 3, j, c)) /
                  (2.0 * g.h_last());
          else
            dpl = (d1p(i + 1, j, c) - d1p(i - 1, j, c)) / (2.0 * g.h_last());
          acc += dpp * dpp + 2.0 * dpl * dpl;
        }
      }
      out.at(i, j) = std::sqrt(acc);
    }
  return out;
}

double integrate(const DensityField& g) {
  double s = 0.0;
  for (double v : g.values) s += v;
  return s * g.grid.cell_volume();
}

}  // namespace surfcell::ref
