#include "surfcell/stencil_ops.hpp"

#include <cmath>
#include <stdexcept>

#include "surfcell/reduction.hpp"

namespace surfcell {

namespace {

inline int wrap(int j, int n) { return j < 0 ? j + n : (j >= n ? j - n : j); }

// One-sided x_N stencils at the grid ends, written in difference form so they
// vanish exactly on constant data. First derivative is 3-point second order;
// second derivative is 5-point third order (the 3-point one-sided second
// difference is too lossy for the operator contracts).
inline double d1_last(const GridField& f, int i, int j, int c, double inv2h) {
  const int n = f.grid.n_last;
  if (i == 0) {
    const double d1 = f.at(1, j, c) - f.at(0, j, c);
    const double d2 = f.at(2, j, c) - f.at(0, j, c);
    return (4.0 * d1 - d2) * inv2h;
  }
  if (i == n - 1) {
    const double d1 = f.at(n - 2, j, c) - f.at(n - 1, j, c);
    const double d2 = f.at(n - 3, j, c) - f.at(n - 1, j, c);
    return -(4.0 * d1 - d2) * inv2h;
  }
  return (f.at(i + 1, j, c) - f.at(i - 1, j, c)) * inv2h;
}

inline double d2_last(const GridField& f, int i, int j, int c, double invh2) {
  const int n = f.grid.n_last;
  if (i == 0) {
    const double d1 = f.at(1, j, c) - f.at(0, j, c);
    const double d2 = f.at(2, j, c) - f.at(0, j, c);
    const double d3 = f.at(3, j, c) - f.at(0, j, c);
    const double d4 = f.at(4, j, c) - f.at(0, j, c);
    return (-104.0 * d1 + 114.0 * d2 - 56.0 * d3 + 11.0 * d4) * invh2 / 12.0;
  }
  if (i == n - 1) {
    const double d1 = f.at(n - 2, j, c) - f.at(n - 1, j, c);
    const double d2 = f.at(n - 3, j, c) - f.at(n - 1, j, c);
    const double d3 = f.at(n - 4, j, c) - f.at(n - 1, j, c);
    const double d4 = f.at(n - 5, j, c) - f.at(n - 1, j, c);
    return (-104.0 * d1 + 114.0 * d2 - 56.0 * d3 + 11.0 * d4) * invh2 / 12.0;
  }
  return (f.at(i + 1, j, c) - 2.0 * f.at(i, j, c) + f.at(i - 1, j, c)) * invh2;
}

}  // namespace

MatrixField gradient(const GridField& f) {
  const Grid& g = f.grid;
  g.validate();
  MatrixField out(g);
  const int rows = g.rows();
  const int cols = g.cols();
  const int d = g.d;
  const int N = g.N;
  const double inv2hp = g.N == 2 ? 1.0 / (2.0 * g.h_prime()) : 0.0;
  const double inv2hl = 1.0 / (2.0 * g.h_last());
#pragma omp parallel for schedule(static) if (g.num_nodes() > 16384)
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      double* m = out.at(i, j);
      for (int c = 0; c < d; ++c) {
        if (N == 2) {
          const int jm = wrap(j - 1, cols);
          const int jp = wrap(j + 1, cols);
          m[c * N + 0] = (f.at(i, jp, c) - f.at(i, jm, c)) * inv2hp;
        }
        m[c * N + (N - 1)] = d1_last(f, i, j, c, inv2hl);
      }
    }
  }
  return out;
}

DensityField hessian_norm(const GridField& f) {
  const Grid& g = f.grid;
  g.validate();
  DensityField out(g);
  const int rows = g.rows();
  const int cols = g.cols();
  const int d = g.d;
  const double invhp2 = g.N == 2 ? 1.0 / (g.h_prime() * g.h_prime()) : 0.0;
  const double invhl2 = 1.0 / (g.h_last() * g.h_last());
  const double inv2hp = g.N == 2 ? 1.0 / (2.0 * g.h_prime()) : 0.0;
  const double inv2hl = 1.0 / (2.0 * g.h_last());
#pragma omp parallel for schedule(static) if (g.num_nodes() > 16384)
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      double acc = 0.0;
      for (int c = 0; c < d; ++c) {
        const double dll = d2_last(f, i, j, c, invhl2);
        acc += dll * dll;
        if (g.N == 2) {
          const int jm = wrap(j - 1, cols);
          const int jp = wrap(j + 1, cols);
          const double dpp =
              (f.at(i, jp, c) - 2.0 * f.at(i, j, c) + f.at(i, jm, c)) * invhp2;
          // Mixed derivative: x_N stencil applied to the periodic central
          // first difference; the two orders commute.
          const int n = g.n_last;
          double dpl;
          auto dp = [&](int row) {
            return (f.at(row, jp, c) - f.at(row, jm, c)) * inv2hp;
          };
          if (i == 0)
            dpl = (4.0 * (dp(1) - dp(0)) - (dp(2) - dp(0))) * inv2hl;
          else if (i == n - 1)
            dpl = -(4.0 * (dp(n - 2) - dp(n - 1)) - (dp(n - 3) - dp(n - 1))) * inv2hl;
          else
            dpl = (dp(i + 1) - dp(i - 1)) * inv2hl;
          acc += dpp * dpp + 2.0 * dpl * dpl;
        }
      }
      out.at(i, j) = std::sqrt(acc);
    }
  }
  return out;
}

void apply_boundary_bands(GridField& f, std::span<const double> a) {
  const Grid& g = f.grid;
  g.validate();
  if (a.size() != static_cast<std::size_t>(g.d))
    throw std::invalid_argument("apply_boundary_bands: a must have d components");
  const int cols = g.cols();
  const int band = g.band;
  const int n = g.n_last;
  for (int c = 0; c < g.d; ++c) {
    // Bottom: -a x_N + c_lo, constant matched to the first free layer mean.
    double mean_lo = 0.0;
    for (int j = 0; j < cols; ++j) mean_lo += f.at(band, j, c);
    mean_lo /= cols;
    const double c_lo = mean_lo + a[c] * g.x_last(band);
    for (int i = 0; i < band; ++i) {
      const double v = -a[c] * g.x_last(i) + c_lo;
      for (int j = 0; j < cols; ++j) f.at(i, j, c) = v;
    }
    // Top: +a x_N + c_hi.
    double mean_hi = 0.0;
    for (int j = 0; j < cols; ++j) mean_hi += f.at(n - band - 1, j, c);
    mean_hi /= cols;
    const double c_hi = mean_hi - a[c] * g.x_last(n - band - 1);
    for (int i = n - band; i < n; ++i) {
      const double v = a[c] * g.x_last(i) + c_hi;
      for (int j = 0; j < cols; ++j) f.at(i, j, c) = v;
    }
  }
}

double integrate(const DensityField& gfield, const Region* region) {
  const Grid& g = gfield.grid;
  const double vol = g.cell_volume();
  if (region == nullptr) {
    return vol * block_sum(g.num_nodes(),
                           [&](std::size_t k) { return gfield.values[k]; });
  }
  region->validate();
  const Region r = *region;
  const int cols = g.cols();
  return vol * block_sum(g.num_nodes(), [&](std::size_t k) {
           const int i = static_cast<int>(k) / cols;
           const int j = static_cast<int>(k) % cols;
           const double xp = g.N == 2 ? g.x_prime(j) : 0.0;
           return r.contains(xp, g.x_last(i)) ? gfield.values[k] : 0.0;
         });
}

GridField shift_prime(const GridField& f, int k) {
  const Grid& g = f.grid;
  if (g.N == 1) return f;
  GridField out(g);
  const int rows = g.rows();
  const int cols = g.cols();
  const int shift = ((k % cols) + cols) % cols;
#pragma omp parallel for schedule(static) if (g.num_nodes() > 16384)
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) {
      const int src = (j - shift + cols) % cols;
      for (int c = 0; c < g.d; ++c) out.at(i, j, c) = f.at(i, src, c);
    }
  return out;
}

}  // namespace surfcell
