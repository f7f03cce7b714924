#include "surfcell/energy.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "surfcell/reduction.hpp"

namespace surfcell {

namespace {

constexpr int kMaxEntries = 64;  // d * N cap for stack buffers

inline int wrap(int j, int n) { return j < 0 ? j + n : (j >= n ? j - n : j); }

void check_spec_grid(const PotentialSpec& spec, const Grid& g) {
  g.validate();
  spec.validate();
  if (g.d != spec.d) throw std::invalid_argument("energy: field and potential d mismatch");
  if (g.N == 2 && spec.N != 2)
    throw std::invalid_argument("energy: 2D fields need a potential with N = 2");
  if (spec.d * spec.N > kMaxEntries)
    throw std::invalid_argument("energy: d*N exceeds the supported size");
}

// Interior-node discrete gradient (central in all axes) written into xi as a
// d x N matrix padded with zero prime columns for 1D grids against an N >= 2
// potential. Returns the squared Frobenius norm of the second gradient.
struct NodeDiff {
  double w2 = 0.0;  // |hess|^2
};

inline NodeDiff node_gradient_hessian(const GridField& u, int i, int j,
                                      const PotentialSpec& spec, double* xi,
                                      double* hess_ll, double* hess_pp, double* hess_pl) {
  const Grid& g = u.grid;
  const int d = g.d;
  const int Np = spec.N;
  const double inv2hl = 1.0 / (2.0 * g.h_last());
  const double invhl2 = 1.0 / (g.h_last() * g.h_last());
  NodeDiff nd;
  if (g.N == 1) {
    for (int c = 0; c < d; ++c) {
      for (int k = 0; k < Np; ++k) xi[c * Np + k] = 0.0;
      xi[c * Np + (Np - 1)] = (u.at(i + 1, 0, c) - u.at(i - 1, 0, c)) * inv2hl;
      const double dll =
          (u.at(i + 1, 0, c) - 2.0 * u.at(i, 0, c) + u.at(i - 1, 0, c)) * invhl2;
      hess_ll[c] = dll;
      nd.w2 += dll * dll;
    }
    return nd;
  }
  const int cols = g.cols();
  const int jm = wrap(j - 1, cols);
  const int jp = wrap(j + 1, cols);
  const double inv2hp = 1.0 / (2.0 * g.h_prime());
  const double invhp2 = 1.0 / (g.h_prime() * g.h_prime());
  const double inv4 = inv2hp * inv2hl;
  for (int c = 0; c < d; ++c) {
    xi[c * Np + 0] = (u.at(i, jp, c) - u.at(i, jm, c)) * inv2hp;
    xi[c * Np + 1] = (u.at(i + 1, j, c) - u.at(i - 1, j, c)) * inv2hl;
    const double dll = (u.at(i + 1, j, c) - 2.0 * u.at(i, j, c) + u.at(i - 1, j, c)) * invhl2;
    const double dpp = (u.at(i, jp, c) - 2.0 * u.at(i, j, c) + u.at(i, jm, c)) * invhp2;
    const double dpl = (u.at(i + 1, jp, c) - u.at(i + 1, jm, c) - u.at(i - 1, jp, c) +
                        u.at(i - 1, jm, c)) *
                       inv4;
    hess_ll[c] = dll;
    hess_pp[c] = dpp;
    hess_pl[c] = dpl;
    nd.w2 += dll * dll + dpp * dpp + 2.0 * dpl * dpl;
  }
  return nd;
}

enum class ThirdTerm { kDensity, kMultiplier };

struct EnergySums {
  double pot = 0.0;
  double sg = 0.0;
  double surf = 0.0;
};

// One deterministic block pass shared by E and F so that that the two
// energies accumulate in an identical order.
EnergySums accumulate_energy(const GridField& u, const DensityField* rho, double lambda,
                             double eps, const PotentialSpec& spec, const Region* region,
                             ThirdTerm mode) {
  const Grid& g = u.grid;
  const int cols = g.cols();
  const double vol = g.cell_volume();
  const double inv_eps = 1.0 / eps;
  const double l2 = lambda * lambda;
  const std::size_t count = g.num_nodes();
  const std::size_t nblocks = (count + kReductionBlock - 1) / kReductionBlock;
  std::vector<double> pot_parts(nblocks, 0.0), sg_parts(nblocks, 0.0),
      surf_parts(nblocks, 0.0);
#pragma omp parallel for schedule(static) if (nblocks > 4)
  for (long long b = 0; b < static_cast<long long>(nblocks); ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kReductionBlock;
    const std::size_t hi = std::min(lo + kReductionBlock, count);
    double pot = 0.0, sg = 0.0, surf = 0.0;
    std::array<double, kMaxEntries> xi, hll, hpp, hpl;
    for (std::size_t k = lo; k < hi; ++k) {
      const int i = static_cast<int>(k) / cols;
      const int j = static_cast<int>(k) % cols;
      if (region != nullptr) {
        const double xp = g.N == 2 ? g.x_prime(j) : 0.0;
        if (!region->contains(xp, g.x_last(i))) continue;
      }
      if (i == 0 || i == g.n_last - 1) {
        // Outermost rows have no central stencil; they are always pinned
        // affine (W = 0, |hess| = 0) and carry only the density term of E
        // (min{l^2, 0} = 0 for F). Inner band rows are evaluated like any
        // other row so that the matching between the band slope and the free
        // interior is priced.
        if (mode == ThirdTerm::kDensity) {
          const double r = rho->values[k];
          surf += eps * r * r;
        }
        continue;
      }
      const NodeDiff nd = node_gradient_hessian(u, i, j, spec, xi.data(), hll.data(),
                                                hpp.data(), hpl.data());
      pot += inv_eps * eval_w(spec, std::span<const double>(xi.data(), spec.d * spec.N));
      sg += eps * nd.w2;
      if (mode == ThirdTerm::kDensity) {
        const double w = std::sqrt(nd.w2);
        const double diff = rho->values[k] - w;
        surf += eps * diff * diff;
      } else {
        surf += eps * (nd.w2 < l2 ? nd.w2 : l2);
      }
    }
    pot_parts[static_cast<std::size_t>(b)] = pot;
    sg_parts[static_cast<std::size_t>(b)] = sg;
    surf_parts[static_cast<std::size_t>(b)] = surf;
  }
  EnergySums sums;
  sums.pot = pairwise_combine(pot_parts);
  sums.sg = pairwise_combine(sg_parts);
  sums.surf = pairwise_combine(surf_parts);
  sums.pot *= vol;
  sums.sg *= vol;
  sums.surf *= vol;
  return sums;
}

EnergyBreakdown to_breakdown(const EnergySums& s, double eps) {
  EnergyBreakdown b;
  b.potential = s.pot;
  b.second_gradient = s.sg;
  b.surfactant = s.surf;
  b.total = b.potential + b.second_gradient + b.surfactant;
  b.eps = eps;
  return b;
}

}  // namespace

EnergyBreakdown energy_e(const GridField& u, const DensityField& rho, double eps,
                         const PotentialSpec& spec, const Region* region) {
  check_spec_grid(spec, u.grid);
  if (!(eps > 0.0)) throw std::invalid_argument("energy: eps must be positive");
  if (rho.grid != u.grid) throw std::invalid_argument("energy: rho grid mismatch");
  if (region != nullptr) region->validate();
  return to_breakdown(accumulate_energy(u, &rho, 0.0, eps, spec, region, ThirdTerm::kDensity),
                      eps);
}

EnergyBreakdown energy_f(const GridField& u, double lambda, double eps,
                         const PotentialSpec& spec, const Region* region) {
  check_spec_grid(spec, u.grid);
  if (!(eps > 0.0)) throw std::invalid_argument("energy: eps must be positive");
  if (lambda > 0.0) throw std::invalid_argument("energy: lambda must be <= 0");
  if (region != nullptr) region->validate();
  return to_breakdown(
      accumulate_energy(u, nullptr, lambda, eps, spec, region, ThirdTerm::kMultiplier), eps);
}

GridField grad_f(const GridField& u, double lambda, double eps, const PotentialSpec& spec) {
  check_spec_grid(spec, u.grid);
  if (!(eps > 0.0)) throw std::invalid_argument("energy: eps must be positive");
  if (lambda > 0.0) throw std::invalid_argument("energy: lambda must be <= 0");
  const Grid& g = u.grid;
  const int rows = g.rows();
  const int cols = g.cols();
  const int d = g.d;
  const double vol = g.cell_volume();
  const double inv_eps = 1.0 / eps;
  const double l2 = lambda * lambda;
  const double inv2hl = 1.0 / (2.0 * g.h_last());
  const double invhl2 = 1.0 / (g.h_last() * g.h_last());
  const double inv2hp = g.N == 2 ? 1.0 / (2.0 * g.h_prime()) : 0.0;
  const double invhp2 = g.N == 2 ? 1.0 / (g.h_prime() * g.h_prime()) : 0.0;
  const double inv4 = inv2hp * inv2hl;

  // Coefficient fields over interior nodes (zero elsewhere):
  //   P = (1/eps) W'(grad u)              d x N per node
  //   S = 2 eps c |hess entries| with c = 1 + [w^2 < l^2]; mixed entries carry
  //       the Frobenius double count.
  const std::size_t nn = g.num_nodes();
  std::vector<double> P(nn * d * (g.N == 2 ? 2 : 1), 0.0);
  std::vector<double> Sll(nn * d, 0.0);
  std::vector<double> Spp(g.N == 2 ? nn * d : 0, 0.0);
  std::vector<double> Spl(g.N == 2 ? nn * d : 0, 0.0);
  const int pstride = g.N == 2 ? 2 : 1;
  const bool par = g.num_nodes() > 16384;

#pragma omp parallel for schedule(static) if (par)
  for (int i = 1; i < rows - 1; ++i) {
    std::array<double, kMaxEntries> xi, wgrad, hll, hpp, hpl;
    for (int j = 0; j < cols; ++j) {
      const NodeDiff nd = node_gradient_hessian(u, i, j, spec, xi.data(), hll.data(),
                                                hpp.data(), hpl.data());
      grad_w(spec, std::span<const double>(xi.data(), spec.d * spec.N),
             std::span<double>(wgrad.data(), spec.d * spec.N));
      const double cmul = 2.0 * eps * (nd.w2 < l2 ? 2.0 : 1.0);
      const std::size_t k = g.node_index(i, j);
      for (int c = 0; c < d; ++c) {
        if (g.N == 2) {
          P[(k * d + c) * 2 + 0] = inv_eps * wgrad[c * spec.N + 0];
          P[(k * d + c) * 2 + 1] = inv_eps * wgrad[c * spec.N + 1];
          Spp[k * d + c] = cmul * hpp[c];
          Spl[k * d + c] = 2.0 * cmul * hpl[c];
        } else {
          P[k * d + c] = inv_eps * wgrad[c * spec.N + (spec.N - 1)];
        }
        Sll[k * d + c] = cmul * hll[c];
      }
    }
  }

  GridField out(g);
  auto cell = [&](const std::vector<double>& v, int i, int j, int c, int comp,
                  int stride) -> double {
    if (i < 0 || i >= rows) return 0.0;
    const int jj = wrap(j, cols);
    return v[(g.node_index(i, jj) * d + c) * stride + comp];
  };
#pragma omp parallel for schedule(static) if (par)
  for (int i = 0; i < rows; ++i) {
    if (g.is_band_row(i)) continue;  // pinned
    for (int j = 0; j < cols; ++j)
      for (int c = 0; c < d; ++c) {
        double acc = 0.0;
        // transpose of the central first differences
        acc += (cell(P, i - 1, j, c, pstride - 1, pstride) -
                cell(P, i + 1, j, c, pstride - 1, pstride)) *
               inv2hl;
        // transpose of the second differences along x_N
        acc += (cell(Sll, i - 1, j, c, 0, 1) - 2.0 * cell(Sll, i, j, c, 0, 1) +
                cell(Sll, i + 1, j, c, 0, 1)) *
               invhl2;
        if (g.N == 2) {
          acc += (cell(P, i, j - 1, c, 0, pstride) - cell(P, i, j + 1, c, 0, pstride)) *
                 inv2hp;
          acc += (cell(Spp, i, j - 1, c, 0, 1) - 2.0 * cell(Spp, i, j, c, 0, 1) +
                  cell(Spp, i, j + 1, c, 0, 1)) *
                 invhp2;
          acc += (cell(Spl, i - 1, j - 1, c, 0, 1) - cell(Spl, i - 1, j + 1, c, 0, 1) -
                  cell(Spl, i + 1, j - 1, c, 0, 1) + cell(Spl, i + 1, j + 1, c, 0, 1)) *
                 inv4;
        }
        out.at(i, j, c) = vol * acc;
      }
  }
  return out;
}

DensityField curvature_field(const GridField& u) {
  const Grid& g = u.grid;
  g.validate();
  DensityField out(g);
  const int cols = g.cols();
  const int d = g.d;
  const double invhl2 = 1.0 / (g.h_last() * g.h_last());
  const double invhp2 = g.N == 2 ? 1.0 / (g.h_prime() * g.h_prime()) : 0.0;
  const double inv4 =
      g.N == 2 ? 1.0 / (4.0 * g.h_prime() * g.h_last()) : 0.0;
#pragma omp parallel for schedule(static) if (g.num_nodes() > 16384)
  for (int i = 1; i < g.n_last - 1; ++i)
    for (int j = 0; j < cols; ++j) {
      double acc = 0.0;
      for (int c = 0; c < d; ++c) {
        const double dll =
            (u.at(i + 1, j, c) - 2.0 * u.at(i, j, c) + u.at(i - 1, j, c)) * invhl2;
        acc += dll * dll;
        if (g.N == 2) {
          const int jm = wrap(j - 1, cols);
          const int jp = wrap(j + 1, cols);
          const double dpp =
              (u.at(i, jp, c) - 2.0 * u.at(i, j, c) + u.at(i, jm, c)) * invhp2;
          const double dpl = (u.at(i + 1, jp, c) - u.at(i + 1, jm, c) - u.at(i - 1, jp, c) +
                              u.at(i - 1, jm, c)) *
                             inv4;
          acc += dpp * dpp + 2.0 * dpl * dpl;
        }
      }
      out.at(i, j) = std::sqrt(acc);
    }
  return out;
}

DensityField rho_from_lambda(const GridField& u, double lambda) {
  if (lambda > 0.0) throw std::invalid_argument("rho_from_lambda: lambda must be <= 0");
  DensityField w = curvature_field(u);
#pragma omp parallel for schedule(static) if (w.values.size() > 16384)
  for (long long k = 0; k < static_cast<long long>(w.values.size()); ++k) {
    const double v = lambda + w.values[k];
    w.values[k] = v > 0.0 ? v : 0.0;
  }
  return w;
}

double constraint_mass(const GridField& u, double lambda) {
  if (lambda > 0.0) throw std::invalid_argument("constraint_mass: lambda must be <= 0");
  const DensityField w = curvature_field(u);
  const double vol = u.grid.cell_volume();
  return vol * block_sum(w.values.size(), [&](std::size_t k) {
           const double v = lambda + w.values[k];
           return v > 0.0 ? v : 0.0;
         });
}

std::pair<double, double> clipped_min_identity(double lambda, double w) {
  if (lambda > 0.0) throw std::invalid_argument("clipped_min_identity: lambda must be <= 0");
  if (w < 0.0) throw std::invalid_argument("clipped_min_identity: w must be >= 0");
  const double lhs = std::min(lambda * lambda + w * w, 2.0 * w * w);
  const double m = std::max(lambda + w, 0.0) - w;
  const double rhs = w * w + m * m;
  return {lhs, rhs};
}

}  // namespace surfcell
