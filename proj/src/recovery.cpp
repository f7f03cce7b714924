#include "surfcell/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <thread>

#include "surfcell/rng.hpp"
#include "surfcell/stencil_ops.hpp"
#include "surfcell/waterfill.hpp"

namespace surfcell {

namespace {

constexpr double kPi = 3.14159265358979323846;

double smoothstep5(double t) {
  // quintic smoothstep: C^2, s(0) = 0, s(1) = 1
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

double wrap_dist(double a, double b) {
  double d = std::abs(a - b);
  return std::min(d, 1.0 - d);
}

// Periodic distance from x' to the interval [lo, hi].
double patch_distance(double xp, double lo, double hi) {
  if (xp >= lo && xp <= hi) return 0.0;
  return std::min(wrap_dist(xp, lo), wrap_dist(xp, hi));
}

struct Branch {
  const CellSolution* cell = nullptr;
  double budget = 0.0;
  double scale = 0.0;       // eps * L
  double lambda_eps = 0.0;  // cell lambda / (eps L)
  std::vector<double> shift;  // additive profile normalization
};

Branch make_branch(const CellSolution& cell, double budget, double eps,
                   std::span<const double> a) {
  Branch br;
  br.cell = &cell;
  br.budget = budget;
  br.scale = eps * cell.scale_l;
  br.lambda_eps = cell.lambda / br.scale;
  //

  // Match the profile's affine tails to the laminate tails: remove the mean
  // of the two end offsets (v ~ -a t + c_lo below, +a t + c_hi above).
  const Grid& g = cell.profile.grid;
  br.shift.resize(g.d);
  for (int c = 0; c < g.d; ++c) {
    const double c_lo = cell.profile.at(0, 0, c) + a[c] * g.x_last(0);
    const double c_hi = cell.profile.at(g.n_last - 1, 0, c) - a[c] * g.x_last(g.n_last - 1);
    br.shift[c] = -0.5 * (c_lo + c_hi);
  }
  return br;
}

// Rescaled profile field: base + eps L v((x_N - t1)/(eps L)), affine tails.
GridField branch_field(const Branch& br, const Grid& grid, const Laminate& lam) {
  const double t1 = lam.heights[0];
  const double half = 0.5 * br.scale;
  GridField out(grid);
  std::vector<double> v(grid.d);
  for (int i = 0; i < grid.rows(); ++i) {
    const double dt = grid.x_last(i) - t1;
    if (std::abs(dt) <= half) {
      sample_profile(br.cell->profile, dt / br.scale, v);
      for (int c = 0; c < grid.d; ++c) v[c] = br.scale * (v[c] + br.shift[c]);
    } else {
      const double side = dt > 0.0 ? 1.0 : -1.0;
      sample_profile(br.cell->profile, side * 0.5, v);
      for (int c = 0; c < grid.d; ++c)
        v[c] = br.scale * (v[c] + br.shift[c]) + lam.a[c] * (dt - side * half) * side;
    }
    for (int c = 0; c < grid.d; ++c) {
      const double base = lam.gamma0[c] + lam.a[c] * t1;
      for (int j = 0; j < grid.cols(); ++j) out.at(i, j, c) = base + v[c];
    }
  }
  return out;
}

// Slab density max{|hess z| + lambda_eps, 0}, renormalized to carry exactly
// the branch budget, plus the slack strip of width sqrt(eps).
DensityField branch_density(const Branch& br, const GridField& z, const Grid& grid,
                            double t1, double eps, double slack) {
  DensityField rho(grid);
  const double half = 0.5 * br.scale;
  const DensityField w = curvature_field(z);
  double slab_mass = 0.0;
  for (int i = 0; i < grid.rows(); ++i) {
    const double dt = std::abs(grid.x_last(i) - t1);
    if (dt >= half) continue;
    for (int j = 0; j < grid.cols(); ++j) {
      const double v = std::max(w.at(i, j) + br.lambda_eps, 0.0);
      rho.at(i, j) = v;
      slab_mass += v;
    }
  }
  slab_mass *= grid.cell_volume();
  if (br.budget > 0.0 && slab_mass > 0.0) {
    const double scale = br.budget / slab_mass;
    for (double& v : rho.values) v *= scale;
  } else {
    for (double& v : rho.values) v = 0.0;
  }
  if (slack > 0.0) {
    const double width = std::sqrt(eps);
    double strip_measure = 0.0;
    for (int i = 0; i < grid.rows(); ++i) {
      const double dt = std::abs(grid.x_last(i) - t1);
      if (dt > half && dt < half + width) strip_measure += grid.cols();
    }
    strip_measure *= grid.cell_volume();
    if (strip_measure <= 0.0)
      throw std::invalid_argument("recovery: slack strip holds no grid nodes");
    const double value = slack / strip_measure;
    for (int i = 0; i < grid.rows(); ++i) {
      const double dt = std::abs(grid.x_last(i) - t1);
      if (dt > half && dt < half + width)
        for (int j = 0; j < grid.cols(); ++j) rho.at(i, j) += value;
    }
  }
  return rho;
}

}  // namespace

void RecoveryConfig::validate() const {
  potential.validate();
  laminate.validate();
  if (laminate.heights.size() != 1)
    throw std::invalid_argument("recovery: construction handles exactly one interface");
  measure.validate(laminate);
  double density = -1.0;
  for (const auto& p : measure.patches) {
    if (p.interface_index != 0)
      throw std::invalid_argument("recovery: patches must sit on the single interface");
    if (density < 0.0)
      density = p.density;
    else if (std::abs(p.density - density) > 1e-12)
      throw std::invalid_argument("recovery: patches must share one density");
  }
  curve.validate();
  if (curve.points.empty()) throw std::invalid_argument("recovery: empty surface-tension curve");
  if (cell_gamma.profile.grid.N != 1 || cell_zero.profile.grid.N != 1)
    throw std::invalid_argument("recovery: cell solutions must be 1D profiles");
  if (cell_gamma.profile.grid.d != laminate.dim())
    throw std::invalid_argument("recovery: cell solution dimension mismatch");
  if (std::abs(cell_zero.gamma) > 1e-12)
    throw std::invalid_argument("recovery: cell_zero must be solved at budget 0");
  if (density >= 0.0 && std::abs(cell_gamma.gamma - density) > 1e-9)
    throw std::invalid_argument("recovery: cell_gamma budget does not match the patch density");
  if (epsilons.empty()) throw std::invalid_argument("recovery: empty epsilon list");
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    if (!(epsilons[i] > 0.0)) throw std::invalid_argument("recovery: eps must be positive");
    if (i > 0 && !(epsilons[i] < epsilons[i - 1]))
      throw std::invalid_argument("recovery: eps list must be strictly decreasing");
  }
  if (grids.size() != epsilons.size())
    throw std::invalid_argument("recovery: need one grid per eps");
  for (const Grid& g : grids) {
    g.validate();
    if (g.N != 2) throw std::invalid_argument("recovery: grids must be two-dimensional");
    if (g.d != laminate.dim()) throw std::invalid_argument("recovery: grid d mismatch");
  }
  if (!(delta > 0.0)) throw std::invalid_argument("recovery: delta must be positive");
  if (tilde_delta < 0.0) throw std::invalid_argument("recovery: tilde_delta must be >= 0");
  if (!(slab_half_height > 0.0 && slab_half_height <= 0.125))
    throw std::invalid_argument("recovery: slab_half_height must lie in (0, 1/8]");
  const double t1 = laminate.heights[0];
  for (double eps : epsilons) {
    const double reach = 0.5 * eps * std::max(cell_gamma.scale_l, cell_zero.scale_l) +
                         std::sqrt(eps);
    if (std::abs(t1) + reach >= 0.5)
      throw std::invalid_argument("recovery: slab and strips do not fit inside the box");
  }
}

double RecoveryConfig::patch_density() const {
  return measure.patches.empty() ? 0.0 : measure.patches.front().density;
}

RecoveryPair build_recovery(const RecoveryConfig& cfg, int eps_index) {
  cfg.validate();
  if (eps_index < 0 || eps_index >= static_cast<int>(cfg.epsilons.size()))
    throw std::invalid_argument("recovery: eps index out of range");
  const double eps = cfg.epsilons[eps_index];
  const Grid& grid = cfg.grids[eps_index];
  const Laminate& lam = cfg.laminate;
  const double t1 = lam.heights[0];

  const Branch br_gamma = make_branch(cfg.cell_gamma, cfg.patch_density(), eps, lam.a);
  const Branch br_zero = make_branch(cfg.cell_zero, 0.0, eps, lam.a);
  const double slab_rows = std::max(br_gamma.scale, br_zero.scale) / grid.h_last();
  if (slab_rows < 4.0) {
    const int needed = static_cast<int>(std::ceil(4.0 / std::max(br_gamma.scale,
                                                                 br_zero.scale)));
    throw std::invalid_argument(
        "recovery: slab thinner than four grid rows; need n_last >= " +
        std::to_string(needed));
  }

  const GridField z_gamma = branch_field(br_gamma, grid, lam);
  const GridField z_zero = branch_field(br_zero, grid, lam);
  const GridField u0 = rasterize(lam, grid);

  const double slack = cfg.tilde_delta * std::sqrt(eps);
  const DensityField rho_gamma = branch_density(br_gamma, z_gamma, grid, t1, eps, slack);
  const DensityField rho_zero = branch_density(br_zero, z_zero, grid, t1, eps, slack);

  // x' cutoff: 1 on the patch union, falling to 0 over width delta.
  const bool has_patches = !cfg.measure.patches.empty();
  std::vector<double> phi(grid.cols(), 0.0);
  for (int j = 0; j < grid.cols(); ++j) {
    if (!has_patches) break;
    double dmin = 1.0;
    for (const auto& p : cfg.measure.patches)
      dmin = std::min(dmin, patch_distance(grid.x_prime(j), p.lo, p.hi));
    phi[j] = smoothstep5(1.0 - dmin / cfg.delta);
  }

  // x_N cutoff: 1 within slab_half/3 of the interface, 0 beyond slab_half/2.
  const double inner = cfg.slab_half_height / 3.0;
  const double outer = cfg.slab_half_height / 2.0;
  std::vector<double> psi(grid.rows());
  for (int i = 0; i < grid.rows(); ++i) {
    const double dt = std::abs(grid.x_last(i) - t1);
    psi[i] = 1.0 - smoothstep5((dt - inner) / (outer - inner));
  }

  RecoveryPair out;
  out.eps = eps;
  out.slack = slack;
  out.u = GridField(grid);
  out.rho = DensityField(grid);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < grid.rows(); ++i)
    for (int j = 0; j < grid.cols(); ++j) {
      const double p = phi[j];
      const double s = psi[i];
      for (int c = 0; c < grid.d; ++c) {
        const double zb = p * z_gamma.at(i, j, c) + (1.0 - p) * z_zero.at(i, j, c);
        out.u.at(i, j, c) = s * zb + (1.0 - s) * u0.at(i, j, c);
      }
      out.rho.at(i, j) = p * rho_gamma.at(i, j) + (1.0 - p) * rho_zero.at(i, j);
    }
  apply_boundary_bands(out.u, lam.a);

  // flat atom bumps of radius eps^{1/(2N)}, renormalized to exact mass
  for (const auto& atom : cfg.measure.atoms) {
    const double radius = std::pow(eps, 1.0 / (2.0 * grid.N));
    double covered = 0.0;
    for (int i = 0; i < grid.rows(); ++i) {
      const double dl = grid.x_last(i) - atom.x_last;
      if (std::abs(dl) > radius) continue;
      for (int j = 0; j < grid.cols(); ++j) {
        const double dp = wrap_dist(grid.x_prime(j), atom.x_prime);
        if (dp * dp + dl * dl < radius * radius) covered += 1.0;
      }
    }
    covered *= grid.cell_volume();
    if (covered <= 0.0)
      throw std::invalid_argument("recovery: atom bump covers no grid node");
    const double value = atom.mass / covered;
    for (int i = 0; i < grid.rows(); ++i) {
      const double dl = grid.x_last(i) - atom.x_last;
      if (std::abs(dl) > radius) continue;
      for (int j = 0; j < grid.cols(); ++j) {
        const double dp = wrap_dist(grid.x_prime(j), atom.x_prime);
        if (dp * dp + dl * dl < radius * radius) out.rho.at(i, j) += value;
      }
    }
  }

  out.total_mass = integrate(out.rho);
  out.target_mass = cfg.measure.total_mass(lam);
  return out;
}

LimsupReport validate_limsup(const RecoveryConfig& cfg, int jobs) {
  cfg.validate();
  LimsupReport rep;
  bool extrap = false;
  rep.target = limit_energy(cfg.laminate, cfg.measure, cfg.curve, &extrap);
  const double t1 = cfg.laminate.heights[0];
  const double inner = cfg.slab_half_height / 3.0;
  const double outer = cfg.slab_half_height / 2.0;

  auto make_row = [&](int k) {
    const RecoveryPair pair = build_recovery(cfg, k);
    LimsupRow row;
    row.eps = pair.eps;
    row.energy = energy_e(pair.u, pair.rho, pair.eps, cfg.potential).total;
    row.target = rep.target;
    row.ratio = row.energy / rep.target;
    row.mass = pair.total_mass;
    row.mass_target = pair.target_mass;
    row.mass_err = std::abs(pair.total_mass - pair.target_mass);

    // cutoff-zone share: the psi blend bands plus the phi transition strips
    double glue = 0.0;
    {
      Region above = Region::last_slab(std::min(t1 + inner, 0.5), std::min(t1 + outer, 0.5));
      Region below = Region::last_slab(std::max(t1 - outer, -0.5), std::max(t1 - inner, -0.5));
      glue += energy_e(pair.u, pair.rho, pair.eps, cfg.potential, &above).total;
      glue += energy_e(pair.u, pair.rho, pair.eps, cfg.potential, &below).total;
      for (const auto& p : cfg.measure.patches) {
        if (p.hi - p.lo >= 1.0 - 1e-12) continue;  // full cover, no transition
        for (double edge_lo : {p.lo - cfg.delta, p.hi}) {
          Region strip;
          strip.lo_prime = std::max(edge_lo, -0.5);
          strip.hi_prime = std::min(edge_lo + cfg.delta, 0.5);
          strip.lo_last = std::max(t1 - outer, -0.5);
          strip.hi_last = std::min(t1 + outer, 0.5);
          if (strip.lo_prime < strip.hi_prime)
            glue += energy_e(pair.u, pair.rho, pair.eps, cfg.potential, &strip).total;
        }
      }
    }
    row.glue_share = glue / row.energy;

    const double slab_reach =
        0.5 * pair.eps * std::max(cfg.cell_gamma.scale_l, cfg.cell_zero.scale_l);
    row.pre_asymptotic = slab_reach >= inner;
    return row;
  };

  const int count = static_cast<int>(cfg.epsilons.size());
  rep.rows.resize(count);
  if (jobs <= 1 || count <= 1) {
    for (int k = 0; k < count; ++k) rep.rows[k] = make_row(k);
  } else {
    std::vector<std::thread> pool;
    const int nthreads = std::min(jobs, count);
    for (int t = 0; t < nthreads; ++t)
      pool.emplace_back([&, t]() {
        for (int k = t; k < count; k += nthreads) rep.rows[k] = make_row(k);
      });
    for (auto& th : pool) th.join();
  }

  const LimsupRow* prev = nullptr;
  const LimsupRow* first = nullptr;
  const LimsupRow* last = nullptr;
  for (const auto& row : rep.rows) {
    if (row.pre_asymptotic) continue;
    if (prev != nullptr && row.ratio > prev->ratio + 1e-12) rep.ratios_nonincreasing = false;
    prev = &row;
    if (first == nullptr) first = &row;
    last = &row;
  }
  if (last != nullptr) rep.final_ratio = last->ratio;
  if (first != nullptr && last != nullptr && first != last && first->mass_err > 0.0 &&
      last->mass_err > 0.0) {
    rep.mass_slope =
        std::log(first->mass_err / last->mass_err) / std::log(first->eps / last->eps);
  }
  return rep;
}

LiminfReport probe_liminf(const RecoveryConfig& cfg, int trials, std::uint64_t seed) {
  cfg.validate();
  if (trials < 1) throw std::invalid_argument("probe_liminf: trials must be >= 1");
  const int finest = static_cast<int>(cfg.epsilons.size()) - 1;
  const RecoveryPair base = build_recovery(cfg, finest);
  const Grid& grid = base.u.grid;
  const double eps = base.eps;

  LiminfReport rep;
  rep.trials = trials;
  bool extrap = false;
  rep.target = limit_energy(cfg.laminate, cfg.measure, cfg.curve, &extrap);
  rep.baseline = energy_e(base.u, base.rho, eps, cfg.potential).total;
  rep.min_energy = rep.baseline;

  const double t1 = cfg.laminate.heights[0];
  const double layer = eps * cfg.cell_gamma.scale_l;
  const double amp_scale = layer * cfg.potential.well_norm();
  const std::vector<double> weights(grid.num_nodes(), grid.cell_volume());
  const double lo_free = grid.x_last(grid.band);
  const double hi_free = grid.x_last(grid.n_last - grid.band - 1);

  for (int t = 0; t < trials; ++t) {
    double energy;
    if (t == 0) {
      energy = rep.baseline;  // unperturbed probe
    } else {
      Rng rng(Rng::derive(seed, static_cast<std::uint64_t>(t)));
      GridField u = base.u;
      const int modes = 1 + static_cast<int>(rng.next_u64() % 4);
      const double amp = amp_scale * std::exp(rng.uniform(std::log(1e-3), std::log(0.25)));
      for (int m = 0; m < modes; ++m) {
        const int k_prime = static_cast<int>(rng.next_u64() % 4);
        const double phase = rng.uniform(0.0, 2.0 * kPi);
        const double center = t1 + rng.uniform(-2.0, 2.0) * layer;
        const double width = layer * rng.uniform(0.5, 3.0);
        const double a_m = amp * rng.uniform(0.2, 1.0);
        const int comp = static_cast<int>(rng.next_u64() % grid.d);
        for (int i = grid.interior_begin(); i < grid.interior_end(); ++i) {
          const double x = grid.x_last(i);
          if (x <= lo_free || x >= hi_free) continue;
          const double arg = (x - center) / width;
          const double bump = std::exp(-0.5 * arg * arg);
          if (bump < 1e-12) continue;
          for (int j = 0; j < grid.cols(); ++j) {
            const double xp = grid.x_prime(j);
            u.at(i, j, comp) += a_m * bump * std::sin(2.0 * kPi * k_prime * xp + phase);
          }
        }
      }
      // re-balance the density at fixed total mass
      const DensityField g = curvature_field(u);
      const WaterfillResult wf = solve_lambda(std::span<const double>(g.values),
                                              std::span<const double>(weights),
                                              base.total_mass);
      DensityField rho(grid);
      rho.values = wf.v_star;
      energy = energy_e(u, rho, eps, cfg.potential).total;
    }
    rep.energies.push_back(energy);
    rep.min_energy = std::min(rep.min_energy, energy);
    if (energy < rep.target * (1.0 - rep.tolerance)) ++rep.violations;
  }
  return rep;
}

}  // namespace surfcell
