#include "surfcell/cellproblem.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "surfcell/banded.hpp"
#include "surfcell/fft.hpp"
#include "surfcell/lbfgs.hpp"
#include "surfcell/rng.hpp"
#include "surfcell/stencil_ops.hpp"
#include "surfcell/waterfill.hpp"

namespace surfcell {

namespace {

// Constant-coefficient surrogate of the u-step Hessian
//   M = vol [ cW (D1'D1)  +  cH (D2'D2 and cross) ],   cW ~ W''/eps, cH ~ 4 eps,
// assembled as Gram matrices of the interior difference rows with pinned band
// DOFs, diagonalized along the periodic axis by FFT and inverted by
// pentadiagonal solves along x_N. Serving as H0 this removes the 1/h^4
// stiffness that stalls plain L-BFGS on fine grids.
class UStepPreconditioner {
 public:
  void build(const Grid& grid, double eps, double w2scale) {
    grid_ = grid;
    const int cols = grid.cols();
    usable_ = grid.N == 1 || is_power_of_two(static_cast<std::size_t>(cols));
    if (!usable_) return;
    const int n = grid.n_last;
    const double vol = grid.cell_volume();
    const double cw = w2scale / eps;
    const double ch = 4.0 * eps;
    const double hl = grid.h_last();
    const double hp = grid.N == 2 ? grid.h_prime() : 1.0;
    systems_.assign(cols, BandedSpd());
    for (int k = 0; k < cols; ++k) {
      double tp = 0.0;
      if (grid.N == 2) {
        const double s = std::sin(3.14159265358979323846 * k / cols);
        tp = 4.0 * s * s / (hp * hp);  // symbol of the periodic second difference
      }
      const double pp = tp * tp;
      std::vector<std::vector<double>> bands(3, std::vector<double>(n, 0.0));
      auto add = [&](int i, int j, double v) {
        if (grid.is_band_row(i) || grid.is_band_row(j)) return;
        if (j < i) std::swap(i, j);
        bands[j - i][i] += v;
      };
      // Gram of the central first difference over interior evaluation rows
      // (unordered index pairs accumulated once into the symmetric storage)
      const double d1 = 1.0 / (2.0 * hl);
      for (int m = 1; m < n - 1; ++m) {
        const double w = cw + 2.0 * ch * tp;  // includes the mixed-term symbol
        add(m - 1, m - 1, w * d1 * d1);
        add(m + 1, m + 1, w * d1 * d1);
        add(m - 1, m + 1, -w * d1 * d1);
      }
      // Gram of the second difference
      const double d2 = 1.0 / (hl * hl);
      for (int m = 1; m < n - 1; ++m) {
        const double row[3] = {d2, -2.0 * d2, d2};
        for (int a = 0; a < 3; ++a)
          for (int b = a; b < 3; ++b) add(m - 1 + a, m - 1 + b, ch * row[a] * row[b]);
      }
      for (int i = 0; i < n; ++i) {
        if (grid.is_band_row(i)) {
          bands[0][i] = 1.0;
          continue;
        }
        bands[0][i] += cw * tp + ch * pp + 1e-30;
        for (auto& band : bands) band[i] *= vol;
      }
      systems_[k].factor(bands);
    }
  }

  bool usable() const { return usable_; }

  void apply(std::vector<double>& g) const {
    if (!usable_) return;
    const Grid& grid = grid_;
    const int n = grid.n_last;
    const int cols = grid.cols();
    const int d = grid.d;
    if (grid.N == 1) {
      std::vector<double> rhs(n);
      for (int c = 0; c < d; ++c) {
        for (int i = 0; i < n; ++i) rhs[i] = g[static_cast<std::size_t>(i) * d + c];
        systems_[0].solve(rhs.data());
        for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i) * d + c] = rhs[i];
      }
      return;
    }
    std::vector<std::complex<double>> buf(cols);
    std::vector<std::vector<std::complex<double>>> freq(
        cols, std::vector<std::complex<double>>(n));
    std::vector<double> re(n), im(n);
    for (int c = 0; c < d; ++c) {
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < cols; ++j)
          buf[j] = g[grid.value_index(i, j, c)];
        fft_inplace(buf, false);
        for (int k = 0; k < cols; ++k) freq[k][i] = buf[k];
      }
      for (int k = 0; k < cols; ++k) {
        for (int i = 0; i < n; ++i) {
          re[i] = freq[k][i].real();
          im[i] = freq[k][i].imag();
        }
        systems_[k].solve(re.data());
        systems_[k].solve(im.data());
        for (int i = 0; i < n; ++i) freq[k][i] = {re[i], im[i]};
      }
      for (int i = 0; i < n; ++i) {
        for (int k = 0; k < cols; ++k) buf[k] = freq[k][i];
        fft_inplace(buf, true);
        for (int j = 0; j < cols; ++j)
          g[grid.value_index(i, j, c)] = buf[j].real();
      }
    }
  }

 private:
  Grid grid_;
  std::vector<BandedSpd> systems_;
  bool usable_ = false;
};

double ramp_s(double t, double w) {
  const double half = 0.5 * w;
  if (std::abs(t) >= half) return std::abs(t) - 0.1875 * w;
  const double tau = t / half;
  const double tau2 = tau * tau;
  return half * (0.75 * tau2 - 0.125 * tau2 * tau2);
}

void add_seeded_perturbation(GridField& u, double amplitude, std::uint64_t seed) {
  if (amplitude == 0.0) return;
  const Grid& g = u.grid;
  Rng rng(seed);
  const int modes = 3;
  std::vector<double> amp(modes * g.d), phase(modes * g.d);
  for (double& v : amp) v = amplitude * rng.uniform(-1.0, 1.0);
  for (double& v : phase) v = rng.uniform(0.0, 6.283185307179586);
  const double lo = g.x_last(g.band);
  const double hi = g.x_last(g.n_last - g.band - 1);
  for (int i = g.interior_begin(); i < g.interior_end(); ++i) {
    const double t = g.x_last(i);
    // window vanishing at the band edges
    const double s = (t - lo) / (hi - lo);
    const double window = 16.0 * s * s * (1.0 - s) * (1.0 - s);
    for (int j = 0; j < g.cols(); ++j) {
      const double xp = g.N == 2 ? g.x_prime(j) : 0.0;
      for (int c = 0; c < g.d; ++c) {
        double v = 0.0;
        for (int m = 0; m < modes; ++m)
          v += amp[m * g.d + c] *
               std::sin(2.0 * 3.141592653589793 * (m + 1) * xp + phase[m * g.d + c]);
        if (g.N == 1) v = amp[c] * std::sin(phase[c] + 6.0 * t);
        u.at(i, j, c) += window * v;
      }
    }
  }
}

struct SweepState {
  GridField u;
  double lambda = 0.0;
  double scale_l = 1.0;
  double energy = 0.0;
};

}  // namespace

GridField ramp_profile(const Grid& grid, std::span<const double> a, double width) {
  GridField u(grid);
  for (int i = 0; i < grid.rows(); ++i) {
    const double s = ramp_s(grid.x_last(i), width);
    for (int j = 0; j < grid.cols(); ++j)
      for (int c = 0; c < grid.d; ++c) u.at(i, j, c) = a[c] * s;
  }
  return u;
}

double optimize_scale(const std::function<double(double)>& value_at, double l_min,
                      double l_max, int iters, bool* bracket_hit) {
  if (bracket_hit) *bracket_hit = false;
  if (!(l_min > 0.0)) throw std::invalid_argument("optimize_scale: bracket must be positive");
  if (l_max < l_min) throw std::invalid_argument("optimize_scale: bracket reversed");
  if (l_max == l_min) return l_min;
  auto near_edge = [](double x, double lo, double hi) {
    const double margin = 0.01 * (hi - lo);
    return x <= lo + margin || x >= hi - margin;
  };
  double l = golden_section(value_at, l_min, l_max, iters);
  if (near_edge(l, l_min, l_max)) {
    // widen once, then flag
    const double lo = 0.5 * l_min;
    const double hi = 2.0 * l_max;
    l = golden_section(value_at, lo, hi, iters);
    if (near_edge(l, lo, hi) && bracket_hit) *bracket_hit = true;
  }
  return l;
}

CellSolution solve_cell(const PotentialSpec& spec, double gamma, const Grid& grid,
                        const SolverOptions& opts, const GridField* init) {
  spec.validate();
  grid.validate();
  if (gamma < 0.0) throw std::invalid_argument("solve_cell: budget must be >= 0");
  if (grid.d != spec.d) throw std::invalid_argument("solve_cell: grid/potential d mismatch");

  SweepState st;
  if (init != nullptr) {
    if (init->grid != grid) throw std::invalid_argument("solve_cell: init grid mismatch");
    st.u = *init;
  } else {
    st.u = ramp_profile(grid, spec.a, opts.ramp_width);
    add_seeded_perturbation(st.u, opts.init_perturb * spec.well_norm(), opts.seed);
  }
  apply_boundary_bands(st.u, spec.a);

  const double vol = grid.cell_volume();
  const std::vector<double> weights(grid.num_nodes(), vol);
  auto waterfill_lambda = [&](const GridField& u) {
    const DensityField g = curvature_field(u);
    return solve_lambda(std::span<const double>(g.values),
                        std::span<const double>(weights), gamma);
  };

  CellSolution sol;
  sol.gamma = gamma;

  st.lambda = waterfill_lambda(st.u).lambda;
  st.scale_l = std::sqrt(opts.l_min * opts.l_max);

  // L-step on the fixed bracket; at fixed (u, lambda) the value is
  // l * integral(W) + integral(curvature terms) / l, so the golden search
  // probes the exact profile energies without re-evaluating the grid.
  auto scale_step = [&]() {
    const EnergyBreakdown b = energy_f(st.u, st.lambda, 1.0 / st.scale_l, spec);
    const double pot_int = b.potential / st.scale_l;         // integral of W
    const double curv_int = (b.second_gradient + b.surfactant) * st.scale_l;
    auto value_at = [&](double l) { return l * pot_int + curv_int / l; };
    const double l_new =
        golden_section(value_at, opts.l_min, opts.l_max, opts.golden_iters);
    if (value_at(l_new) <= value_at(st.scale_l)) st.scale_l = l_new;  // keep incumbent
  };

  scale_step();  // match the scale to the (possibly warm) initial profile
  st.energy = energy_f(st.u, st.lambda, 1.0 / st.scale_l, spec).total;

  LbfgsOptions lopts;
  lopts.max_iters = opts.u_iters;
  lopts.grad_tol = opts.grad_tol;

  // curvature scale of the two quadratic-or-steeper well branches
  const double w2scale =
      spec.p == 2.0
          ? 2.0
          : spec.p * (spec.p - 1.0) * std::pow(2.0 * spec.well_norm(), spec.p - 2.0);
  UStepPreconditioner precond;

  // At budget 0 any level below -max|hess u| leaves the energy unchanged
  // (the curvature term doubles everywhere) but the descent direction honest:
  // with the canonical level the peak node rides the flat l^2 branch and the
  // profile over-sharpens. A deep level makes the u-step see the doubled
  // functional exactly.
  const double lambda_floor = -1e15;

  int sweep = 0;
  for (; sweep < opts.max_sweeps; ++sweep) {
    // (i) profile descent at fixed (lambda, L)
    const double u_lambda = gamma == 0.0 ? lambda_floor : st.lambda;
    const double eps = 1.0 / st.scale_l;
    precond.build(grid, eps, w2scale);
    if (precond.usable())
      lopts.precondition = [&precond](std::vector<double>& v) { precond.apply(v); };
    GridField work(grid);
    auto objective = [&](const std::vector<double>& x, std::vector<double>& grad) {
      work.values = x;
      const GridField gf = grad_f(work, u_lambda, eps, spec);
      grad = gf.values;
      return energy_f(work, u_lambda, eps, spec).total;
    };
    auto value_only = [&](const std::vector<double>& x) {
      work.values = x;
      return energy_f(work, u_lambda, eps, spec).total;
    };
    LbfgsResult lres = minimize_lbfgs(st.u.values, objective, lopts, value_only);
    sol.u_iterations += lres.iterations;
    sol.final_grad_norm = lres.grad_norm;

    // (ii) water-fill level update
    st.lambda = waterfill_lambda(st.u).lambda;

    // (iii) scale update at the new pair
    scale_step();

    const double e_new = energy_f(st.u, st.lambda, 1.0 / st.scale_l, spec).total;
    const double decrease = st.energy - e_new;
    st.energy = e_new;
    if (std::abs(decrease) < opts.energy_tol * std::max(1.0, std::abs(e_new))) {
      sol.converged = true;
      ++sweep;
      break;
    }
  }
  sol.sweeps = sweep;
  const double edge = 0.01 * (opts.l_max - opts.l_min);
  sol.bracket_hit = opts.l_max > opts.l_min &&
                    (st.scale_l <= opts.l_min + edge || st.scale_l >= opts.l_max - edge);

  // Final level refresh so the returned (profile, lambda) pair is the
  // water-fill fixed point; the refresh never increases the energy.
  const WaterfillResult wf = waterfill_lambda(st.u);
  st.lambda = wf.lambda;
  sol.lambda = st.lambda;
  sol.scale_l = st.scale_l;
  sol.profile = st.u;
  sol.breakdown = energy_f(st.u, st.lambda, 1.0 / st.scale_l, spec);
  sol.value = sol.breakdown.total;
  sol.constraint_mass = constraint_mass(st.u, st.lambda);
  return sol;
}

CellSolution solve_profile_1d(const PotentialSpec& spec, double gamma, int n,
                              const SolverOptions& opts) {
  if (n < 64) throw std::invalid_argument("solve_profile_1d: n must be >= 64");
  Grid grid;
  grid.N = 1;
  grid.d = spec.d;
  grid.n_prime = 4;
  grid.n_last = n;
  grid.band = opts.band;
  return solve_cell(spec, gamma, grid, opts);
}

CellSolution solve_profile_nd(const PotentialSpec& spec, double gamma, const Grid& grid,
                              const SolverOptions& opts, const GridField* init) {
  if (grid.N != 2) throw std::invalid_argument("solve_profile_nd: grid must have N = 2");
  if (init != nullptr) return solve_cell(spec, gamma, grid, opts, init);
  // seed from the 1D reduction at matching x_N resolution
  SolverOptions opts1d = opts;
  opts1d.init_perturb = 0.0;
  const CellSolution sol1d =
      solve_profile_1d(spec, gamma, std::max(64, grid.n_last), opts1d);
  GridField u0(grid);
  std::vector<double> v(grid.d);
  for (int i = 0; i < grid.rows(); ++i) {
    sample_profile(sol1d.profile, grid.x_last(i), v);
    for (int j = 0; j < grid.cols(); ++j)
      for (int c = 0; c < grid.d; ++c) u0.at(i, j, c) = v[c];
  }
  add_seeded_perturbation(u0, opts.init_perturb * spec.well_norm(), opts.seed);
  return solve_cell(spec, gamma, grid, opts, &u0);
}

void PhiCurve::validate() const {
  for (std::size_t i = 0; i < points.size(); ++i) {
    const PhiPoint& p = points[i];
    if (!(std::isfinite(p.phi) && p.phi >= 0.0))
      throw std::invalid_argument("phi curve: value must be finite and nonnegative");
    if (i > 0 && !(p.gamma > points[i - 1].gamma))
      throw std::invalid_argument("phi curve: budgets must be strictly increasing");
  }
}

double PhiCurve::interpolate(double gamma, bool* extrapolated) const {
  if (points.empty()) throw std::invalid_argument("phi curve: empty");
  if (extrapolated) *extrapolated = false;
  if (gamma <= points.front().gamma) {
    if (extrapolated) *extrapolated = gamma < points.front().gamma;
    return points.front().phi;
  }
  if (gamma >= points.back().gamma) {
    if (extrapolated) *extrapolated = gamma > points.back().gamma;
    return points.back().phi;
  }
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (gamma <= points[i].gamma) {
      const double t =
          (gamma - points[i - 1].gamma) / (points[i].gamma - points[i - 1].gamma);
      return (1.0 - t) * points[i - 1].phi + t * points[i].phi;
    }
  }
  return points.back().phi;
}

namespace {

CellSolution sweep_point(const PotentialSpec& spec, double gamma,
                         std::span<const int> schedule, const SolverOptions& opts,
                         const Grid* grid2d, const GridField* warm) {
  if (grid2d != nullptr) return solve_profile_nd(spec, gamma, *grid2d, opts, warm);
  // refine through the schedule, carrying the profile up
  CellSolution sol;
  std::optional<GridField> stage;
  if (warm != nullptr) stage = *warm;
  for (std::size_t level = 0; level < schedule.size(); ++level) {
    const int n = schedule[level];
    Grid grid;
    grid.N = 1;
    grid.d = spec.d;
    grid.n_last = n;
    grid.band = opts.band;
    std::optional<GridField> init;
    if (stage.has_value()) {
      if (stage->grid.n_last == n) {
        init = *stage;
      } else {
        GridField up(grid);
        std::vector<double> v(grid.d);
        for (int i = 0; i < grid.rows(); ++i) {
          sample_profile(*stage, grid.x_last(i), v);
          for (int c = 0; c < grid.d; ++c) up.at(i, 0, c) = v[c];
        }
        init = std::move(up);
      }
    }
    sol = solve_cell(spec, gamma, grid, opts, init.has_value() ? &*init : nullptr);
    stage = sol.profile;
  }
  return sol;
}

}  // namespace

PhiCurve sweep_phi(const PotentialSpec& spec, std::span<const double> gammas,
                   std::span<const int> resolution_schedule, const SolverOptions& opts,
                   bool warm_chain, const Grid* grid2d,
                   std::vector<CellSolution>* solutions, int jobs) {
  if (gammas.empty()) throw std::invalid_argument("sweep_phi: empty budget list");
  for (std::size_t i = 1; i < gammas.size(); ++i)
    if (!(gammas[i] > gammas[i - 1]))
      throw std::invalid_argument("sweep_phi: budgets must be strictly increasing");
  if (resolution_schedule.empty())
    throw std::invalid_argument("sweep_phi: empty resolution schedule");

  PhiCurve curve;
  curve.resolution_schedule.assign(resolution_schedule.begin(), resolution_schedule.end());
  curve.dimension = grid2d != nullptr ? 2 : 1;
  curve.seed = opts.seed;

  std::vector<CellSolution> sols(gammas.size());
  if (warm_chain || jobs <= 1) {
    std::optional<GridField> warm;
    for (std::size_t k = 0; k < gammas.size(); ++k) {
      sols[k] = sweep_point(spec, gammas[k], resolution_schedule, opts, grid2d,
                            warm_chain && warm.has_value() ? &*warm : nullptr);
      if (warm_chain) warm = sols[k].profile;
    }
  } else {
    // independent points, fixed assignment by index
    std::vector<std::thread> pool;
    const int nthreads =
        static_cast<int>(std::min(static_cast<std::size_t>(jobs), gammas.size()));
    for (int t = 0; t < nthreads; ++t)
      pool.emplace_back([&, t]() {
        for (std::size_t k = t; k < gammas.size(); k += nthreads)
          sols[k] = sweep_point(spec, gammas[k], resolution_schedule, opts, grid2d, nullptr);
      });
    for (auto& th : pool) th.join();
  }

  for (std::size_t k = 0; k < gammas.size(); ++k) {
    const CellSolution& sol = sols[k];
    PhiPoint p;
    p.gamma = gammas[k];
    p.phi = sol.value;
    p.lambda = sol.lambda;
    p.scale_l = sol.scale_l;
    p.iterations = sol.u_iterations;
    p.grad_norm = sol.final_grad_norm;
    p.converged = sol.converged;
    curve.points.push_back(p);
  }
  if (solutions != nullptr) *solutions = std::move(sols);
  curve.validate();
  return curve;
}

MonotoneReport check_monotone(const PhiCurve& curve, double slack) {
  curve.validate();
  MonotoneReport rep;
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    const double rise = curve.points[i].phi - curve.points[i - 1].phi;
    if (rise > rep.worst_violation) {
      rep.worst_violation = rise;
      rep.worst_index = static_cast<int>(i);
    }
    if (rise > slack) rep.pass = false;
  }
  return rep;
}

void sample_profile(const GridField& profile1d, double t, std::span<double> out) {
  const Grid& g = profile1d.grid;
  if (g.N != 1) throw std::invalid_argument("sample_profile: profile must be 1D");
  if (out.size() != static_cast<std::size_t>(g.d))
    throw std::invalid_argument("sample_profile: out has wrong size");
  const int n = g.n_last;
  const double h = g.h_last();
  // position in node units; node i sits at -1/2 + (i + 1/2) h
  const double s = (t + 0.5) / h - 0.5;
  auto value = [&](int i, int c) {
    // linear extension beyond the end nodes (the bands are affine)
    if (i < 0) return 2.0 * profile1d.at(0, 0, c) - profile1d.at(-i, 0, c);
    if (i >= n) return 2.0 * profile1d.at(n - 1, 0, c) - profile1d.at(2 * n - 2 - i, 0, c);
    return profile1d.at(i, 0, c);
  };
  const double fi = std::floor(s);
  int i0 = static_cast<int>(fi);
  double x = s - fi;
  for (int c = 0; c < g.d; ++c) {
    const double fm1 = value(i0 - 1, c);
    const double f0 = value(i0, c);
    const double f1 = value(i0 + 1, c);
    const double f2 = value(i0 + 2, c);
    // Catmull-Rom
    const double a0 = f0;
    const double a1 = 0.5 * (f1 - fm1);
    const double a2 = fm1 - 2.5 * f0 + 2.0 * f1 - 0.5 * f2;
    const double a3 = 0.5 * (f2 - fm1) + 1.5 * (f0 - f1);
    out[c] = a0 + x * (a1 + x * (a2 + x * a3));
  }
}

double prime_variance(const GridField& f) {
  const Grid& g = f.grid;
  if (g.N == 1) return 0.0;
  double worst = 0.0;
  for (int i = 0; i < g.rows(); ++i)
    for (int c = 0; c < g.d; ++c) {
      double mean = 0.0;
      for (int j = 0; j < g.cols(); ++j) mean += f.at(i, j, c);
      mean /= g.cols();
      double var = 0.0;
      for (int j = 0; j < g.cols(); ++j) {
        const double dvi = f.at(i, j, c) - mean;
        var += dvi * dvi;
      }
      worst = std::max(worst, var / g.cols());
    }
  return worst;
}

}  // namespace surfcell
