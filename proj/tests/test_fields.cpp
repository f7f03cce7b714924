#include <doctest.h>

#include <stdexcept>
#include <cmath>

#include "surfcell/grid.hpp"
#include "surfcell/rng.hpp"
#include "surfcell/stencil_ops.hpp"

using namespace surfcell;

namespace {

constexpr double kTwoPi = 6.28318530717958647692;

Grid grid2d(int np, int nl, int d = 1, int band = 2) {
  Grid g;
  g.N = 2;
  g.d = d;
  g.n_prime = np;
  g.n_last = nl;
  g.band = band;
  return g;
}

Grid grid1d(int nl, int d = 1, int band = 2) {
  Grid g;
  g.N = 1;
  g.d = d;
  g.n_last = nl;
  g.band = band;
  return g;
}

}  // namespace

TEST_CASE("gradient is exact on affine fields") {
  const Grid g = grid2d(8, 16, 2);
  GridField f(g);
  const double a0 = 0.7, a1 = -1.3;
  for (int i = 0; i < g.rows(); ++i)
    for (int j = 0; j < g.cols(); ++j) {
      f.at(i, j, 0) = a0 * g.x_last(i) + 0.2;
      f.at(i, j, 1) = a1 * g.x_last(i) - 0.9;
    }
  const MatrixField m = gradient(f);
  for (int i = 0; i < g.rows(); ++i)
    for (int j = 0; j < g.cols(); ++j) {
      const double* mat = m.at(i, j);
      CHECK(mat[0] == doctest::Approx(0.0).epsilon(1e-14));       // d(prime) comp 0
      CHECK(mat[1] == doctest::Approx(a0).epsilon(1e-13));        // d(last) comp 0
      CHECK(mat[2] == doctest::Approx(0.0).epsilon(1e-14));
      CHECK(mat[3] == doctest::Approx(a1).epsilon(1e-13));
    }
}

TEST_CASE("gradient of sin(2 pi x1) has second-order error") {
  const Grid g = grid2d(64, 16);
  GridField f(g);
  for (int i = 0; i < g.rows(); ++i)
    for (int j = 0; j < g.cols(); ++j) f.at(i, j, 0) = std::sin(kTwoPi * g.x_prime(j));
  const MatrixField m = gradient(f);
  const double bound = kTwoPi * kTwoPi * kTwoPi * g.h_prime() * g.h_prime() / 6.0;
  double worst = 0.0;
  for (int i = 0; i < g.rows(); ++i)
    for (int j = 0; j < g.cols(); ++j) {
      const double exact = kTwoPi * std::cos(kTwoPi * g.x_prime(j));
      worst = std::max(worst, std::abs(m.at(i, j)[0] - exact));
    }
  CHECK(worst < bound);
}

TEST_CASE("gradient of a constant field vanishes") {
  const Grid g = grid2d(8, 12);
  GridField f(g);
  for (double& v : f.values) v = 4.2;
  const MatrixField m = gradient(f);
  for (double v : m.values) CHECK(v == 0.0);
}

TEST_CASE("hessian norm is exact on componentwise quadratics") {
  const Grid g = grid1d(32, 2);
  GridField f(g);
  const double a0 = 2.0, a1 = -1.0;
  for (int i = 0; i < g.rows(); ++i) {
    const double t = g.x_last(i);
    f.at(i, 0, 0) = 0.5 * a0 * t * t;
    f.at(i, 0, 1) = 0.5 * a1 * t * t;
  }
  const DensityField w = hessian_norm(f);
  const double expect = std::sqrt(a0 * a0 + a1 * a1);
  for (int i = 0; i < g.rows(); ++i)
    CHECK(w.at(i, 0) == doctest::Approx(expect).epsilon(1e-9));
}

TEST_CASE("hessian norm of an affine field vanishes") {
  const Grid g = grid2d(8, 16, 2);
  GridField f(g);
  for (int i = 0; i < g.rows(); ++i)
    for (int j = 0; j < g.cols(); ++j)
      for (int c = 0; c < 2; ++c)
        f.at(i, j, c) = (c + 1.0) * g.x_last(i) + 0.4 * c;
  const DensityField w = hessian_norm(f);
  for (double v : w.values) CHECK(std::abs(v) < 1e-10);
}

TEST_CASE("hessian norm error bound for sin(2 pi x_N) at n = 128") {
  const Grid g = grid1d(128);
  GridField f(g);
  for (int i = 0; i < g.rows(); ++i) f.at(i, 0, 0) = std::sin(kTwoPi * g.x_last(i));
  const DensityField w = hessian_norm(f);
  const double h = g.h_last();
  const double bound = std::pow(kTwoPi, 4) * h * h / 12.0;
  double worst = 0.0;
  for (int i = 0; i < g.rows(); ++i) {
    const double exact = std::abs(-kTwoPi * kTwoPi * std::sin(kTwoPi * g.x_last(i)));
    worst = std::max(worst, std::abs(w.at(i, 0) - exact));
  }
  CHECK(worst < bound);
}

TEST_CASE("boundary bands pin affine values and are idempotent") {
  const Grid g = grid2d(8, 24, 2);
  const std::vector<double> a{1.0, -0.5};
  GridField f(g);
  Rng rng(3);
  for (double& v : f.values) v = rng.uniform(-1.0, 1.0);
  apply_boundary_bands(f, a);
  GridField once = f;
  apply_boundary_bands(f, a);
  for (std::size_t k = 0; k < f.values.size(); ++k) CHECK(f.values[k] == once.values[k]);

  // affine structure in the bands
  for (int c = 0; c < 2; ++c) {
    const double c_lo = once.at(0, 0, c) + a[c] * g.x_last(0);
    for (int i = 0; i < g.band; ++i)
      for (int j = 0; j < g.cols(); ++j)
        CHECK(once.at(i, j, c) ==
              doctest::Approx(-a[c] * g.x_last(i) + c_lo).epsilon(1e-13));
    const double c_hi = once.at(g.n_last - 1, 0, c) - a[c] * g.x_last(g.n_last - 1);
    for (int i = g.n_last - g.band; i < g.n_last; ++i)
      for (int j = 0; j < g.cols(); ++j)
        CHECK(once.at(i, j, c) ==
              doctest::Approx(a[c] * g.x_last(i) + c_hi).epsilon(1e-13));
  }
}

TEST_CASE("bands on an already affine field are a no-op") {
  const Grid g = grid1d(32);
  const std::vector<double> a{2.0};
  GridField f(g);
  for (int i = 0; i < g.rows(); ++i) f.at(i, 0, 0) = std::abs(g.x_last(i)) * 2.0;
  GridField before = f;
  apply_boundary_bands(f, a);
  for (std::size_t k = 0; k < f.values.size(); ++k)
    CHECK(f.values[k] == doctest::Approx(before.values[k]).epsilon(1e-13));
}

TEST_CASE("bands on the zero field match the adjacent layer mean") {
  const Grid g = grid1d(32);
  const std::vector<double> a{1.5};
  GridField f(g);
  apply_boundary_bands(f, a);
  // adjacent free layers are zero, so -a x + c vanishes at the band edge row
  CHECK(f.at(0, 0, 0) ==
        doctest::Approx(-a[0] * g.x_last(0) + a[0] * g.x_last(g.band)).epsilon(1e-13));
  CHECK(f.at(g.band, 0, 0) == 0.0);
}

TEST_CASE("integrate: unit density integrates to one") {
  const Grid g = grid2d(16, 32);
  DensityField rho(g);
  for (double& v : rho.values) v = 1.0;
  CHECK(integrate(rho) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("integrate x_N^2 over the box") {
  const Grid g = grid1d(64);
  DensityField rho(g);
  for (int i = 0; i < g.rows(); ++i) rho.at(i, 0) = g.x_last(i) * g.x_last(i);
  CHECK(std::abs(integrate(rho) - 1.0 / 12.0) < 1e-4);
}

TEST_CASE("integrate over an empty region is zero") {
  const Grid g = grid2d(8, 16);
  DensityField rho(g);
  for (double& v : rho.values) v = 3.0;
  const Region r{0.2, 0.2, 0.1, 0.1};
  CHECK(integrate(rho, &r) == 0.0);
}

TEST_CASE("regions outside the box are rejected") {
  const Grid g = grid2d(8, 16);
  DensityField rho(g);
  Region r;
  r.hi_last = 0.7;
  CHECK_THROWS_AS(integrate(rho, &r), std::invalid_argument);
}

TEST_CASE("periodic shift equivariance of the differential operators") {
  const Grid g = grid2d(16, 24, 2);
  GridField f(g);
  Rng rng(9);
  for (double& v : f.values) v = rng.uniform(-1.0, 1.0);
  const int k = 5;
  const GridField fs = shift_prime(f, k);
  const DensityField w_then_shift = [&] {
    DensityField w = hessian_norm(f);
    DensityField out(g);
    for (int i = 0; i < g.rows(); ++i)
      for (int j = 0; j < g.cols(); ++j) out.at(i, (j + k) % g.cols()) = w.at(i, j);
    return out;
  }();
  const DensityField shift_then_w = hessian_norm(fs);
  for (std::size_t idx = 0; idx < w_then_shift.values.size(); ++idx)
    CHECK(shift_then_w.values[idx] ==
          doctest::Approx(w_then_shift.values[idx]).epsilon(1e-12));
  CHECK(integrate(shift_then_w) == doctest::Approx(integrate(w_then_shift)).epsilon(1e-12));
}

TEST_CASE("grid validation rejects thin stencil support") {
  Grid g = grid2d(2, 16);
  CHECK_THROWS_AS(g.validate(), std::invalid_argument);
  g = grid2d(8, 6);
  CHECK_THROWS_AS(g.validate(), std::invalid_argument);
  g = grid2d(8, 16, 1, 1);
  CHECK_THROWS_AS(g.validate(), std::invalid_argument);
}
