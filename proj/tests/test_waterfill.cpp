#include <doctest.h>

#include <stdexcept>
#include <cmath>
#include <vector>

#include "surfcell/rng.hpp"
#include "surfcell/waterfill.hpp"

using namespace surfcell;

namespace {

// brute-force oracle: grid search over the level on [-max g, 0], keeping the
// largest level whose clipped mass stays within the budget
double brute_force_objective(std::span<const double> g, std::span<const double> w,
                             double budget, int points) {
  double gmax = 0.0;
  double supply = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    gmax = std::max(gmax, g[i]);
    supply += w[i] * g[i];
  }
  if (budget >= supply) return 0.0;
  double best = -gmax;
  for (int k = points - 1; k >= 0; --k) {
    const double lambda = -gmax + (gmax * k) / (points - 1);
    double mass = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) mass += w[i] * std::max(lambda + g[i], 0.0);
    if (mass <= budget) {
      best = lambda;
      break;  // levels scanned from 0 downward; first feasible is the largest
    }
  }
  double obj = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double d = std::max(best + g[i], 0.0) - g[i];
    obj += w[i] * d * d;
  }
  return obj;
}

}  // namespace

TEST_CASE("budget equal to supply: level 0, zero objective") {
  const std::vector<double> g{1.0, 1.0, 1.0, 1.0};
  const std::vector<double> w{0.25, 0.25, 0.25, 0.25};
  const WaterfillResult r = solve_lambda(g, w, 1.0);
  CHECK(r.lambda == 0.0);
  CHECK(r.objective == 0.0);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(r.v_star[i] == g[i]);
}

TEST_CASE("constant samples: level is budget minus supply") {
  const std::vector<double> g{1.0, 1.0};
  const std::vector<double> w{0.5, 0.5};
  const WaterfillResult r = solve_lambda(g, w, 0.3);
  CHECK(r.lambda == doctest::Approx(-0.7).epsilon(1e-10));
  CHECK(r.v_star[0] == doctest::Approx(0.3).epsilon(1e-10));
  CHECK(r.objective == doctest::Approx(0.49).epsilon(1e-9));
}

TEST_CASE("two-level instance solved by hand") {
  // g = 2 on measure 1/2, 0 on measure 1/2, budget 1/2:
  // 0.5 (lambda + 2) = 0.5 forces lambda = -1, density 1 on the first half,
  // objective 0.5 * 1 + 0.5 * 0 = 0.5
  const std::vector<double> g{2.0, 0.0};
  const std::vector<double> w{0.5, 0.5};
  const WaterfillResult r = solve_lambda(g, w, 0.5);
  CHECK(r.lambda == doctest::Approx(-1.0).epsilon(1e-10));
  CHECK(r.v_star[0] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(r.v_star[1] == 0.0);
  CHECK(r.objective == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("zero budget convention: largest level with empty density") {
  const std::vector<double> g{0.5, 2.0, 1.0};
  const std::vector<double> w{0.2, 0.3, 0.5};
  const WaterfillResult r = solve_lambda(g, w, 0.0);
  CHECK(r.lambda == -2.0);
  for (double v : r.v_star) CHECK(v == 0.0);
  // objective equals the full supply of squares: min{lambda^2, g^2} = g^2
  double expect = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) expect += w[i] * g[i] * g[i];
  CHECK(r.objective == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("the two objective forms agree") {
  Rng rng(17);
  for (int t = 0; t < 50; ++t) {
    const int n = 3 + static_cast<int>(rng.next_u64() % 30);
    std::vector<double> g(n), w(n);
    double supply = 0.0;
    for (int i = 0; i < n; ++i) {
      g[i] = rng.uniform(0.0, 3.0);
      w[i] = rng.uniform(0.1, 1.0);
      supply += g[i] * w[i];
    }
    const double budget = rng.uniform(0.0, 1.2) * supply;
    const WaterfillResult r = solve_lambda(g, w, budget);
    CHECK(r.objective ==
          doctest::Approx(r.objective_min_form).epsilon(1e-10));
    // density identity
    for (int i = 0; i < n; ++i)
      CHECK(r.v_star[i] == std::max(r.lambda + g[i], 0.0));
  }
}

TEST_CASE("objective is nonincreasing in the budget") {
  Rng rng(71);
  const int n = 20;
  std::vector<double> g(n), w(n);
  for (int i = 0; i < n; ++i) {
    g[i] = rng.uniform(0.0, 2.0);
    w[i] = rng.uniform(0.1, 0.5);
  }
  double prev = -1.0;
  bool first = true;
  for (double budget = 0.0; budget <= 2.0; budget += 0.05) {
    const WaterfillResult r = solve_lambda(g, w, budget);
    if (!first) CHECK(r.objective <= prev + 1e-10);
    prev = r.objective;
    first = false;
  }
}

TEST_CASE("small instances match the dense level grid search") {
  Rng rng(29);
  for (int t = 0; t < 20; ++t) {
    const int n = 2 + static_cast<int>(rng.next_u64() % 15);
    std::vector<double> g(n), w(n);
    double supply = 0.0;
    for (int i = 0; i < n; ++i) {
      g[i] = rng.uniform(0.0, 2.0);
      w[i] = rng.uniform(0.05, 0.4);
      supply += g[i] * w[i];
    }
    const double budget = rng.uniform(0.05, 0.95) * supply;
    const WaterfillResult r = solve_lambda(g, w, budget);
    const double brute = brute_force_objective(g, w, budget, 1000000);
    CHECK(r.objective == doctest::Approx(brute).epsilon(1e-5));
  }
}

TEST_CASE("randomized dominance: no feasible density beats the projection") {
  Rng rng(41);
  for (int t = 0; t < 10; ++t) {
    const int n = 4 + static_cast<int>(rng.next_u64() % 12);
    std::vector<double> g(n), w(n);
    double supply = 0.0;
    for (int i = 0; i < n; ++i) {
      g[i] = rng.uniform(0.0, 2.0);
      w[i] = rng.uniform(0.1, 0.6);
      supply += g[i] * w[i];
    }
    const double budget = rng.uniform(0.1, 0.9) * supply;
    const WaterfillResult r = solve_lambda(g, w, budget);
    const OptimalityReport rep = verify_optimality(g, w, budget, r, 1000, 1000 + t);
    CHECK(rep.violations == 0);
  }
}

TEST_CASE("single-cell instance has the closed form") {
  const std::vector<double> g{1.7};
  const std::vector<double> w{1.0};
  const double budget = 0.4;
  const WaterfillResult r = solve_lambda(g, w, budget);
  CHECK(r.lambda == doctest::Approx(budget - 1.7).epsilon(1e-10));
  CHECK(r.objective == doctest::Approx((budget - 1.7) * (budget - 1.7)).epsilon(1e-9));
}

TEST_CASE("scale covariance: g,budget -> t g, t budget scales lambda by t") {
  Rng rng(53);
  const int n = 12;
  std::vector<double> g(n), w(n);
  double supply = 0.0;
  for (int i = 0; i < n; ++i) {
    g[i] = rng.uniform(0.0, 1.5);
    w[i] = rng.uniform(0.1, 0.8);
    supply += g[i] * w[i];
  }
  const double budget = 0.4 * supply;
  const double t = 3.7;
  const WaterfillResult r1 = solve_lambda(g, w, budget);
  std::vector<double> gt(n);
  for (int i = 0; i < n; ++i) gt[i] = t * g[i];
  const WaterfillResult r2 = solve_lambda(gt, w, t * budget);
  CHECK(r2.lambda == doctest::Approx(t * r1.lambda).epsilon(1e-7));
  CHECK(r2.objective == doctest::Approx(t * t * r1.objective).epsilon(1e-7));
}

TEST_CASE("negative samples are rejected") {
  const std::vector<double> g{0.5, -0.1};
  const std::vector<double> w{0.5, 0.5};
  CHECK_THROWS_AS(solve_lambda(g, w, 0.2), std::invalid_argument);
}
