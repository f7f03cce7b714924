#include "surfcell/waterfill.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "surfcell/reduction.hpp"
#include "surfcell/rng.hpp"

namespace surfcell {

namespace {

double clipped_mass(std::span<const double> g, std::span<const double> w, double lambda) {
  return block_sum(g.size(), [&](std::size_t i) {
    const double v = lambda + g[i];
    return v > 0.0 ? w[i] * v : 0.0;
  });
}

void finalize(WaterfillResult& r, std::span<const double> g, std::span<const double> w,
              double budget) {
  r.v_star.resize(g.size());
  for (std::size_t i = 0; i < g.size(); ++i)
    r.v_star[i] = std::max(r.lambda + g[i], 0.0);
  r.objective = block_sum(g.size(), [&](std::size_t i) {
    const double d = r.v_star[i] - g[i];
    return w[i] * d * d;
  });
  const double l2 = r.lambda * r.lambda;
  r.objective_min_form = block_sum(g.size(), [&](std::size_t i) {
    const double g2 = g[i] * g[i];
    return w[i] * (g2 < l2 ? g2 : l2);
  });
  r.constraint_residual = clipped_mass(g, w, r.lambda) - budget;
}

}  // namespace

WaterfillResult solve_lambda(std::span<const double> g, std::span<const double> weights,
                             double budget) {
  if (g.size() != weights.size())
    throw std::invalid_argument("waterfill: g and weights size mismatch");
  if (g.empty()) throw std::invalid_argument("waterfill: empty sample set");
  if (budget < 0.0) throw std::invalid_argument("waterfill: budget must be >= 0");
  double gmax = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g[i] < 0.0) throw std::invalid_argument("waterfill: negative sample");
    if (!(weights[i] > 0.0)) throw std::invalid_argument("waterfill: nonpositive weight");
    gmax = std::max(gmax, g[i]);
  }

  WaterfillResult r;
  r.supply = block_sum(g.size(), [&](std::size_t i) { return weights[i] * g[i]; });

  if (budget >= r.supply) {
    // Slack budget: the constraint is an inequality, lambda = 0 is optimal.
    r.lambda = 0.0;
    finalize(r, g, weights, budget);
    return r;
  }
  if (budget == 0.0) {
    // Largest level with zero clipped mass.
    r.lambda = -gmax;
    finalize(r, g, weights, budget);
    return r;
  }

  // mass(lambda) is continuous and nondecreasing on [-gmax, 0] with
  // mass(-gmax) = 0 and mass(0) = supply > budget.
  const double tol = 1e-12 * std::max(1.0, r.supply);
  double lo = -gmax;
  double hi = 0.0;
  double lambda = 0.5 * (lo + hi);
  int it = 0;
  while (it < 200) {
    lambda = 0.5 * (lo + hi);
    const double m = clipped_mass(g, weights, lambda);
    ++it;
    if (std::abs(m - budget) <= tol) break;
    if (m > budget)
      hi = lambda;
    else
      lo = lambda;
    if (hi - lo <= 1e-18 * std::max(1.0, gmax)) break;
  }
  r.lambda = lambda;
  r.iterations = it;
  finalize(r, g, weights, budget);
  return r;
}

WaterfillResult solve_lambda(const DensityField& g, double budget) {
  const std::vector<double> w(g.values.size(), g.grid.cell_volume());
  return solve_lambda(std::span<const double>(g.values), std::span<const double>(w), budget);
}

OptimalityReport verify_optimality(std::span<const double> g, std::span<const double> weights,
                                   double budget, const WaterfillResult& result, int trials,
                                   std::uint64_t seed) {
  OptimalityReport rep;
  rep.trials = trials;
  Rng rng(seed);
  std::vector<double> v(g.size());
  for (int t = 0; t < trials; ++t) {
    // Dirichlet-style mass split: normalized exponentials.
    double wsum = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      v[i] = rng.exponential();
      wsum += weights[i] * v[i];
    }
    if (wsum <= 0.0) continue;
    const double scale = budget / wsum;
    double obj = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double d = v[i] * scale - g[i];
      obj += weights[i] * d * d;
    }
    const double gap = obj - result.objective;
    if (gap < -1e-10) {
      ++rep.violations;
      rep.worst_gap = std::min(rep.worst_gap, gap);
    }
  }
  return rep;
}

}  // namespace surfcell
