#include "surfcell/lbfgs.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace surfcell {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

}  // namespace

LbfgsResult minimize_lbfgs(std::vector<double>& x, const ObjectiveFn& fn,
                           const LbfgsOptions& opts, const ValueFn& value_only) {
  const std::size_t n = x.size();
  std::vector<double> grad(n, 0.0), grad_new(n, 0.0), dir(n, 0.0), x_new(n, 0.0);
  std::deque<std::vector<double>> s_hist, y_hist;
  std::deque<double> rho_hist;
  const ValueFn probe = value_only ? value_only : ValueFn([&](const std::vector<double>& p) {
    return fn(p, grad_new);
  });

  LbfgsResult res;
  double f = fn(x, grad);
  res.value = f;
  res.grad_norm = norm(grad);
  double last_step = 1.0;

  for (int it = 0; it < opts.max_iters; ++it) {
    if (res.grad_norm <= opts.grad_tol) {
      res.converged = true;
      break;
    }
    // two-loop recursion
    dir = grad;
    std::vector<double> alpha(s_hist.size());
    for (int k = static_cast<int>(s_hist.size()) - 1; k >= 0; --k) {
      alpha[k] = rho_hist[k] * dot(s_hist[k], dir);
      for (std::size_t i = 0; i < n; ++i) dir[i] -= alpha[k] * y_hist[k][i];
    }
    if (opts.precondition) {
      opts.precondition(dir);
    } else if (!s_hist.empty()) {
      const double yy = dot(y_hist.back(), y_hist.back());
      const double sy = dot(s_hist.back(), y_hist.back());
      if (yy > 0.0 && sy > 0.0) {
        const double scale = sy / yy;
        for (double& v : dir) v *= scale;
      }
    }
    for (int k = 0; k < static_cast<int>(s_hist.size()); ++k) {
      const double beta = rho_hist[k] * dot(y_hist[k], dir);
      for (std::size_t i = 0; i < n; ++i) dir[i] += (alpha[k] - beta) * s_hist[k][i];
    }
    for (double& v : dir) v = -v;

    double slope = dot(grad, dir);
    if (slope >= 0.0) {
      // history turned stale on a nonsmooth kink; restart with steepest descent
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      for (std::size_t i = 0; i < n; ++i) dir[i] = -grad[i];
      slope = -res.grad_norm * res.grad_norm;
    }

    // Armijo backtracking; the trial step remembers the previous scale
    double step = last_step < 1.0 ? std::min(1.0, 2.0 * last_step) : 1.0;
    double f_new = f;
    bool accepted = false;
    for (int bt = 0; bt < opts.max_backtracks; ++bt) {
      for (std::size_t i = 0; i < n; ++i) x_new[i] = x[i] + step * dir[i];
      f_new = probe(x_new);
      if (f_new <= f + opts.armijo_c1 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // no descent at machine-scale steps
    last_step = step;
    f_new = fn(x_new, grad_new);

    // curvature pair
    std::vector<double> s(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = x_new[i] - x[i];
      y[i] = grad_new[i] - grad[i];
    }
    const double sy = dot(s, y);
    if (sy > 1e-14 * norm(s) * norm(y)) {
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(y));
      rho_hist.push_back(1.0 / sy);
      if (static_cast<int>(s_hist.size()) > opts.history) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    }
    x.swap(x_new);
    grad.swap(grad_new);
    f = f_new;
    res.value = f;
    res.grad_norm = norm(grad);
    res.iterations = it + 1;
  }
  if (res.grad_norm <= opts.grad_tol) res.converged = true;
  return res;
}

double golden_section(const std::function<double(double)>& f, double lo, double hi, int iters,
                      double* value_out) {
  if (hi <= lo) {
    if (value_out) *value_out = f(lo);
    return lo;
  }
  constexpr double invphi = 0.6180339887498948482;
  double a = lo, b = hi;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = f(c);
  double fd = f(d);
  double best_x = fc <= fd ? c : d;
  double best_f = fc <= fd ? fc : fd;
  for (int i = 0; i < iters; ++i) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
    if (fc < best_f) {
      best_f = fc;
      best_x = c;
    }
    if (fd < best_f) {
      best_f = fd;
      best_x = d;
    }
  }
  if (value_out) *value_out = best_f;
  return best_x;
}

}  // namespace surfcell
