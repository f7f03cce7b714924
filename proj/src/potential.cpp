#include "surfcell/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "surfcell/rng.hpp"

namespace surfcell {

PotentialSpec PotentialSpec::prototype(std::vector<double> a, double p, int d, int N) {
  PotentialSpec spec;
  spec.a = std::move(a);
  spec.p = p;
  spec.d = d;
  spec.N = N;
  spec.validate();
  return spec;
}

double PotentialSpec::well_norm_squared() const {
  double s = 0.0;
  for (double ai : a) s += ai * ai;
  return s;
}

double PotentialSpec::well_norm() const { return std::sqrt(well_norm_squared()); }

void PotentialSpec::validate() const {
  if (d < 1) throw std::invalid_argument("potential: d must be >= 1");
  if (N < 2) throw std::invalid_argument("potential: N must be >= 2");
  if (p < 2.0) throw std::invalid_argument("potential: p must be >= 2");
  if (static_cast<int>(a.size()) != d)
    throw std::invalid_argument("potential: a must have d components");
  if (well_norm_squared() <= 0.0)
    throw std::invalid_argument("potential: a = 0 makes the wells coincide");
}

namespace {

inline void check_shape(const PotentialSpec& spec, std::span<const double> xi) {
  if (xi.size() != static_cast<std::size_t>(spec.d * spec.N))
    throw std::invalid_argument("potential: xi has wrong shape");
}

// Squared Frobenius distances to the two wells. Only the last column differs
// from xi itself.
inline void well_distances(const PotentialSpec& spec, std::span<const double> xi, double& da2,
                           double& db2) {
  const int d = spec.d;
  const int N = spec.N;
  double off = 0.0;  // columns j < N-1, shared by both branches
  double la = 0.0;
  double lb = 0.0;
  for (int c = 0; c < d; ++c) {
    const double* row = xi.data() + c * N;
    for (int j = 0; j < N - 1; ++j) off += row[j] * row[j];
    const double va = row[N - 1] - spec.a[c];
    const double vb = row[N - 1] + spec.a[c];
    la += va * va;
    lb += vb * vb;
  }
  da2 = off + la;
  db2 = off + lb;
}

}  // namespace

double eval_w(const PotentialSpec& spec, std::span<const double> xi) {
  check_shape(spec, xi);
  double da2 = 0.0, db2 = 0.0;
  well_distances(spec, xi, da2, db2);
  const double m2 = std::min(da2, db2);
  if (spec.p == 2.0) return m2;
  return std::pow(m2, 0.5 * spec.p);
}

void grad_w(const PotentialSpec& spec, std::span<const double> xi, std::span<double> out) {
  check_shape(spec, xi);
  if (out.size() != xi.size()) throw std::invalid_argument("potential: out has wrong shape");
  double da2 = 0.0, db2 = 0.0;
  well_distances(spec, xi, da2, db2);
  const bool branch_a = da2 <= db2;  // tie picks A
  const double m2 = branch_a ? da2 : db2;
  const double sign = branch_a ? 1.0 : -1.0;
  // p |xi-S|^{p-2} (xi-S); for p = 2 the factor is 2.
  double factor;
  if (spec.p == 2.0) {
    factor = 2.0;
  } else if (m2 == 0.0) {
    factor = 0.0;  // at the well, p > 2 gradient vanishes
  } else {
    factor = spec.p * std::pow(m2, 0.5 * spec.p - 1.0);
  }
  const int d = spec.d;
  const int N = spec.N;
  for (int c = 0; c < d; ++c) {
    const double* row = xi.data() + c * N;
    double* orow = out.data() + c * N;
    for (int j = 0; j < N - 1; ++j) orow[j] = factor * row[j];
    orow[N - 1] = factor * (row[N - 1] - sign * spec.a[c]);
  }
}

double eval_w_profile(const PotentialSpec& spec, std::span<const double> v) {
  if (v.size() != static_cast<std::size_t>(spec.d))
    throw std::invalid_argument("potential: profile value has wrong size");
  double la = 0.0, lb = 0.0;
  for (int c = 0; c < spec.d; ++c) {
    const double va = v[c] - spec.a[c];
    const double vb = v[c] + spec.a[c];
    la += va * va;
    lb += vb * vb;
  }
  const double m2 = std::min(la, lb);
  if (spec.p == 2.0) return m2;
  return std::pow(m2, 0.5 * spec.p);
}

void grad_w_profile(const PotentialSpec& spec, std::span<const double> v, std::span<double> out) {
  if (v.size() != static_cast<std::size_t>(spec.d) || out.size() != v.size())
    throw std::invalid_argument("potential: profile value has wrong size");
  double la = 0.0, lb = 0.0;
  for (int c = 0; c < spec.d; ++c) {
    const double va = v[c] - spec.a[c];
    const double vb = v[c] + spec.a[c];
    la += va * va;
    lb += vb * vb;
  }
  const bool branch_a = la <= lb;
  const double m2 = branch_a ? la : lb;
  const double sign = branch_a ? 1.0 : -1.0;
  double factor;
  if (spec.p == 2.0) {
    factor = 2.0;
  } else if (m2 == 0.0) {
    factor = 0.0;
  } else {
    factor = spec.p * std::pow(m2, 0.5 * spec.p - 1.0);
  }
  for (int c = 0; c < spec.d; ++c) out[c] = factor * (v[c] - sign * spec.a[c]);
}

bool AssumptionReport::all_pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

const AssumptionCheck* AssumptionReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

namespace {

std::vector<double> well_matrix(const PotentialSpec& spec, double sign) {
  std::vector<double> m(spec.d * spec.N, 0.0);
  for (int c = 0; c < spec.d; ++c) m[c * spec.N + spec.N - 1] = sign * spec.a[c];
  return m;
}

double norm_p(std::span<const double> xi, double p) {
  double s = 0.0;
  for (double x : xi) s += x * x;
  return std::pow(s, 0.5 * p);
}

}  // namespace

AssumptionReport check_assumptions(const PotentialSpec& spec, int samples, double tol,
                                   std::uint64_t seed) {
  spec.validate();
  if (samples < 1) throw std::invalid_argument("check_assumptions: samples must be >= 1");
  AssumptionReport report;
  report.seed = seed;
  report.samples = samples;

  const int d = spec.d;
  const int N = spec.N;
  const int size = d * N;
  const double anorm = spec.well_norm();
  const double range = 2.0 * (1.0 + anorm);
  Rng rng(seed);

  const std::vector<double> well_a = well_matrix(spec, 1.0);
  const std::vector<double> well_b = well_matrix(spec, -1.0);

  // Deterministic probes: wells, origin, scaled axis matrices.
  std::vector<std::vector<double>> probes;
  probes.push_back(well_a);
  probes.push_back(well_b);
  probes.emplace_back(size, 0.0);
  for (int c = 0; c < d; ++c)
    for (int j = 0; j < N; ++j) {
      std::vector<double> m(size, 0.0);
      m[c * N + j] = range;
      probes.push_back(std::move(m));
    }
  for (int i = 0; i < samples; ++i) {
    std::vector<double> m(size);
    for (double& x : m) x = rng.uniform(-range, range);
    probes.push_back(std::move(m));
  }

  // wells_zero: W vanishes exactly at the wells and nowhere else on the sample.
  {
    AssumptionCheck chk{"wells_zero", true, 0.0, ""};
    if (eval_w(spec, well_a) != 0.0 || eval_w(spec, well_b) != 0.0) {
      chk.pass = false;
      chk.note = "W does not vanish at a well";
    }
    for (const auto& m : probes) {
      double da = 0.0, db = 0.0;
      for (int k = 0; k < size; ++k) {
        da += (m[k] - well_a[k]) * (m[k] - well_a[k]);
        db += (m[k] - well_b[k]) * (m[k] - well_b[k]);
      }
      const double dist = std::sqrt(std::min(da, db));
      const double w = eval_w(spec, m);
      chk.value = std::max(chk.value, dist > tol ? (w > 0.0 ? 0.0 : 1.0) : 0.0);
      if (dist > tol && w <= 0.0) {
        chk.pass = false;
        chk.note = "W <= 0 away from the wells";
        break;
      }
    }
    report.checks.push_back(chk);
  }

  // growth_bounds: 1/C |xi|^p - C <= W <= C(|xi|^p + 1); report the smallest
  // C that works on the sample, pass if it stays moderate.
  {
    AssumptionCheck chk{"growth_bounds", true, 1.0, ""};
    double c_needed = 1.0;
    for (const auto& m : probes) {
      const double w = eval_w(spec, m);
      const double np = norm_p(m, spec.p);
      // upper: C >= w / (np + 1)
      c_needed = std::max(c_needed, w / (np + 1.0));
      // lower: C^2 + C w - np >= 0  =>  C >= (-w + sqrt(w^2 + 4 np)) / 2
      c_needed = std::max(c_needed, 0.5 * (-w + std::sqrt(w * w + 4.0 * np)));
    }
    chk.value = c_needed;
    chk.pass = std::isfinite(c_needed) && c_needed < 1.0e6;
    report.checks.push_back(chk);
  }

  // well_local_growth: c |xi-S|^p <= W <= C |xi-S|^p within radius |a| of a
  // well. For the prototype both constants are 1; report the worst ratio.
  {
    AssumptionCheck chk{"well_local_growth", true, 0.0, ""};
    double worst_low = std::numeric_limits<double>::infinity();
    double worst_high = 0.0;
    for (int i = 0; i < samples; ++i) {
      std::vector<double> dir(size);
      double nrm = 0.0;
      for (double& x : dir) {
        x = rng.normal();
        nrm += x * x;
      }
      nrm = std::sqrt(nrm);
      if (nrm == 0.0) continue;
      const double radius = rng.uniform() * anorm;
      const auto& well = (i % 2 == 0) ? well_a : well_b;
      std::vector<double> m(size);
      for (int k = 0; k < size; ++k) m[k] = well[k] + radius * dir[k] / nrm;
      const double w = eval_w(spec, m);
      const double ref = std::pow(radius, spec.p);
      if (ref > 0.0) {
        worst_low = std::min(worst_low, w / ref);
        worst_high = std::max(worst_high, w / ref);
      }
    }
    chk.value = worst_high;
    chk.pass = worst_low > 0.0 && std::isfinite(worst_high);
    report.checks.push_back(chk);
  }

  // axis_flip_symmetry / last_axis_flip_symmetry: W invariant under flipping
  // the sign of any single column (the last column swaps the wells).
  {
    AssumptionCheck chk_prime{"axis_flip_symmetry", true, 0.0, ""};
    AssumptionCheck chk_last{"last_axis_flip_symmetry", true, 0.0, ""};
    for (const auto& m : probes) {
      const double w = eval_w(spec, m);
      for (int j = 0; j < N; ++j) {
        std::vector<double> f = m;
        for (int c = 0; c < d; ++c) f[c * N + j] = -f[c * N + j];
        const double wf = eval_w(spec, f);
        const double resid = std::abs(wf - w) / (1.0 + std::abs(w));
        auto& chk = (j == N - 1) ? chk_last : chk_prime;
        chk.value = std::max(chk.value, resid);
        if (resid > tol) chk.pass = false;
      }
    }
    report.checks.push_back(chk_prime);
    report.checks.push_back(chk_last);
  }

  // profile_reduction_bound: W(xi) >= W(0, last column of xi).
  {
    AssumptionCheck chk{"profile_reduction_bound", true, 0.0, ""};
    std::vector<double> v(d);
    for (const auto& m : probes) {
      for (int c = 0; c < d; ++c) v[c] = m[c * N + N - 1];
      const double w = eval_w(spec, m);
      const double wz = eval_w_profile(spec, v);
      const double gap = wz - w;  // must be <= 0 up to tolerance
      chk.value = std::max(chk.value, gap);
      if (gap > tol * (1.0 + std::abs(w))) chk.pass = false;
    }
    report.checks.push_back(chk);
  }

  // transverse_lower_bound: C1 |xi'|^p <= W(xi); comparison bound
  // W(xi) <= C2 (W(eta) + |xi-eta|^p). Empirical constants only.
  {
    AssumptionCheck chk{"transverse_lower_bound", true, 0.0, ""};
    double c1 = std::numeric_limits<double>::infinity();
    for (const auto& m : probes) {
      double off = 0.0;
      for (int c = 0; c < d; ++c)
        for (int j = 0; j < N - 1; ++j) off += m[c * N + j] * m[c * N + j];
      const double prime_p = std::pow(off, 0.5 * spec.p);
      if (prime_p > tol) c1 = std::min(c1, eval_w(spec, m) / prime_p);
    }
    if (!std::isfinite(c1)) c1 = 1.0;
    report.c1 = c1;
    chk.value = c1;
    chk.pass = c1 > 0.0;
    report.checks.push_back(chk);

    double c2 = 1.0;
    for (std::size_t i = 0; i + 1 < probes.size(); i += 2) {
      const auto& x = probes[i];
      const auto& y = probes[i + 1];
      double diff = 0.0;
      for (int k = 0; k < size; ++k) diff += (x[k] - y[k]) * (x[k] - y[k]);
      const double denom = eval_w(spec, y) + std::pow(diff, 0.5 * spec.p);
      if (denom > tol) c2 = std::max(c2, eval_w(spec, x) / denom);
    }
    report.c2 = c2;
  }

  return report;
}

}  // namespace surfcell
