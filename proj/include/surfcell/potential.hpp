#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace surfcell {

// Two-well potential W(xi) = min{|xi - A|^p, |xi - B|^p} on d x N matrices
// (Frobenius norm), wells A = a (x) e_N and B = -A. The wells are rank-one
// connected with normal e_N.
struct PotentialSpec {
  std::vector<double> a;  // well direction in R^d, |a| > 0
  double p = 2.0;         // growth exponent, >= 2
  int d = 1;              // codomain dimension
  int N = 2;              // domain dimension, >= 2 (profile solves pad to it)

  static PotentialSpec prototype(std::vector<double> a, double p, int d, int N);

  double well_norm() const;        // |a|
  double well_norm_squared() const;

  // Throws std::invalid_argument on degenerate input (a = 0, p < 2, ...).
  void validate() const;
};

// xi is d*N row-major: xi[c*N + j] = entry (component c, axis j).
double eval_w(const PotentialSpec& spec, std::span<const double> xi);

// Gradient p*|xi - S|^{p-2} (xi - S) with S the nearer well; exact tie picks A.
void grad_w(const PotentialSpec& spec, std::span<const double> xi, std::span<double> out);

// 1D reduction: W(0,...,0,v) for v in R^d placed in the last column.
double eval_w_profile(const PotentialSpec& spec, std::span<const double> v);
void grad_w_profile(const PotentialSpec& spec, std::span<const double> v, std::span<double> out);

struct AssumptionCheck {
  std::string name;
  bool pass = false;
  double value = 0.0;  // empirical constant or worst residual, check-specific
  std::string note;
};

struct AssumptionReport {
  std::uint64_t seed = 0;
  int samples = 0;
  double c1 = 0.0;  // empirical transverse lower-bound constant
  double c2 = 0.0;  // empirical comparison upper-bound constant
  std::vector<AssumptionCheck> checks;

  bool all_pass() const;
  const AssumptionCheck* find(const std::string& name) const;
};

// Statistical checker for the potential hypotheses: wells are the only zeros,
// p-growth bounds, local p-growth near the wells, sign-flip symmetry per axis,
// and the profile-reduction bound W(xi) >= W(0, xi_N). Sampling is seeded;
// deterministic probes (wells, midpoint, axis matrices) are always included.
AssumptionReport check_assumptions(const PotentialSpec& spec, int samples, double tol,
                                   std::uint64_t seed);

}  // namespace surfcell
