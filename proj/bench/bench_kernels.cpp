// Timing comparison: OpenMP kernels vs the serial reference implementation.
// Build target only; not part of the test suite.

#include <chrono>
#include <cstdio>

#include "surfcell/energy.hpp"
#include "surfcell/reference.hpp"
#include "surfcell/rng.hpp"
#include "surfcell/stencil_ops.hpp"

using namespace surfcell;

namespace {

using clock_type = std::chrono::steady_clock;

template <typename F>
double time_ms(F&& f, int reps) {
  f();  // warmup
  const auto t0 = clock_type::now();
  for (int r = 0; r < reps; ++r) f();
  const auto t1 = clock_type::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

}  // namespace

int main() {
  Grid grid;
  grid.N = 2;
  grid.d = 2;
  grid.n_prime = 512;
  grid.n_last = 512;
  grid.band = 2;

  const PotentialSpec spec = PotentialSpec::prototype({1.0, 0.5}, 2.0, 2, 2);
  GridField u(grid);
  Rng rng(7);
  for (double& v : u.values) v = rng.uniform(-1.0, 1.0);
  apply_boundary_bands(u, spec.a);
  DensityField rho(grid);
  for (double& v : rho.values) v = rng.uniform(0.0, 1.0);

  const int reps = 5;
  const double eps = 0.05;
  const double lambda = -0.5;

  struct Row {
    const char* name;
    double omp_ms;
    double ref_ms;
  };
  Row rows[] = {
      {"energy_e", time_ms([&] { energy_e(u, rho, eps, spec); }, reps),
       time_ms([&] { ref::energy_e(u, rho, eps, spec); }, reps)},
      {"energy_f", time_ms([&] { energy_f(u, lambda, eps, spec); }, reps),
       time_ms([&] { ref::energy_f(u, lambda, eps, spec); }, reps)},
      {"grad_f", time_ms([&] { grad_f(u, lambda, eps, spec); }, reps),
       time_ms([&] { ref::grad_f(u, lambda, eps, spec); }, reps)},
      {"hessian_norm", time_ms([&] { hessian_norm(u); }, reps),
       time_ms([&] { ref::hessian_norm(u); }, reps)},
  };

  std::printf("%-14s %12s %12s %9s\n", "kernel", "omp [ms]", "serial [ms]", "speedup");
  for (const Row& r : rows)
    std::printf("%-14s %12.3f %12.3f %8.2fx\n", r.name, r.omp_ms, r.ref_ms,
                r.ref_ms / r.omp_ms);
  return 0;
}
