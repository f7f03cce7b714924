#pragma once

#include <cstddef>
#include <vector>

namespace surfcell {

// Deterministic reductions: fixed-size blocks summed serially, block partials
// combined in a pairwise tree. The result does not depend on the number of
// OpenMP threads, only on the block size and the element order.

inline constexpr std::size_t kReductionBlock = 4096;

// Pairwise combine of an array of partial sums (in place, destroys input).
inline double pairwise_combine(std::vector<double>& parts) {
  if (parts.empty()) return 0.0;
  std::size_t n = parts.size();
  while (n > 1) {
    const std::size_t half = (n + 1) / 2;
    for (std::size_t i = 0; i < n / 2; ++i) parts[i] = parts[2 * i] + parts[2 * i + 1];
    if (n % 2 == 1) parts[n / 2] = parts[n - 1];
    n = half;
  }
  return parts[0];
}

// Deterministic sum of f(i) for i in [0, count). F: std::size_t -> double.
template <typename F>
double block_sum(std::size_t count, F&& f) {
  if (count == 0) return 0.0;
  const std::size_t nblocks = (count + kReductionBlock - 1) / kReductionBlock;
  std::vector<double> parts(nblocks, 0.0);
#pragma omp parallel for schedule(static) if (nblocks > 4)
  for (long long b = 0; b < static_cast<long long>(nblocks); ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kReductionBlock;
    const std::size_t hi = lo + kReductionBlock < count ? lo + kReductionBlock : count;
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += f(i);
    parts[static_cast<std::size_t>(b)] = s;
  }
  return pairwise_combine(parts);
}

}  // namespace surfcell
