#pragma once

#include <stdexcept>
#include <vector>

namespace surfcell {

// Symmetric positive-definite banded LDL^T factorization and solve (no
// pivoting). Storage: diag[k][i] = A(i, i+k) for k = 0..bw.
class BandedSpd {
 public:
  BandedSpd() = default;

  void factor(const std::vector<std::vector<double>>& bands) {
    bands_ = bands;
    const std::size_t n = bands_[0].size();
    const std::size_t bw = bands_.size() - 1;
    for (std::size_t i = 0; i < n; ++i) {
      double d = bands_[0][i];
      for (std::size_t k = 1; k <= bw && k <= i; ++k) {
        const double l = bands_[k][i - k];  // L(i, i-k) slot
        d -= l * l * bands_[0][i - k];
      }
      if (!(d > 0.0)) throw std::runtime_error("banded factorization lost definiteness");
      bands_[0][i] = d;
      // update the column below: L(i+k, i) = (A(i+k,i) - ...) / d
      for (std::size_t k = 1; k <= bw && i + k < n; ++k) {
        double v = bands_[k][i];
        for (std::size_t m = 1; m + k <= bw && m <= i; ++m)
          v -= bands_[m][i - m] * bands_[0][i - m] * bands_[m + k][i - m];
        bands_[k][i] = v / d;
      }
    }
    n_ = n;
    bw_ = bw;
  }

  // Solves A x = b in place.
  void solve(double* b) const {
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t k = 1; k <= bw_ && k <= i; ++k) b[i] -= bands_[k][i - k] * b[i - k];
    for (std::size_t i = 0; i < n_; ++i) b[i] /= bands_[0][i];
    for (std::size_t i = n_; i-- > 0;)
      for (std::size_t k = 1; k <= bw_ && i + k < n_; ++k)
        b[i] -= bands_[k][i] * b[i + k];
  }

  std::size_t size() const { return n_; }

 private:
  std::vector<std::vector<double>> bands_;  // after factor: D and L
  std::size_t n_ = 0;
  std::size_t bw_ = 0;
};

}  // namespace surfcell
