#include "surfcell/grid.hpp"

#include <stdexcept>

namespace surfcell {

void Grid::validate() const {
  if (N != 1 && N != 2) throw std::invalid_argument("grid: N must be 1 or 2");
  if (d < 1) throw std::invalid_argument("grid: d must be >= 1");
  if (N == 2 && n_prime < 4) throw std::invalid_argument("grid: n_prime must be >= 4");
  if (n_last < 8) throw std::invalid_argument("grid: n_last must be >= 8");
  if (band < 2) throw std::invalid_argument("grid: band must be >= 2");
  if (n_last - 2 * band < 4)
    throw std::invalid_argument("grid: bands leave fewer than 4 free rows");
}

void DensityField::validate_nonnegative() const {
  for (double v : values)
    if (v < 0.0) throw std::invalid_argument("density field has a negative value");
}

void Region::validate() const {
  constexpr double pad = 1e-12;
  if (lo_prime < -0.5 - pad || hi_prime > 0.5 + pad || lo_last < -0.5 - pad ||
      hi_last > 0.5 + pad)
    throw std::invalid_argument("region extends outside the unit box");
  if (lo_prime > hi_prime || lo_last > hi_last)
    throw std::invalid_argument("region bounds are reversed");
}

}  // namespace surfcell
