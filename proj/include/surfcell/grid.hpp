#pragma once

#include <cstddef>
#include <vector>

namespace surfcell {

// Box grid on Q = (-1/2, 1/2)^N with cell-centered nodes, periodic in the
// first N-1 axes ("prime" axes) and pinned affine bands at the x_N ends.
// N = 2 is the full-dimensional case; N = 1 carries profile solves.
struct Grid {
  int N = 2;        // spatial dimension (1 or 2)
  int d = 1;        // components per node
  int n_prime = 4;  // nodes per periodic axis (ignored for N = 1)
  int n_last = 8;   // nodes along x_N
  int band = 2;     // pinned layers at each x_N end

  // Throws std::invalid_argument when the stencil support is too thin.
  void validate() const;

  int rows() const { return n_last; }
  int cols() const { return N == 2 ? n_prime : 1; }
  std::size_t num_nodes() const { return static_cast<std::size_t>(rows()) * cols(); }
  std::size_t num_values() const { return num_nodes() * d; }

  double h_prime() const { return 1.0 / n_prime; }
  double h_last() const { return 1.0 / n_last; }
  double cell_volume() const { return N == 2 ? h_prime() * h_last() : h_last(); }

  // Cell-centered coordinates.
  double x_prime(int j) const { return -0.5 + (j + 0.5) * h_prime(); }
  double x_last(int i) const { return -0.5 + (i + 0.5) * h_last(); }

  bool is_band_row(int i) const { return i < band || i >= n_last - band; }
  int interior_begin() const { return band; }
  int interior_end() const { return n_last - band; }  // one past

  std::size_t node_index(int i, int j) const {
    return static_cast<std::size_t>(i) * cols() + j;
  }
  std::size_t value_index(int i, int j, int c) const { return node_index(i, j) * d + c; }

  bool operator==(const Grid&) const = default;
};

// Deformation field: d values per node.
struct GridField {
  Grid grid;
  std::vector<double> values;

  GridField() = default;
  explicit GridField(const Grid& g) : grid(g), values(g.num_values(), 0.0) {}

  double& at(int i, int j, int c) { return values[grid.value_index(i, j, c)]; }
  double at(int i, int j, int c) const { return values[grid.value_index(i, j, c)]; }
};

// Nonnegative scalar per node (surfactant density, curvature norms).
struct DensityField {
  Grid grid;
  std::vector<double> values;

  DensityField() = default;
  explicit DensityField(const Grid& g) : grid(g), values(g.num_nodes(), 0.0) {}

  double& at(int i, int j) { return values[grid.node_index(i, j)]; }
  double at(int i, int j) const { return values[grid.node_index(i, j)]; }

  // Throws std::invalid_argument if any value is negative.
  void validate_nonnegative() const;
};

// Axis-aligned sub-box of Q. Prime bounds are ignored for N = 1 grids.
struct Region {
  double lo_prime = -0.5;
  double hi_prime = 0.5;
  double lo_last = -0.5;
  double hi_last = 0.5;

  static Region all() { return Region{}; }
  static Region last_slab(double lo, double hi) { return Region{-0.5, 0.5, lo, hi}; }

  // Throws std::invalid_argument when the box is not contained in Q.
  void validate() const;

  bool contains(double xp, double xl) const {
    return xp >= lo_prime && xp <= hi_prime && xl >= lo_last && xl <= hi_last;
  }
};

// Per-node d x N matrices (discrete gradient). Entry (c, axis) at m[c*N+axis].
struct MatrixField {
  Grid grid;
  std::vector<double> values;  // num_nodes * d * N

  MatrixField() = default;
  explicit MatrixField(const Grid& g)
      : grid(g), values(g.num_nodes() * g.d * g.N, 0.0) {}

  double* at(int i, int j) { return values.data() + grid.node_index(i, j) * grid.d * grid.N; }
  const double* at(int i, int j) const {
    return values.data() + grid.node_index(i, j) * grid.d * grid.N;
  }
};

}  // namespace surfcell
