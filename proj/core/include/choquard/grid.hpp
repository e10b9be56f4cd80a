#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace choquard {

/// Periodic uniform Cartesian lattice on the cube [-L/2, L/2)^dim.
/// Axis coordinates are x_i = -L/2 + i*h with h = L/n, so the origin
/// sits exactly at index n/2 of every axis.
struct Grid {
  int dim = 0;            // 1, 2 or 3
  int n = 0;              // points per axis, power of two >= 8
  double box_length = 0;  // L, identical on every axis
  double spacing = 0;     // h = L/n

  std::int64_t num_points() const {
    std::int64_t p = 1;
    for (int d = 0; d < dim; ++d) p *= n;
    return p;
  }
  double coord(int i) const { return spacing * (i - n / 2); }
  double cell_volume() const {
    double v = 1;
    for (int d = 0; d < dim; ++d) v *= spacing;
    return v;
  }

  bool operator==(const Grid&) const = default;
};

/// dim in {1,2,3}, n a power of two >= 8, L > 0.
Grid make_grid(int dim, int n, double box_length);

/// Real scalar field sampled on a Grid, indexed lexicographically
/// (first axis slowest). Treated as an immutable value by every
/// operation in the library: all operations return fresh fields.
class Field {
 public:
  Field() = default;
  Field(const Grid& g, double fill = 0.0)
      : grid_(g), values_(static_cast<std::size_t>(g.num_points()), fill) {}

  const Grid& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  double operator[](std::int64_t i) const { return values_[static_cast<std::size_t>(i)]; }
  double& operator[](std::int64_t i) { return values_[static_cast<std::size_t>(i)]; }
  std::int64_t size() const { return static_cast<std::int64_t>(values_.size()); }

  bool all_finite() const;

 private:
  Grid grid_;
  std::vector<double> values_;
};

/// Decomposes the flat index into per-axis indices (size = grid.dim).
std::array<int, 3> unflatten(const Grid& g, std::int64_t flat);
std::int64_t flatten(const Grid& g, const std::array<int, 3>& idx);

/// Coordinates of a flat index; unused axes are 0.
std::array<double, 3> point_of(const Grid& g, std::int64_t flat);

/// Squared distance from the origin of the lattice point behind `flat`.
double radius_sq_of(const Grid& g, std::int64_t flat);

// --- quadrature and norms ------------------------------------------------

/// h^dim * sum u^2, the squared L2 norm carrying the mass constraint.
double mass(const Field& u);

/// h^dim * sum a*b.
double inner(const Field& a, const Field& b);

/// (h^dim * sum |u|^p)^(1/p).
double lp_norm(const Field& u, double p);

double max_abs(const Field& u);

// --- spectral operations ---------------------------------------------------

/// Periodic convolution: result(x) = h^dim * sum_y kernel(x-y mod box) f(y),
/// evaluated through forward/inverse FFTs. Kernel and f must share a grid.
Field convolve(const Field& kernel, const Field& f);

/// Spectral Laplacian (multiplier -|k|^2); exact on band-limited fields.
Field laplacian(const Field& f);

/// ||grad f||_2^2 by Parseval, sum |k|^2 |f_hat(k)|^2 with quadrature weight.
double grad_norm_sq(const Field& f);

// --- rearrangement and centering -------------------------------------------

/// Symmetric-decreasing rearrangement on the lattice: |f| values are
/// assigned in decreasing order to grid points sorted by distance from
/// the origin, ties broken by lexicographic index. Preserves every L^p
/// norm exactly (the value multiset is permuted).
Field rearrange_decreasing(const Field& f);

/// sup_z ||f||_{L2(z+Q)} over all grid-aligned translates of the unit
/// cube Q, the concentration quantity of the vanishing alternative.
/// Computed as max_z sqrt((chi_Q * f^2)(z)) with one periodic convolution.
double block_mass_sup(const Field& f);

/// Cyclic shift placing the maximizer of the block-mass map at the
/// origin. All norms and convolution energies are unchanged (cyclic
/// shifts commute with periodic convolution). Throws ZeroField on f == 0.
Field recenter(const Field& f);

/// Cyclic shift by the given number of cells along each axis.
Field cyclic_shift(const Field& f, const std::array<int, 3>& cells);

}  // namespace choquard
