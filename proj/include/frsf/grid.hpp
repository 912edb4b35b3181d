#pragma once

#include <array>
#include <cstdint>

#include "frsf/errors.hpp"

namespace frsf {

/// Uniform periodic grid on the box [-L, L)^dim.
/// Samples sit at cell centers x_i = (i - m/2) * h per axis, h = 2L/m,
/// so the origin is the sample at index m/2. Fourier modes are the integer
/// wave vectors scaled by pi/L.
struct Grid {
  int dim = 1;
  int m = 0;              // points per axis, even
  double half_length = 0; // L

  double spacing() const { return 2.0 * half_length / m; }

  std::int64_t points() const {
    std::int64_t n = 1;
    for (int a = 0; a < dim; ++a) n *= m;
    return n;
  }

  double coord(int index) const { return (index - m / 2) * spacing(); }

  /// Decodes a row-major flat index into per-axis indices.
  std::array<int, 3> unravel(std::int64_t flat) const {
    std::array<int, 3> idx{0, 0, 0};
    for (int a = dim - 1; a >= 0; --a) {
      idx[a] = static_cast<int>(flat % m);
      flat /= m;
    }
    return idx;
  }

  /// Physical coordinates of the sample at a flat index.
  std::array<double, 3> point(std::int64_t flat) const {
    auto idx = unravel(flat);
    std::array<double, 3> x{0, 0, 0};
    for (int a = 0; a < dim; ++a) x[a] = coord(idx[a]);
    return x;
  }

  double radius_sq(std::int64_t flat) const {
    auto x = point(flat);
    double r2 = 0;
    for (int a = 0; a < dim; ++a) r2 += x[a] * x[a];
    return r2;
  }

  /// Signed integer mode for FFT output index k along a full axis.
  int signed_mode(int k) const { return k <= m / 2 ? k : k - m; }

  bool operator==(const Grid& o) const {
    return dim == o.dim && m == o.m && half_length == o.half_length;
  }
};

inline Grid make_grid(int dim, int m, double half_length) {
  if (dim < 1 || dim > 3) throw DimensionError("grid dim must be 1, 2 or 3");
  if (m < 2 || m % 2 != 0) throw InvalidParams("grid points per axis must be even and >= 2");
  if (!(half_length > 0)) throw InvalidParams("grid half length must be positive");
  return Grid{dim, m, half_length};
}

}  // namespace frsf
