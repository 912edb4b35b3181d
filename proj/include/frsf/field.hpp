#pragma once

#include <Eigen/Core>
#include <utility>

#include "frsf/grid.hpp"

namespace frsf {

/// Real scalar function sampled on a periodic grid, row-major.
struct Field {
  Grid grid;
  Eigen::ArrayXd values;

  Field() = default;
  Field(Grid g, Eigen::ArrayXd v) : grid(g), values(std::move(v)) {}
  explicit Field(const Grid& g) : grid(g), values(Eigen::ArrayXd::Zero(g.points())) {}
};

/// Samples fn(x) at every grid point; fn takes the coordinate array.
template <class Fn>
Field make_field(const Grid& g, Fn&& fn) {
  Field f(g);
  const std::int64_t n = g.points();
  for (std::int64_t i = 0; i < n; ++i) f.values[i] = fn(g.point(i));
  return f;
}

/// Samples a radial profile fn(|x|^2).
template <class Fn>
Field make_radial_field(const Grid& g, Fn&& fn) {
  Field f(g);
  const std::int64_t n = g.points();
  for (std::int64_t i = 0; i < n; ++i) f.values[i] = fn(g.radius_sq(i));
  return f;
}

inline double center_value(const Field& f) {
  std::int64_t flat = 0;
  for (int a = 0; a < f.grid.dim; ++a) flat = flat * f.grid.m + f.grid.m / 2;
  return f.values[flat];
}

}  // namespace frsf
