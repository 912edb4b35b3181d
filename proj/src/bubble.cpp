#include "frsf/bubble.hpp"

#include <cmath>

namespace frsf {

double bubble_constant(int dim, double s) {
  if (!(s > 0.0 && s < 1.0) || !(dim > 2.0 * s)) throw InvalidParams("need N > 2s, s in (0,1)");
  const double nm = dim - 2.0 * s;
  const double np = dim + 2.0 * s;
  const double lg = std::lgamma(np / 2.0) - std::lgamma(nm / 2.0);
  return std::pow(2.0, nm / 2.0) * std::exp(lg * nm / (4.0 * s));
}

Field sample_bubble(const Grid& grid, const ProblemParams& pr, double lambda, BubbleFamily family,
                    double s_star_value) {
  if (!(lambda > 0)) throw InvalidParams("bubble scale lambda must be positive");
  if (family == BubbleFamily::W && !(s_star_value > 0))
    throw InvalidParams("family W needs the numeric S_*");
  const double nm = (grid.dim - 2.0 * pr.s) / 2.0;
  const double c = bubble_constant(grid.dim, pr.s);
  const double amp = c * std::pow(lambda, -nm);
  const double stretch =
      family == BubbleFamily::W ? std::pow(s_star_value, 1.0 / (2.0 * pr.s)) : 1.0;
  return make_radial_field(grid, [&](double r2) {
    const double y2 = r2 * stretch * stretch / (lambda * lambda);
    return amp * std::pow(1.0 + y2, -nm);
  });
}

double sobolev_quotient(const Field& w, const ProblemParams& pr, const Transform& tr) {
  const double ts = pr.two_star();
  const double denom = lt_pow(w, ts);
  if (!(denom > 0)) throw ZeroField("Sobolev quotient of the zero field");
  const double num = hs_seminorm_sq(w, pr.s, tr);
  const double expo = (w.grid.dim - 2.0 * pr.s) / w.grid.dim;
  return num / std::pow(denom, expo);
}

double sobolev_quotient(const Field& w, const ProblemParams& pr) {
  Transform tr(w.grid);
  return sobolev_quotient(w, pr, tr);
}

SStarResult compute_S_star(const ProblemParams& pr, const Grid& grid, const Transform& tr) {
  const Field u1 = sample_bubble(grid, pr, 1.0, BubbleFamily::U);
  const double hs = hs_seminorm_sq(u1, pr.s, tr);
  const double lp = lt_pow(u1, pr.two_star());
  SStarResult out;
  out.self_consistency_residual = std::abs(hs - lp) / hs;
  if (out.self_consistency_residual > 0.05)
    throw ResolutionError("grid does not resolve the bubble: |U|_{Hs}^2 vs |U|_{2*}^{2*} differ by " +
                          std::to_string(out.self_consistency_residual));
  out.value = sobolev_quotient(u1, pr, tr);
  return out;
}

SStarResult compute_S_star(const ProblemParams& pr, const Grid& grid) {
  Transform tr(grid);
  return compute_S_star(pr, grid, tr);
}

double q_star(const Grid& grid, const ProblemParams& pr, double s_star_value) {
  const Field w1 = sample_bubble(grid, pr, 1.0, BubbleFamily::W, s_star_value);
  const double ts = pr.two_star();
  const PowFn pw = PowFn::make(ts);
  double hd = 1.0;
  for (int a = 0; a < grid.dim; ++a) hd *= grid.spacing();
  double acc = 0.0;
  const std::int64_t n = grid.points();
  for (std::int64_t i = 0; i < n; ++i)
    if (grid.radius_sq(i) < 1.0) acc += pw(std::abs(w1.values[i]));
  return hd * acc;
}

}  // namespace frsf
