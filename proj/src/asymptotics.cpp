#include "frsf/asymptotics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

namespace frsf {

namespace {

double cell_volume(const Grid& g) {
  double hd = 1.0;
  for (int a = 0; a < g.dim; ++a) hd *= g.spacing();
  return hd;
}

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

FitResult fit_power_law(const std::vector<std::pair<double, double>>& points) {
  const int n = static_cast<int>(points.size());
  if (n < 4) throw InvalidParams("power-law fit needs at least 4 points");
  double xmin = points[0].first, xmax = points[0].first;
  for (const auto& [x, y] : points) {
    if (!(x > 0) || !(y > 0)) throw InvalidParams("power-law fit needs positive points");
    xmin = std::min(xmin, x);
    xmax = std::max(xmax, x);
  }
  if (xmax / xmin < std::sqrt(10.0))
    throw DegenerateFit("fit abscissae span less than half a decade");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [x, y] : points) {
    const double lx = std::log(x), ly = std::log(y);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  FitResult fit;
  const double det = n * sxx - sx * sx;
  fit.slope = (n * sxy - sx * sy) / det;
  fit.intercept = (sy - fit.slope * sx) / n;
  double ss_res = 0, ss_tot = 0;
  const double ybar = sy / n;
  for (const auto& [x, y] : points) {
    const double e = std::log(y) - (fit.intercept + fit.slope * std::log(x));
    ss_res += e * e;
    ss_tot += (std::log(y) - ybar) * (std::log(y) - ybar);
  }
  fit.r_squared = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

Field rescale_critical(const Field& u, double lambda, const ProblemParams& pr) {
  if (!(lambda > 0)) throw InvalidParams("rescale_critical needs lambda > 0");
  Grid g = u.grid;
  g.half_length /= lambda;
  const double amp = std::pow(lambda, (g.dim - 2.0 * pr.s) / 2.0);
  return Field(g, amp * u.values);
}

Field rescale_subcritical(const Field& u, const ProblemParams& pr) {
  if (pr.regime() != Regime::Subcritical) throw WrongRegime("rescaling needs p < 2*");
  if (!(pr.eps > 0)) throw InvalidParams("rescale_subcritical needs eps > 0");
  const double amp = std::pow(pr.eps, -1.0 / (pr.p - 2.0));
  const double dil = std::pow(pr.eps, 1.0 / (2.0 * pr.s));
  Grid g = u.grid;
  g.half_length *= dil;
  return Field(g, amp * u.values);
}

double concentration_lambda(const Field& w, const ProblemParams& pr, double q_star_value) {
  if (!(q_star_value > 0)) throw InvalidParams("concentration target must be positive");
  const double hd = cell_volume(w.grid);
  const PowFn pw = PowFn::make(pr.p);
  const std::int64_t n = w.grid.points();
  std::vector<std::pair<double, double>> mass(n);  // (radius, |w|^p cell mass)
  for (std::int64_t i = 0; i < n; ++i)
    mass[i] = {std::sqrt(w.grid.radius_sq(i)), hd * pw(std::abs(w.values[i]))};
  std::sort(mass.begin(), mass.end());
  std::vector<double> radii, cum;
  radii.reserve(n);
  cum.reserve(n);
  double acc = 0.0;
  for (std::int64_t i = 0; i < n; ++i) {
    acc += mass[i].second;
    if (i + 1 < n && mass[i + 1].first == mass[i].first) continue;
    radii.push_back(mass[i].first);
    cum.push_back(acc);
  }
  if (!(acc > q_star_value))
    throw NotSolvable("total |w|_p^p mass is below the concentration target");

  auto Q = [&](double lam) {
    auto it = std::lower_bound(radii.begin(), radii.end(), lam);
    if (it == radii.begin()) return 0.0;
    const std::size_t k = static_cast<std::size_t>(it - radii.begin()) - 1;
    if (it == radii.end()) return cum.back();
    const double t = (lam - radii[k]) / (radii[k + 1] - radii[k]);
    return cum[k] + t * (cum[k + 1] - cum[k]);
  };

  double lo = 0.0, hi = radii.back();
  double qlo = 0.0, qhi = acc;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double qm = Q(mid);
    if (qm < qlo - 1e-15 || qm > qhi + 1e-15)
      throw Error("concentration function is not monotone");
    if (std::abs(qm - q_star_value) <= 1e-6 * q_star_value) return mid;
    if (qm < q_star_value) {
      lo = mid;
      qlo = qm;
    } else {
      hi = mid;
      qhi = qm;
    }
  }
  return 0.5 * (lo + hi);
}

double critical_lambda_estimate(const ProblemParams& pr, double eps, double w1_norm2_sq,
                                double w1_normq_q) {
  const double ts = pr.two_star();
  const double b2 = ts / 2.0 * w1_norm2_sq;
  const double bq = ts / pr.q * w1_normq_q;
  const double margin = (pr.dim - 2.0 * pr.s) * pr.q / 2.0 - pr.dim;
  if (!(margin > 0)) throw InvalidParams("lambda estimate needs q > 2*");
  const double base = 2.0 * pr.s * b2 * eps / (bq * margin);
  return std::pow(base, -2.0 / ((pr.q - 2.0) * (pr.dim - 2.0 * pr.s)));
}

LimitSolution solve_limit_problem(Regime regime, const ProblemParams& pr, const Grid& grid,
                                  const MinimizeOptions& opts) {
  if (pr.regime() != regime) throw WrongRegime("parameters do not match the requested regime");
  LimitSolution out;
  switch (regime) {
    case Regime::Critical: {
      const SStarResult ss = compute_S_star(pr, grid);
      out.field = sample_bubble(grid, pr, 1.0, BubbleFamily::U);
      out.level = ss.value;
      return out;
    }
    case Regime::Supercritical: {
      const Nonlinearity nl = Nonlinearity::limit_supercritical(pr);
      const Field shape = build_init_shape(pr, grid, GaussianInit{});
      MinimizerResult res = minimize_family(grid, pr.s, nl, shape, opts);
      out.level = res.s_eps;
      out.field = dilate_rescale_grid(res.w, std::pow(res.s_eps, 1.0 / (2.0 * pr.s)));
      out.minimizer = std::move(res);
      return out;
    }
    case Regime::Subcritical: {
      ProblemParams zero = pr;
      zero.eps = 0.0;
      const Nonlinearity nl = Nonlinearity::rescaled_subcritical(zero);  // G_0
      const Field shape = build_init_shape(pr, grid, GaussianInit{});
      MinimizerResult res = minimize_family(grid, pr.s, nl, shape, opts);
      out.level = res.s_eps;
      out.field = dilate_rescale_grid(res.w, std::pow(res.s_eps, 1.0 / (2.0 * pr.s)));
      out.minimizer = std::move(res);
      return out;
    }
  }
  throw Error("unreachable");
}

double max_profile_distance(const Field& a, const Field& b) {
  const RadialProfile pb = radialize(b);
  double worst = 0.0;
  const std::int64_t n = a.grid.points();
  for (std::int64_t i = 0; i < n; ++i) {
    const double r = std::sqrt(a.grid.radius_sq(i));
    worst = std::max(worst, std::abs(a.values[i] - profile_interp(pb, r)));
  }
  return worst;
}

double lt_profile_distance(const Field& a, const Field& b, double t) {
  const RadialProfile pb = radialize(b);
  const PowFn pw = PowFn::make(t);
  const double hd = cell_volume(a.grid);
  double acc = 0.0;
  const std::int64_t n = a.grid.points();
  for (std::int64_t i = 0; i < n; ++i) {
    const double r = std::sqrt(a.grid.radius_sq(i));
    acc += pw(std::abs(a.values[i] - profile_interp(pb, r)));
  }
  return std::pow(hd * acc, 1.0 / t);
}

double max_distance_to_bubble(const Field& v, const ProblemParams& pr) {
  const double c = bubble_constant(v.grid.dim, pr.s);
  const double nm = (v.grid.dim - 2.0 * pr.s) / 2.0;
  double worst = 0.0;
  const std::int64_t n = v.grid.points();
  for (std::int64_t i = 0; i < n; ++i) {
    const double u1 = c * std::pow(1.0 + v.grid.radius_sq(i), -nm);
    worst = std::max(worst, std::abs(v.values[i] - u1));
  }
  return worst;
}

ScalingStudy sweep(const ProblemParams& base, const std::vector<double>& eps_list,
                   const SweepOptions& opts) {
  base.validate();
  if (opts.grid.dim != base.dim) throw InvalidParams("sweep grid dimension differs from N");
  if (eps_list.size() < 4) throw InvalidParams("sweep needs at least 4 eps values");
  const double estar = eps_star(base.p, base.q);
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    if (!(eps_list[i] > 0) || !(eps_list[i] < estar))
      throw InvalidParams("sweep eps values must lie in (0, eps_*)");
    if (i > 0 && !(eps_list[i] < eps_list[i - 1]))
      throw InvalidParams("sweep eps values must be strictly decreasing");
  }

  ScalingStudy study;
  study.regime = base.regime();

  double w1_norm2_sq = 0.0, w1_normq_q = 0.0;
  Field limit_field;
  bool have_limit = false;

  if (study.regime == Regime::Critical) {
    const SStarResult ss = compute_S_star(base, opts.grid);
    study.s_star = ss.value;
    study.s_limit = ss.value;
    study.q_star = q_star(opts.grid, base, ss.value);
    const Field w1 = sample_bubble(opts.grid, base, 1.0, BubbleFamily::W, ss.value);
    w1_norm2_sq = l2_sq(w1);
    w1_normq_q = lt_pow(w1, base.q);
    study.limit_center = bubble_constant(base.dim, base.s);
  } else if (opts.compute_limit) {
    const Grid lg = opts.has_limit_grid ? opts.limit_grid : opts.grid;
    const LimitSolution lim = solve_limit_problem(study.regime, base, lg, opts.minimize);
    study.s_limit = lim.level;
    study.limit_center = center_value(lim.field);
    limit_field = lim.field;
    have_limit = true;
  }

  Field warm;
  bool have_warm = false;
  double prev_eps = 0.0;

  for (double eps : eps_list) {
    SweepRecord rec;
    rec.eps = eps;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      ProblemParams pr = base;
      pr.eps = eps;

      InitSpec init = GaussianInit{};
      if (opts.warm_start && have_warm) {
        Field start = warm;
        if (study.regime == Regime::Critical) {
          // pre-stretch toward the predicted concentration scale
          const double ratio =
              std::pow(eps / prev_eps, -(pr.p - 2.0) / (2.0 * pr.s * (pr.q - 2.0)));
          try {
            ResampleOptions ro;
            ro.warn = false;
            Field stretched = resample_dilate(start, ratio, ro);
            stretched.values *= std::pow(ratio, -(pr.dim - 2.0 * pr.s) / 2.0);
            start = std::move(stretched);
          } catch (const ResampleOverflow&) {
          }
        }
        init = FieldInit{std::move(start)};
      } else if (study.regime == Regime::Critical) {
        const double lam = critical_lambda_estimate(pr, eps, w1_norm2_sq, w1_normq_q);
        init = BubbleInit{lam / std::pow(study.s_star, 1.0 / (2.0 * pr.s))};
      } else if (have_limit && study.regime == Regime::Supercritical && !opts.has_limit_grid) {
        init = FieldInit{Field(opts.grid, limit_field.values)};
      }

      MinimizerResult res = minimize(pr, opts.grid, init, opts.minimize);
      const Field u = ground_state(res, pr);
      rec.s_eps = res.s_eps;
      rec.u_center = center_value(res.w);
      rec.iterations = res.iterations;
      rec.converged = res.converged;
      rec.norms["norm2sq"] = l2_sq(res.w);
      rec.norms["normp_p"] = lt_pow(res.w, pr.p);
      rec.norms["normq_q"] = lt_pow(res.w, pr.q);

      if (study.regime == Regime::Subcritical) {
        const Field v = rescale_subcritical(u, pr);
        const auto [wp, kappa] =
            normalize_constraint_family(v, Nonlinearity::rescaled_subcritical(pr), pr.s);
        rec.certificate = make_report(res, u, pr, &wp);
        rec.norms["s_prime"] = hs_seminorm_sq(wp, pr.s);
        rec.norms["ratio_center"] = rec.u_center * std::pow(eps, -1.0 / (pr.p - 2.0));
        if (have_limit) rec.norms["dist_v0_max"] = max_profile_distance(v, limit_field);
      } else {
        rec.certificate = make_report(res, u, pr, nullptr);
      }

      if (study.regime == Regime::Critical) {
        rec.lambda_eps = concentration_lambda(res.w, pr, study.q_star);
        rec.sigma_eps = rec.s_eps - study.s_star;
        const Field vt = rescale_critical(u, rec.lambda_eps, pr);
        rec.norms["dist_U1_max"] = max_distance_to_bubble(vt, pr);
      }
      if (study.regime == Regime::Supercritical && have_limit) {
        rec.norms["gap_S"] = rec.s_eps - study.s_limit;
        rec.norms["dist_u0_Lq"] = lt_profile_distance(u, limit_field, pr.q);
      }

      warm = Field(opts.grid, res.w.values);
      have_warm = true;
      prev_eps = eps;
    } catch (const std::exception& e) {
      rec.error = e.what();
    }
    rec.wall_time = seconds_since(t0);
    study.records.push_back(std::move(rec));
  }

  int good = 0;
  for (const auto& r : study.records)
    if (r.ok() && r.converged) ++good;
  if (good < 4) {
    study.fits_skipped = true;
    return study;
  }

  auto collect = [&](auto&& getter) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& r : study.records) {
      if (!r.ok() || !r.converged) continue;
      const double y = getter(r);
      if (y > 0) pts.emplace_back(r.eps, y);
    }
    return pts;
  };
  auto try_fit = [&](const std::string& name, auto&& getter) {
    const auto pts = collect(getter);
    if (pts.size() < 4) return;
    try {
      study.fits[name] = fit_power_law(pts);
    } catch (const DegenerateFit&) {
    }
  };

  try_fit("u_center", [](const SweepRecord& r) { return r.u_center; });
  if (study.regime == Regime::Critical) {
    try_fit("lambda_eps", [](const SweepRecord& r) { return r.lambda_eps; });
    try_fit("sigma_eps", [](const SweepRecord& r) { return r.sigma_eps; });
  }
  if (study.regime == Regime::Supercritical) {
    try_fit("gap_S", [](const SweepRecord& r) {
      auto it = r.norms.find("gap_S");
      return it == r.norms.end() ? 0.0 : it->second;
    });
  }
  return study;
}

}  // namespace frsf
