#include "frsf/minimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstdlib>

namespace frsf {

namespace {

double cell_volume(const Grid& g) {
  double hd = 1.0;
  for (int a = 0; a < g.dim; ++a) hd *= g.spacing();
  return hd;
}

double two_star_of(const Grid& g, double s) { return 2.0 * g.dim / (g.dim - 2.0 * s); }
double gamma_of(const Grid& g, double s) { return (g.dim - 2.0 * s) / g.dim; }

// B = 2* int F(v)
double constraint_value(const Eigen::ArrayXd& v, const Nonlinearity& nl, double two_star,
                        double hd) {
  double acc = 0.0;
  const std::int64_t n = v.size();
  for (std::int64_t i = 0; i < n; ++i) acc += nl.F(v[i]);
  return two_star * hd * acc;
}

void f_of(const Eigen::ArrayXd& v, const Nonlinearity& nl, Eigen::ArrayXd& out) {
  out.resize(v.size());
  const std::int64_t n = v.size();
  for (std::int64_t i = 0; i < n; ++i) out[i] = nl.f(v[i]);
}

// quadrature inner product of two real fields given their half spectra
double spectral_inner(const Transform& tr, const Eigen::ArrayXcd& a, const Eigen::ArrayXcd& b,
                      const Eigen::ArrayXd* mult, double hd) {
  const double scale = hd / static_cast<double>(tr.grid().points());
  const auto& w = tr.sym_weight();
  double acc = 0.0;
  const std::int64_t n = a.size();
  if (mult) {
    const auto& m = *mult;
    for (std::int64_t i = 0; i < n; ++i)
      acc += w[i] * m[i] * (a[i].real() * b[i].real() + a[i].imag() * b[i].imag());
  } else {
    for (std::int64_t i = 0; i < n; ++i)
      acc += w[i] * (a[i].real() * b[i].real() + a[i].imag() * b[i].imag());
  }
  return acc * scale;
}

// max(v - sigma, 0) with sigma >= 0 chosen so the mean matches target_mean.
// Plain clipping pumps the clipped mass into the uniform mode, which the
// frozen-mode descent cannot drain; the compensated projection keeps the
// mean slice invariant. phi(sigma) = sum max(v_i - sigma, 0) is convex and
// strictly decreasing, so Newton from 0 converges monotonically.
void project_positive_mean(Eigen::ArrayXd& v, double target_mean) {
  const std::int64_t n = v.size();
  const double target_sum = target_mean * static_cast<double>(n);
  double sigma = 0.0;
  for (int it = 0; it < 60; ++it) {
    double phi = 0.0;
    std::int64_t live = 0;
    for (std::int64_t i = 0; i < n; ++i) {
      const double d = v[i] - sigma;
      if (d > 0) {
        phi += d;
        ++live;
      }
    }
    const double gap = phi - target_sum;
    if (gap <= 0 || live == 0) break;
    const double step = gap / static_cast<double>(live);
    sigma += step;
    if (step <= 1e-15 * (std::abs(sigma) + 1e-300)) break;
  }
  v = (v - sigma).max(0.0);
}

void radial_symmetrize(Field& w) {
  const double h = w.grid.spacing();
  const RadialProfile pr = radialize(w);
  int max_bin = 0;
  for (Eigen::Index i = 0; i < pr.radii.size(); ++i)
    max_bin = std::max(max_bin, static_cast<int>(pr.radii[i] / h));
  std::vector<double> by_bin(max_bin + 2, 0.0);
  for (Eigen::Index i = 0; i < pr.radii.size(); ++i)
    by_bin[static_cast<int>(pr.radii[i] / h)] = pr.values[i];
  const std::int64_t n = w.grid.points();
  for (std::int64_t i = 0; i < n; ++i) {
    const int b = static_cast<int>(std::sqrt(w.grid.radius_sq(i)) / h);
    if (b < static_cast<int>(by_bin.size())) w.values[i] = by_bin[b];
  }
}

}  // namespace

double quotient_family(const Field& w, const Nonlinearity& nl, double s, const Transform& tr) {
  const double hd = cell_volume(w.grid);
  const double B = constraint_value(w.values, nl, two_star_of(w.grid, s), hd);
  if (!(B > 0)) throw NotAdmissible("int F(w) <= 0: not in the admissible cone");
  const double A = hs_seminorm_sq(w, s, tr);
  return A * std::pow(B, -gamma_of(w.grid, s));
}

double quotient(const Field& w, const ProblemParams& pr, const Transform& tr) {
  return quotient_family(w, Nonlinearity::physical(pr, true), pr.s, tr);
}

double quotient(const Field& w, const ProblemParams& pr) {
  Transform tr(w.grid);
  return quotient(w, pr, tr);
}

Field quotient_gradient_family(const Field& w, const Nonlinearity& nl, double s,
                               const Transform& tr) {
  const double hd = cell_volume(w.grid);
  const double B = constraint_value(w.values, nl, two_star_of(w.grid, s), hd);
  if (!(B > 0)) throw NotAdmissible("int F(w) <= 0: not in the admissible cone");
  const Eigen::ArrayXcd spec = tr.forward(w.values);
  const Eigen::ArrayXd& sym = tr.symbol(s);
  const double A = tr.weighted_spectral_sum(spec, sym);
  Eigen::ArrayXd fb;
  f_of(w.values, nl, fb);
  const Eigen::ArrayXcd f_spec = tr.forward(fb);
  const double c = 2.0 * std::pow(B, -gamma_of(w.grid, s));
  const Eigen::ArrayXcd g_spec = c * (sym * spec - (A / B) * f_spec);
  return Field(w.grid, tr.inverse(g_spec));
}

Field quotient_gradient(const Field& w, const ProblemParams& pr, const Transform& tr) {
  return quotient_gradient_family(w, Nonlinearity::physical(pr, true), pr.s, tr);
}

Field quotient_gradient(const Field& w, const ProblemParams& pr) {
  Transform tr(w.grid);
  return quotient_gradient(w, pr, tr);
}

Field build_init_shape(const ProblemParams& pr, const Grid& grid, const InitSpec& init) {
  if (std::holds_alternative<BubbleInit>(init)) {
    const double lam = std::get<BubbleInit>(init).lambda;
    if (!(lam > 0)) throw InvalidParams("bubble init needs lambda > 0");
    const double nm = (grid.dim - 2.0 * pr.s) / 2.0;
    return make_radial_field(grid, [&](double r2) {
      return std::pow(lam, -nm) * std::pow(1.0 + r2 / (lam * lam), -nm);
    });
  }
  if (std::holds_alternative<GaussianInit>(init)) {
    const auto& gi = std::get<GaussianInit>(init);
    // Default width: lean against the box so the init carries almost no
    // mean. The uniform mode is frozen in the descent, and a fat init
    // parks the iterate on a background pedestal that the certificates
    // then reject.
    const double width =
        gi.width > 0 ? gi.width : std::max(grid.half_length / 150.0, 6.0 * grid.spacing());
    return make_radial_field(
        grid, [&](double r2) { return gi.amplitude * std::exp(-r2 / (width * width)); });
  }
  const Field& f = std::get<FieldInit>(init).field;
  if (!(f.grid == grid)) throw InvalidParams("init field lives on a different grid");
  return f;
}

MinimizerResult minimize_family(const Grid& grid, double s, const Nonlinearity& nl,
                                const Field& init_shape, const MinimizeOptions& opts,
                                bool keep_init_amplitude) {
  if (opts.max_iterations < 1) throw InvalidParams("max_iterations must be >= 1");
  if (!(opts.rel_tol > 0)) throw InvalidParams("rel_tol must be positive");

  const double hd = cell_volume(grid);
  const double two_star = two_star_of(grid, s);
  const double gamma = gamma_of(grid, s);
  Transform tr(grid, opts.fft_threads);
  const Eigen::ArrayXd& sym = tr.symbol(s);

  // admissible amplitude: scan c = 2^-4 .. 2^4 until 2* int F(c shape) > 0.
  // Warm starts keep their own amplitude when already admissible; named
  // shapes always scan from the bottom, which also keeps the init mean low.
  Eigen::ArrayXd w;
  {
    bool found = false;
    if (keep_init_amplitude && constraint_value(init_shape.values, nl, two_star, hd) > 0) {
      w = init_shape.values;
      found = true;
    }
    for (int e = -4; e <= 4 && !found; ++e) {
      const double c = std::ldexp(1.0, e);
      Eigen::ArrayXd cand = c * init_shape.values;
      if (constraint_value(cand, nl, two_star, hd) > 0) {
        w = std::move(cand);
        found = true;
      }
    }
    if (!found) throw NotAdmissibleInit("no amplitude in 2^-4..2^4 makes int F positive");
  }
  if (opts.positivity_projection) w = w.max(0.0);
  // the frozen-mode descent keeps the iterate on this mean slice
  const double slice_mean = w.sum() / static_cast<double>(grid.points());

  // The uniform mode is the kernel of the seminorm on the torus; fields of
  // the homogeneous space carry no mean, so the descent never moves it.
  // This also closes the degenerate constant branch (A = 0, int F > 0).
  Eigen::ArrayXd precond;
  if (opts.preconditioner)
    precond = 1.0 / (1.0 + sym);
  else
    precond = Eigen::ArrayXd::Ones(sym.size());
  if (std::getenv("FRSF_ZM_FREE") == nullptr) precond[0] = 0.0;

  MinimizerResult res;
  double tau = opts.step_rule.initial_step;
  const double armijo = opts.step_rule.sufficient_decrease;
  const double shrink = opts.step_rule.shrink;
  long total_backtracks = 0;
  bool stalled = false;
  double projection_slack_max = 0.0;
  double S_prev_trial = std::numeric_limits<double>::infinity();

  Eigen::ArrayXcd spec, f_spec, dir_spec;
  Eigen::ArrayXd fb, d, trial;
  double stat_res = 1.0;

  // Barzilai-Borwein proposal from the previous accepted step, safeguarded
  // by the Armijo backtracking below
  Eigen::ArrayXd w_prev, g_prev;
  Eigen::ArrayXd g_phys;
  bool have_prev = false;

  for (int iter = 0; iter < opts.max_iterations; ++iter) {
    tr.forward(w, spec);
    const double A = tr.weighted_spectral_sum(spec, sym);
    const double B = constraint_value(w, nl, two_star, hd);
    if (!(B > 0)) throw NotAdmissible("iterate left the admissible cone");
    const double S = A * std::pow(B, -gamma);
    if (S > S_prev_trial) projection_slack_max = std::max(projection_slack_max, S - S_prev_trial);
    res.quotient_history.push_back(S);

    f_of(w, nl, fb);
    const double nehari = hd * (fb * w).sum();
    stat_res = std::abs(1.0 - nehari / B);

    const int k = static_cast<int>(res.quotient_history.size()) - 1;
    if (k >= opts.stall_window) {
      const double drop = res.quotient_history[k - opts.stall_window] - S;
      if (drop < opts.rel_tol * S && stat_res < opts.stationarity_tol) {
        res.converged = true;
        break;
      }
    }

    tr.forward(fb, f_spec);
    const double c = 2.0 * std::pow(B, -gamma);
    const Eigen::ArrayXcd g_spec = c * (sym * spec - (A / B) * f_spec);
    dir_spec = -(precond * g_spec);
    const double slope = spectral_inner(tr, g_spec, dir_spec, nullptr, hd);
    if (!(slope < 0)) {
      res.converged = stat_res < opts.stationarity_tol;
      break;
    }
    tr.inverse(dir_spec, d);
    const double cross = spectral_inner(tr, spec, dir_spec, &sym, hd);
    const double add = spectral_inner(tr, dir_spec, dir_spec, &sym, hd);

    // BB1 step in the preconditioned metric: d = -K g, so
    // tau = <dw, dw>_K^{-1} / <dw, dg>_K^{-1} computed through d-values
    g_phys = -d;  // K g in physical space
    if (have_prev) {
      const Eigen::ArrayXd dw = w - w_prev;
      const Eigen::ArrayXd dg = g_phys - g_prev;
      const double num = (dw * dw).sum();
      const double den = (dw * dg).sum();
      if (den > 0 && num > 0) tau = std::min(num / den, 1e8);
    }
    w_prev = w;
    g_prev = g_phys;
    have_prev = true;

    bool accepted = false;
    int bt = 0;
    for (; bt < 60; ++bt) {
      trial = w + tau * d;
      const double Bt = constraint_value(trial, nl, two_star, hd);
      if (Bt > 0) {
        const double At = A + 2.0 * tau * cross + tau * tau * add;
        const double St = At * std::pow(Bt, -gamma);
        if (St <= S + armijo * tau * slope) {
          accepted = true;
          S_prev_trial = St;
          break;
        }
      }
      tau *= shrink;
    }
    total_backtracks += bt;
    if (!accepted) {
      stalled = true;
      res.converged = stat_res < opts.stationarity_tol;
      break;
    }

    w = std::move(trial);
    if (opts.positivity_projection) project_positive_mean(w, slice_mean);
    if (opts.radial_symmetrization && opts.radial_every > 0 &&
        (iter + 1) % opts.radial_every == 0) {
      Field tmp(grid, std::move(w));
      radial_symmetrize(tmp);
      w = std::move(tmp.values);
    }
  }
  res.iterations = static_cast<int>(res.quotient_history.size());

  // fresh evaluation of the final iterate, then exact normalization by
  // rescaling the box so that 2* int F = 1
  const double B_fin = constraint_value(w, nl, two_star, hd);
  if (!(B_fin > 0)) throw NotAdmissible("final iterate left the admissible cone");
  tr.forward(w, spec);
  const double A_fin = tr.weighted_spectral_sum(spec, sym);
  const double S_fin = A_fin * std::pow(B_fin, -gamma);
  const double delta = std::pow(B_fin, -1.0 / grid.dim);
  res.w = dilate_rescale_grid(Field(grid, std::move(w)), delta);
  res.normalize_delta = delta;
  res.s_eps = S_fin;

  res.diagnostics["constraint_error"] = std::abs(std::pow(delta, grid.dim) * B_fin - 1.0);
  res.diagnostics["stationarity_res"] = stat_res;
  res.diagnostics["backtracks"] = static_cast<double>(total_backtracks);
  res.diagnostics["final_step"] = tau;
  res.diagnostics["raw_constraint"] = B_fin;
  res.diagnostics["line_search_stalled"] = stalled ? 1.0 : 0.0;
  res.diagnostics["projection_slack_max"] = projection_slack_max;
  return res;
}

MinimizerResult minimize(const ProblemParams& pr, const Grid& grid, const InitSpec& init,
                         const MinimizeOptions& opts) {
  pr.validate();
  if (grid.dim != pr.dim) throw InvalidParams("grid dimension differs from N");
  if (pr.eps >= eps_star(pr.p, pr.q))
    throw EpsilonAboveThreshold("eps >= eps_* = " + std::to_string(eps_star(pr.p, pr.q)) +
                                ": no nontrivial solutions");
  const Field shape = build_init_shape(pr, grid, init);
  const bool warm = std::holds_alternative<FieldInit>(init);
  return minimize_family(grid, pr.s, Nonlinearity::physical(pr, true), shape, opts, warm);
}

std::pair<Field, double> normalize_constraint_family(const Field& w, const Nonlinearity& nl,
                                                     double s) {
  const double B = constraint_value(w.values, nl, two_star_of(w.grid, s), cell_volume(w.grid));
  if (!(B > 0)) throw NotAdmissible("int F(w) <= 0");
  const double delta = std::pow(B, -1.0 / w.grid.dim);
  return {dilate_rescale_grid(w, delta), delta};
}

std::pair<Field, double> normalize_constraint(const Field& w, const ProblemParams& pr) {
  return normalize_constraint_family(w, Nonlinearity::physical(pr, true), pr.s);
}

Field ground_state(const MinimizerResult& result, const ProblemParams& pr) {
  if (!result.converged) throw Error("ground_state requires a converged minimizer");
  const double delta = std::pow(result.s_eps, 1.0 / (2.0 * pr.s));
  return dilate_rescale_grid(result.w, delta);
}

double pde_residual_family(const Field& u, const Nonlinearity& nl, double s, double theta) {
  const std::int64_t n = u.values.size();
  if (u.values.abs().maxCoeff() == 0.0) return 0.0;
  Transform tr(u.grid);
  const Field lap = frac_laplacian_apply(u, s, tr);
  Eigen::ArrayXd resid(n), pterm(n);
  for (std::int64_t i = 0; i < n; ++i) {
    const double ui = u.values[i];
    pterm[i] = ui > 0 ? nl.pow_pm1(ui) : 0.0;
    resid[i] = lap.values[i] - theta * nl.f(ui);
  }
  const double hd = cell_volume(u.grid);
  const double rnorm = std::sqrt(hd * resid.square().sum());
  const double pnorm = theta * std::sqrt(hd * pterm.square().sum());
  const double unorm = std::sqrt(hd * u.values.square().sum());
  return rnorm / std::max(pnorm, unorm);
}

double pde_residual(const Field& u, const ProblemParams& pr) {
  if (u.values.minCoeff() < 0) throw DomainError("pde_residual expects u >= 0");
  return pde_residual_family(u, Nonlinearity::physical(pr, false), pr.s, 1.0);
}

}  // namespace frsf
