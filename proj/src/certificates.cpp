#include "frsf/certificates.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

namespace frsf {

namespace {

double cell_volume(const Grid& g) {
  double hd = 1.0;
  for (int a = 0; a < g.dim; ++a) hd *= g.spacing();
  return hd;
}

// integral of F_eps(u+) and of f_eps(u+) u, untruncated powers
void physical_integrals(const Field& u, const ProblemParams& pr, double& intF, double& intfu) {
  const Nonlinearity nl = Nonlinearity::make(pr.p, pr.q, pr.eps, 1.0, false);
  const double hd = cell_volume(u.grid);
  double aF = 0.0, afu = 0.0;
  const std::int64_t n = u.values.size();
  for (std::int64_t i = 0; i < n; ++i) {
    const double v = std::max(u.values[i], 0.0);
    if (v > 0) {
      aF += nl.F(v);
      afu += nl.f(v) * v;
    }
  }
  intF = hd * aF;
  intfu = hd * afu;
}

double fmt_or(double x) { return std::isfinite(x) ? x : 0.0; }

}  // namespace

double pohozaev_residual(const Field& u, const ProblemParams& pr, double theta,
                         const Transform& tr) {
  if (u.values.abs().maxCoeff() == 0.0) return 0.0;
  const double A = hs_seminorm_sq(u, pr.s, tr);
  if (!(A > 0)) throw ZeroField("Pohozaev residual of a field with zero seminorm");
  double intF, intfu;
  physical_integrals(u, pr, intF, intfu);
  return std::abs(A - theta * pr.two_star() * intF) / A;
}

double pohozaev_residual(const Field& u, const ProblemParams& pr, double theta) {
  Transform tr(u.grid);
  return pohozaev_residual(u, pr, theta, tr);
}

double nehari_residual(const Field& w, const ProblemParams& pr, double theta,
                       const Transform& tr) {
  if (w.values.abs().maxCoeff() == 0.0) return 0.0;
  const double A = hs_seminorm_sq(w, pr.s, tr);
  if (!(A > 0)) throw ZeroField("Nehari residual of a field with zero seminorm");
  double intF, intfu;
  physical_integrals(w, pr, intF, intfu);
  return std::abs(A - theta * intfu) / A;
}

double nehari_residual(const Field& w, const ProblemParams& pr, double theta) {
  Transform tr(w.grid);
  return nehari_residual(w, pr, theta, tr);
}

std::map<std::string, double> critical_identities(const Field& w, const ProblemParams& pr) {
  if (pr.regime() != Regime::Critical) throw WrongRegime("critical identities need p = 2*");
  const double k = pr.k_critical();
  const double T = l2_sq(w);
  const double P = lt_pow(w, pr.p);
  const double Q = lt_pow(w, pr.q);
  constexpr double tiny = 1e-300;
  std::map<std::string, double> out;
  out["res_q"] = std::abs(Q - k * pr.eps * T) / std::max(Q, tiny);
  out["res_p"] = std::abs(P - 1.0 - (k + 1.0) * pr.eps * T) / P;
  out["k"] = k;
  out["norm2sq"] = T;
  out["normp_p"] = P;
  out["normq_q"] = Q;
  out["eps_norm2sq"] = pr.eps * T;
  return out;
}

std::map<std::string, double> supercritical_limit_residuals(const Field& w,
                                                            const ProblemParams& pr) {
  if (pr.regime() != Regime::Supercritical)
    throw WrongRegime("supercritical limit residuals need p > 2*");
  const LimitConstants lc = limit_constants(pr);
  const double T = l2_sq(w);
  const double P = lt_pow(w, pr.p);
  const double Q = lt_pow(w, pr.q);
  std::map<std::string, double> out;
  out["res_p_limit"] = std::abs(P - lc.supercritical_p_norm) / lc.supercritical_p_norm;
  out["res_q_limit"] = std::abs(Q - lc.supercritical_q_norm) / lc.supercritical_q_norm;
  out["eps_norm2sq"] = pr.eps * T;
  out["norm2sq"] = T;
  out["normp_p"] = P;
  out["normq_q"] = Q;
  return out;
}

std::map<std::string, double> subcritical_limit_residuals(const Field& w_prime,
                                                          const ProblemParams& pr) {
  if (pr.regime() != Regime::Subcritical)
    throw WrongRegime("subcritical limit residuals need p < 2*");
  const LimitConstants lc = limit_constants(pr);
  const double ts = pr.two_star();
  const double T = l2_sq(w_prime);
  const double P = lt_pow(w_prime, pr.p);
  const double rhs = pr.p * (pr.q - 2.0) / (2.0 * (pr.q - pr.p)) * T +
                     pr.p * (pr.q - ts) / (ts * (pr.q - pr.p));
  std::map<std::string, double> out;
  out["res_affine"] = std::abs(P - rhs) / P;
  out["dist_two_limit"] = std::abs(T - lc.subcritical_two_norm) / lc.subcritical_two_norm;
  out["dist_p_limit"] = std::abs(P - lc.subcritical_p_norm) / lc.subcritical_p_norm;
  out["norm2sq"] = T;
  out["normp_p"] = P;
  return out;
}

SymmetryStats symmetry_monotonicity(const Field& u) {
  const RadialProfile pr = radialize(u);
  SymmetryStats st;
  st.asymmetry = pr.asymmetry;
  st.center = pr.values.size() > 0 ? pr.values[0] : 0.0;
  double viol = 0.0;
  for (Eigen::Index i = 0; i + 1 < pr.values.size(); ++i)
    viol = std::max(viol, pr.values[i + 1] - pr.values[i]);
  st.monotonicity_violation = std::max(viol, 0.0);
  return st;
}

DecayFit fit_decay(const RadialProfile& profile, double window_min, double window_max) {
  if (!(window_min > 0) || !(window_max > window_min))
    throw InvalidParams("decay window must satisfy 0 < r_min < r_max");
  const double floor = 10.0 * 2.3e-16 * profile.values.abs().maxCoeff();
  std::vector<double> lx, ly;
  for (Eigen::Index i = 0; i < profile.radii.size(); ++i) {
    const double r = profile.radii[i], v = profile.values[i];
    if (r < window_min || r > window_max) continue;
    if (!(v > floor)) continue;
    lx.push_back(std::log(r));
    ly.push_back(std::log(v));
  }
  const int n = static_cast<int>(lx.size());
  if (n < 8) throw InsufficientTail("fewer than 8 usable bins in the decay window");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  const double det = n * sxx - sx * sx;
  const double slope = (n * sxy - sx * sy) / det;
  const double icpt = (sy - slope * sx) / n;
  double ss_res = 0, ss_tot = 0;
  const double ybar = sy / n;
  for (int i = 0; i < n; ++i) {
    const double e = ly[i] - (icpt + slope * lx[i]);
    ss_res += e * e;
    ss_tot += (ly[i] - ybar) * (ly[i] - ybar);
  }
  DecayFit fit;
  fit.exponent = -slope;
  fit.amplitude = std::exp(icpt);
  fit.r_squared = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  fit.window_min = window_min;
  fit.window_max = window_max;
  fit.bins_used = n;
  return fit;
}

double radial_bound_excess(const Field& u, double t, const std::vector<double>& radii) {
  const int N = u.grid.dim;
  const double ball = std::pow(std::numbers::pi, N / 2.0) / std::tgamma(N / 2.0 + 1.0);
  const double cnt = std::pow(ball, -1.0 / t);
  const double norm_t = std::pow(lt_pow(u, t), 1.0 / t);
  const RadialProfile prof = radialize(u);
  double worst = -std::numeric_limits<double>::infinity();
  for (double r : radii) {
    if (!(r > 0)) continue;
    const double bound = cnt * std::pow(r, -double(N) / t) * norm_t;
    const double val = profile_interp(prof, r);
    worst = std::max(worst, (val - bound) / bound);
  }
  return worst;
}

CertificateReport make_report(const MinimizerResult& result, const Field& u,
                              const ProblemParams& pr, const Field* w_prime) {
  CertificateReport rep;
  const double S = result.s_eps;
  {
    Transform tr(result.w.grid);
    rep.pohozaev_res = pohozaev_residual(result.w, pr, S, tr);
    rep.nehari_res = nehari_residual(result.w, pr, S, tr);
    const double A = hs_seminorm_sq(result.w, pr.s, tr);
    double intF, intfu;
    physical_integrals(result.w, pr, intF, intfu);
    const double theta_hat = intfu != 0.0 ? A / intfu : 0.0;
    rep.multiplier_res = std::abs(theta_hat - S) / S;
  }
  {
    Transform tr(u.grid);
    const double A = hs_seminorm_sq(u, pr.s, tr);
    double intF, intfu;
    physical_integrals(u, pr, intF, intfu);
    const double energy = 0.5 * A - intF;
    const double target = pr.s / pr.dim * std::pow(S, pr.dim / (2.0 * pr.s));
    rep.energy_level_res = std::abs(energy - target) / std::abs(target);
    rep.pde_res = pde_residual_family(u, Nonlinearity::make(pr.p, pr.q, pr.eps, 1.0, false),
                                      pr.s, 1.0);
  }
  rep.apriori_max = u.values.maxCoeff();
  const SymmetryStats st = symmetry_monotonicity(u);
  rep.asymmetry = st.asymmetry;
  rep.monotonicity_violation = st.monotonicity_violation;
  rep.center = st.center;
  try {
    const double L = u.grid.half_length;
    rep.decay = fit_decay(radialize(u), L / 8.0, L / 4.0);
    rep.decay_valid = true;
  } catch (const InsufficientTail&) {
    rep.decay_valid = false;
  }
  switch (pr.regime()) {
    case Regime::Critical: rep.regime_identities = critical_identities(result.w, pr); break;
    case Regime::Supercritical:
      rep.regime_identities = supercritical_limit_residuals(result.w, pr);
      break;
    case Regime::Subcritical:
      if (w_prime) rep.regime_identities = subcritical_limit_residuals(*w_prime, pr);
      break;
  }
  return rep;
}

CertificateReport make_solution_report(const Field& u, const ProblemParams& pr, double theta) {
  CertificateReport rep;
  Transform tr(u.grid);
  rep.pohozaev_res = pohozaev_residual(u, pr, theta, tr);
  rep.nehari_res = nehari_residual(u, pr, theta, tr);
  Field up(u.grid, u.values.max(0.0));
  rep.pde_res = pde_residual_family(up, Nonlinearity::make(pr.p, pr.q, pr.eps, 1.0, false), pr.s,
                                    theta);
  rep.apriori_max = u.values.maxCoeff();
  const SymmetryStats st = symmetry_monotonicity(u);
  rep.asymmetry = st.asymmetry;
  rep.monotonicity_violation = st.monotonicity_violation;
  rep.center = st.center;
  try {
    const double L = u.grid.half_length;
    rep.decay = fit_decay(radialize(u), L / 8.0, L / 4.0);
    rep.decay_valid = true;
  } catch (const InsufficientTail&) {
    rep.decay_valid = false;
  }
  return rep;
}

std::string serialize_report(const CertificateReport& rep) {
  std::ostringstream out;
  char buf[64];
  auto put = [&](const char* name, double v) {
    std::snprintf(buf, sizeof buf, "%.17g", fmt_or(v));
    out << name << "=" << buf << "\n";
  };
  put("pohozaev_res", rep.pohozaev_res);
  put("nehari_res", rep.nehari_res);
  put("multiplier_res", rep.multiplier_res);
  put("energy_level_res", rep.energy_level_res);
  put("pde_res", rep.pde_res);
  put("apriori_max", rep.apriori_max);
  put("asymmetry", rep.asymmetry);
  put("monotonicity_violation", rep.monotonicity_violation);
  put("center", rep.center);
  if (rep.decay_valid) {
    put("decay_exponent", rep.decay.exponent);
    put("decay_amplitude", rep.decay.amplitude);
    put("decay_r_squared", rep.decay.r_squared);
    put("decay_window_min", rep.decay.window_min);
    put("decay_window_max", rep.decay.window_max);
  }
  for (const auto& [name, value] : rep.regime_identities) put(name.c_str(), value);
  return out.str();
}

}  // namespace frsf
