#include "frsf/problem.hpp"

#include <cmath>

namespace frsf {

namespace {
constexpr double kCriticalTol = 1e-12;
}

const char* regime_name(Regime r) {
  switch (r) {
    case Regime::Subcritical: return "subcritical";
    case Regime::Critical: return "critical";
    case Regime::Supercritical: return "supercritical";
  }
  return "?";
}

PowFn PowFn::make(double e) {
  PowFn f;
  f.e = e;
  double r = std::round(e);
  if (r >= 0 && std::abs(e - r) < 1e-12) {
    f.kind = 0;
    f.n = static_cast<int>(r);
    return f;
  }
  double r2 = std::round(2.0 * e);
  if (r2 >= 1 && std::abs(2.0 * e - r2) < 1e-12) {
    f.kind = 1;
    f.n = static_cast<int>((r2 - 1) / 2);  // e = n + 1/2
    return f;
  }
  f.kind = 2;
  return f;
}

void ProblemParams::validate() const {
  if (dim < 1 || dim > 3) throw InvalidParams("N must be 1, 2 or 3");
  if (!(s > 0.0 && s < 1.0)) throw InvalidParams("s must lie in (0,1)");
  if (!(dim > 2.0 * s)) throw InvalidParams("standing assumption N > 2s violated");
  if (!(p > 2.0)) throw InvalidParams("exponents must satisfy q > p > 2");
  if (!(q > p)) throw InvalidParams("exponents must satisfy q > p > 2");
  if (!(eps >= 0.0) || !std::isfinite(eps)) throw InvalidParams("eps must be finite and >= 0");
}

Regime ProblemParams::regime() const {
  const double ts = two_star();
  if (std::abs(p - ts) <= kCriticalTol) return Regime::Critical;
  return p < ts ? Regime::Subcritical : Regime::Supercritical;
}

double ProblemParams::eps_star() const { return frsf::eps_star(p, q); }

Regime classify_regime(const ProblemParams& params) {
  params.validate();
  return params.regime();
}

double eps_star_zeta(double p, double q) {
  if (!(q > p && p > 2.0)) throw InvalidParams("eps_star requires q > p > 2");
  return std::pow(q * (p - 2.0) / (p * (q - 2.0)), 1.0 / (q - p));
}

double eps_star(double p, double q) {
  const double z = eps_star_zeta(p, q);
  return std::pow(z, p - 2.0) - std::pow(z, q - 2.0);
}

Nonlinearity Nonlinearity::make(double p, double q, double a, double b, bool truncated) {
  Nonlinearity nl;
  nl.p = p;
  nl.q = q;
  nl.a = a;
  nl.b = b;
  nl.truncated = truncated;
  nl.pow_pm1 = PowFn::make(p - 1.0);
  nl.pow_qm1 = PowFn::make(q - 1.0);
  nl.pow_p = PowFn::make(p);
  nl.pow_q = PowFn::make(q);
  nl.f_at_one = 1.0 - a - b;
  nl.cap_F = 1.0 / p - a / 2.0 - b / q;
  return nl;
}

Nonlinearity Nonlinearity::physical(const ProblemParams& pr, bool truncated) {
  return make(pr.p, pr.q, pr.eps, 1.0, truncated);
}

Nonlinearity Nonlinearity::limit_supercritical(const ProblemParams& pr) {
  return make(pr.p, pr.q, 0.0, 1.0, true);
}

Nonlinearity Nonlinearity::rescaled_subcritical(const ProblemParams& pr) {
  const double alpha = pr.alpha_subcritical();
  return make(pr.p, pr.q, 1.0, std::pow(pr.eps, alpha), false);
}

double Nonlinearity::f_untruncated_checked(double u) const {
  if (u == 0.0) return 0.0;
  if (!pow_pm1.integer() || !pow_qm1.integer())
    throw DomainError("negative argument with non-integer exponent");
  return pow_pm1(u) - a * u - b * pow_qm1(u);
}

double Nonlinearity::F_untruncated_checked(double u) const {
  if (u == 0.0) return 0.0;
  if (!pow_p.integer() || !pow_q.integer())
    throw DomainError("negative argument with non-integer exponent");
  return pow_p(u) / p - a * u * u / 2.0 - b * pow_q(u) / q;
}

std::pair<double, double> nonlinearity(double u, const ProblemParams& pr, bool truncated) {
  pr.validate();
  const Nonlinearity nl = Nonlinearity::physical(pr, truncated);
  return {nl.f(u), nl.F(u)};
}

LimitConstants limit_constants(const ProblemParams& pr) {
  pr.validate();
  LimitConstants lc;
  lc.eps_star = eps_star(pr.p, pr.q);
  const double ts = pr.two_star();
  switch (pr.regime()) {
    case Regime::Supercritical:
      lc.supercritical_p_norm = (pr.q - ts) * pr.p / ((pr.q - pr.p) * ts);
      lc.supercritical_q_norm = (pr.p - ts) * pr.q / ((pr.q - pr.p) * ts);
      break;
    case Regime::Subcritical:
      lc.subcritical_two_norm = 2.0 * (ts - pr.p) / (ts * (pr.p - 2.0));
      lc.subcritical_p_norm = (ts - 2.0) * pr.p / ((pr.p - 2.0) * ts);
      break;
    case Regime::Critical:
      break;
  }
  return lc;
}

}  // namespace frsf
