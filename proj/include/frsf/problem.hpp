#pragma once

#include <cmath>
#include <utility>

#include "frsf/errors.hpp"

namespace frsf {

enum class Regime { Subcritical, Critical, Supercritical };

const char* regime_name(Regime r);

/// Evaluates u^e with cheap paths for small integer and half-integer
/// exponents, which cover all the stock parameter sets.
struct PowFn {
  double e = 1.0;
  int kind = 2;  // 0: integer, 1: half-integer, 2: general
  int n = 1;     // integer part for kinds 0/1

  static PowFn make(double e);
  double operator()(double u) const {
    if (kind == 0) {
      double r = 1.0, b = u;
      int k = n;
      while (k > 0) {
        if (k & 1) r *= b;
        b *= b;
        k >>= 1;
      }
      return r;
    }
    if (kind == 1) {
      double r = std::sqrt(u);
      double b = u;
      int k = n;
      double acc = r;
      while (k > 0) {
        if (k & 1) acc *= b;
        b *= b;
        k >>= 1;
      }
      return acc;
    }
    return std::pow(u, e);
  }
  bool integer() const { return kind == 0; }
};

/// Problem data for (-Delta)^s u + eps u = u^{p-1} - u^{q-1} on R^N,
/// N > 2s, q > p > 2, eps >= 0.
struct ProblemParams {
  int dim = 1;        // N
  double s = 0.5;     // order of the fractional Laplacian
  double p = 3.0;
  double q = 6.0;
  double eps = 0.0;

  double two_star() const { return 2.0 * dim / (dim - 2.0 * s); }
  Regime regime() const;

  /// Lemma 5.2 constant, meaningful when p = 2*.
  double k_critical() const { return q * (p - 2.0) / (2.0 * (q - p)); }

  /// Exponent alpha of the eps^alpha q-term in the rescaled subcritical
  /// equation, meaningful when p < 2*. See problem.cpp for the derivation.
  double alpha_subcritical() const { return (q - 2.0) / (p - 2.0) - 1.0; }

  double eps_star() const;
  void validate() const;
};

inline ProblemParams make_params(int dim, double s, double p, double q, double eps) {
  ProblemParams pr{dim, s, p, q, eps};
  pr.validate();
  return pr;
}

Regime classify_regime(const ProblemParams& params);

/// Closed-form non-existence threshold: the unique eps at which
/// max_{z>0} F_eps(z) = 0, from the double-root system F_eps(z) = 0,
/// f_eps(z) = 0.
double eps_star(double p, double q);

/// zeta_* of the double root, exposed for tests.
double eps_star_zeta(double p, double q);

/// f(u) = u^{p-1} - a u - b u^{q-1} and its primitive
/// F(u) = u^p/p - a u^2/2 - b u^q/q, evaluated on u >= 0.
/// truncated = the Berestycki-Lions truncation: 0 below 0, exact on [0,1],
/// f == f(1) constant (F affine) above 1. The physical family is
/// a = eps, b = 1; the rescaled subcritical family is a = 1, b = eps^alpha.
struct Nonlinearity {
  double p = 3.0, q = 6.0;
  double a = 0.0;  // linear coefficient
  double b = 1.0;  // q-term coefficient
  bool truncated = true;

  PowFn pow_pm1, pow_qm1, pow_p, pow_q;
  double f_at_one = 0.0, cap_F = 0.0;

  static Nonlinearity make(double p, double q, double a, double b, bool truncated);
  static Nonlinearity physical(const ProblemParams& pr, bool truncated = true);
  /// Truncated family at eps = 0, matching F_0 of the supercritical limit.
  static Nonlinearity limit_supercritical(const ProblemParams& pr);
  /// G_eps family of the rescaled subcritical problem (untruncated).
  static Nonlinearity rescaled_subcritical(const ProblemParams& pr);

  double f(double u) const {
    if (u <= 0.0) return truncated ? 0.0 : f_untruncated_checked(u);
    if (truncated && u > 1.0) return f_at_one;
    return pow_pm1(u) - a * u - b * pow_qm1(u);
  }
  double F(double u) const {
    if (u <= 0.0) return truncated ? 0.0 : F_untruncated_checked(u);
    if (truncated && u > 1.0) return cap_F + f_at_one * (u - 1.0);
    return pow_p(u) / p - a * u * u / 2.0 - b * pow_q(u) / q;
  }
  /// derivative of f on the interior branch; 0 on the truncated tails
  double df(double u) const {
    if (u <= 0.0) return 0.0;
    if (truncated && u > 1.0) return 0.0;
    return (p - 1.0) * std::pow(u, p - 2.0) - a - b * (q - 1.0) * std::pow(u, q - 2.0);
  }

 private:
  double f_untruncated_checked(double u) const;
  double F_untruncated_checked(double u) const;
};

/// Spec-shaped convenience: (f_eps(u), F_eps(u)) for the physical family.
std::pair<double, double> nonlinearity(double u, const ProblemParams& pr, bool truncated);

/// Closed-form limit norms of the minimizer families.
struct LimitConstants {
  double eps_star = 0.0;
  // filled when q > p > 2*
  double supercritical_p_norm = 0.0;  // lim ||w_0||_p^p
  double supercritical_q_norm = 0.0;  // lim ||w_0||_q^q
  // filled when 2 < p < 2*
  double subcritical_two_norm = 0.0;  // lim ||w'_eps||_2^2
  double subcritical_p_norm = 0.0;    // lim ||w'_eps||_p^p
};

LimitConstants limit_constants(const ProblemParams& pr);

}  // namespace frsf
