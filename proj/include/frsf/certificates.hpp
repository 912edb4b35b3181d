#pragma once

#include <map>
#include <string>
#include <vector>

#include "frsf/field.hpp"
#include "frsf/minimizer.hpp"
#include "frsf/problem.hpp"
#include "frsf/spectral.hpp"

namespace frsf {

struct DecayFit {
  double exponent = 0.0;
  double amplitude = 0.0;  // fitted prefactor
  double r_squared = 0.0;
  double window_min = 0.0;
  double window_max = 0.0;
  int bins_used = 0;
};

struct SymmetryStats {
  double asymmetry = 0.0;               // max in-bin spread (absolute)
  double monotonicity_violation = 0.0;  // max positive increase between bins (absolute)
  double center = 0.0;
};

struct CertificateReport {
  double pohozaev_res = 0.0;
  double nehari_res = 0.0;
  double multiplier_res = 0.0;
  double energy_level_res = 0.0;
  double pde_res = 0.0;
  double apriori_max = 0.0;
  double asymmetry = 0.0;
  double monotonicity_violation = 0.0;
  double center = 0.0;
  DecayFit decay;
  bool decay_valid = false;
  std::map<std::string, double> regime_identities;
};

/// | |u|_{Hs}^2 - theta 2* int F_eps(u) | / |u|_{Hs}^2. Zero field -> 0.
double pohozaev_residual(const Field& u, const ProblemParams& pr, double theta);
double pohozaev_residual(const Field& u, const ProblemParams& pr, double theta,
                         const Transform& tr);

/// | |w|_{Hs}^2 - theta int f_eps(w) w | / |w|_{Hs}^2. Zero field -> 0.
double nehari_residual(const Field& w, const ProblemParams& pr, double theta);
double nehari_residual(const Field& w, const ProblemParams& pr, double theta, const Transform& tr);

/// Lemma 5.2 identities of the constraint-normalized critical minimizer:
/// |w|_q^q = k eps |w|_2^2 and |w|_p^p = 1 + (k+1) eps |w|_2^2.
std::map<std::string, double> critical_identities(const Field& w, const ProblemParams& pr);

/// Distances of |w|_p^p, |w|_q^q to the (6.10) limit constants plus eps |w|_2^2.
std::map<std::string, double> supercritical_limit_residuals(const Field& w,
                                                            const ProblemParams& pr);

/// Residual of the affine relation (7.7) on the rescaled minimizer w', plus
/// distances of |w'|_2^2 and |w'|_p^p to their limits.
std::map<std::string, double> subcritical_limit_residuals(const Field& w_prime,
                                                          const ProblemParams& pr);

SymmetryStats symmetry_monotonicity(const Field& u);

/// Least-squares power-law fit of log(value) against log(radius) over the
/// window; bins below 10x the round-off noise floor are dropped.
DecayFit fit_decay(const RadialProfile& profile, double window_min, double window_max);

/// Lemma 2.5(i): max over the given radii of the relative excess of u(r)
/// above |B_1|^{-1/t} r^{-N/t} |u|_t; <= 0 when the bound holds.
double radial_bound_excess(const Field& u, double t, const std::vector<double>& radii);

/// Full report on a solve: identities on the normalized minimizer, energy
/// level and qualitative properties on the ground state. w_prime, when
/// given, fills the subcritical regime identities.
CertificateReport make_report(const MinimizerResult& result, const Field& u,
                              const ProblemParams& pr, const Field* w_prime = nullptr);

/// Solution-level report for a standalone field (certify command): Pohozaev
/// and Nehari at the given multiplier, PDE residual, symmetry, decay.
CertificateReport make_solution_report(const Field& u, const ProblemParams& pr, double theta);

/// Flat name=value serialization, one entry per line, 17 significant digits.
std::string serialize_report(const CertificateReport& rep);

}  // namespace frsf
