#pragma once

#include <optional>
#include <string>
#include <vector>

#include "frsf/bubble.hpp"
#include "frsf/certificates.hpp"
#include "frsf/minimizer.hpp"
#include "frsf/problem.hpp"

namespace frsf {

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;  // in log space
  double r_squared = 0.0;
};

/// Ordinary least squares on (log x, log y); needs >= 4 positive points
/// spanning at least half a decade in x.
FitResult fit_power_law(const std::vector<std::pair<double, double>>& points);

struct SweepRecord {
  double eps = 0.0;
  double s_eps = 0.0;
  double u_center = 0.0;
  double lambda_eps = 0.0;  // critical regime only; 0 when absent
  double sigma_eps = 0.0;   // critical: S_eps - S_*
  std::map<std::string, double> norms;
  CertificateReport certificate;
  double wall_time = 0.0;
  int iterations = 0;
  bool converged = false;
  std::string error;  // nonempty if this record failed
  bool ok() const { return error.empty(); }
};

struct ScalingStudy {
  Regime regime = Regime::Subcritical;
  std::vector<SweepRecord> records;  // eps descending
  std::map<std::string, FitResult> fits;
  bool fits_skipped = false;  // fewer than 4 successful records
  // regime context
  double s_star = 0.0;   // critical
  double q_star = 0.0;   // critical
  double s_limit = 0.0;  // supercritical S_0 / subcritical S'_0
  double limit_center = 0.0;  // u_0(0) or v_0(0)
};

/// v(x) = lambda^{(N-2s)/2} u(lambda x), realized exactly by rescaling the
/// box to L / lambda; the Hs seminorm is preserved to round-off.
Field rescale_critical(const Field& u, double lambda, const ProblemParams& pr);

/// v(x) = eps^{-1/(p-2)} u(eps^{-1/(2s)} x), exact box rescaling.
Field rescale_subcritical(const Field& u, const ProblemParams& pr);

/// Smallest lambda with Q(lambda) = int_{B_lambda} |w|^p = q_star_value,
/// by bisection on the piecewise-linear radial mass function.
double concentration_lambda(const Field& w, const ProblemParams& pr, double q_star_value);

/// Minimizer of the Lemma 5.1 test-function bound, used to seed critical
/// solves: lambda_eps = (2 s b2 eps / (bq (q(N-2s)/2 - N)))^{-2/((q-2)(N-2s))}.
double critical_lambda_estimate(const ProblemParams& pr, double eps, double w1_norm2_sq,
                                double w1_normq_q);

struct LimitSolution {
  Field field;       // u_0 (supercritical), v_0 (subcritical), or U_1 (critical)
  double level = 0;  // S_0 / S'_0 / S_*
  std::optional<MinimizerResult> minimizer;  // absent for the critical closed form
};

LimitSolution solve_limit_problem(Regime regime, const ProblemParams& pr, const Grid& grid,
                                  const MinimizeOptions& opts);

struct SweepOptions {
  Grid grid;
  MinimizeOptions minimize;
  bool warm_start = true;
  Grid limit_grid;         // grid for the limit solve; defaults to grid
  bool has_limit_grid = false;
  bool compute_limit = true;  // sub/supercritical limit solve for the gap tests
};

/// One full record per eps: minimize + certify + regime rescale, with the
/// regime-specific fits filled. Per-record failures are recorded and the
/// sweep continues.
ScalingStudy sweep(const ProblemParams& base, const std::vector<double>& eps_list,
                   const SweepOptions& opts);

/// max_x |a(x) - b_interp(|x|)| over a's grid, b radialized and interpolated.
double max_profile_distance(const Field& a, const Field& b);

/// L^t distance via b's radial profile interpolated onto a's grid.
double lt_profile_distance(const Field& a, const Field& b, double t);

/// max_x |v(x) - U_1(x)| over v's grid points, U_1 evaluated in closed form.
double max_distance_to_bubble(const Field& v, const ProblemParams& pr);

}  // namespace frsf
