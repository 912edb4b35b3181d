#pragma once

#include <map>
#include <string>
#include <variant>
#include <vector>

#include "frsf/field.hpp"
#include "frsf/problem.hpp"
#include "frsf/spectral.hpp"

namespace frsf {

struct StepRule {
  double initial_step = 1.0;
  double shrink = 0.5;
  double sufficient_decrease = 1e-4;
};

struct MinimizeOptions {
  int max_iterations = 20000;
  StepRule step_rule;
  bool preconditioner = true;           // divide gradient modes by (1 + |xi|^{2s})
  bool positivity_projection = true;    // iterate -> max(iterate, 0) each step
  bool radial_symmetrization = false;   // iterate -> its radialization every radial_every steps
  int radial_every = 10;
  double rel_tol = 1e-9;                // quotient decrease over stall_window iterations
  int stall_window = 10;
  double stationarity_tol = 1e-3;       // Nehari residual gate at theta = S_eps
  unsigned seed = 0;
  int fft_threads = 1;
};

struct MinimizerResult {
  Field w;                  // constraint-normalized minimizer, 2* int F = 1
  double s_eps = 0.0;       // level S_eps = |w|_{Hs}^2
  int iterations = 0;
  std::vector<double> quotient_history;  // accepted values, nonincreasing
  bool converged = false;
  std::map<std::string, double> diagnostics;
  double normalize_delta = 1.0;  // dilation applied by the final normalization
};

struct BubbleInit {
  double lambda = 1.0;
};
struct GaussianInit {
  double width = 0.0;  // 0 -> L/12
  double amplitude = 1.0;
};
struct FieldInit {
  Field field;
};
using InitSpec = std::variant<BubbleInit, GaussianInit, FieldInit>;

/// Scaling-invariant quotient S_eps(w) = |w|_{Hs}^2 / (2* int F_eps(w))^{(N-2s)/N},
/// with F in truncated form (the solver convention). NotAdmissible when
/// int F <= 0.
double quotient(const Field& w, const ProblemParams& pr);
double quotient(const Field& w, const ProblemParams& pr, const Transform& tr);
double quotient_family(const Field& w, const Nonlinearity& nl, double s, const Transform& tr);

/// L^2 gradient of the quotient: 2 B^{-gamma} [ (-Delta)^s w - (A/B) f(w) ].
Field quotient_gradient(const Field& w, const ProblemParams& pr);
Field quotient_gradient(const Field& w, const ProblemParams& pr, const Transform& tr);
Field quotient_gradient_family(const Field& w, const Nonlinearity& nl, double s,
                               const Transform& tr);

/// Descent on the quotient for an arbitrary nonlinearity family.
/// init_shape is made admissible by the power-of-two amplitude scan; warm
/// starts pass keep_init_amplitude to skip the scan when already admissible.
MinimizerResult minimize_family(const Grid& grid, double s, const Nonlinearity& nl,
                                const Field& init_shape, const MinimizeOptions& opts,
                                bool keep_init_amplitude = false);

/// The physical problem (4.1)/(4.4): requires eps < eps_*(p, q).
MinimizerResult minimize(const ProblemParams& pr, const Grid& grid, const InitSpec& init,
                         const MinimizeOptions& opts);

/// Builds the named initial shape on the grid.
Field build_init_shape(const ProblemParams& pr, const Grid& grid, const InitSpec& init);

/// Exact dilation w(x/delta), delta = (2* int F_eps(w))^{-1/N} adjusted so the
/// quadrature constraint is 1 to round-off; realized by rescaling the box.
std::pair<Field, double> normalize_constraint(const Field& w, const ProblemParams& pr);
std::pair<Field, double> normalize_constraint_family(const Field& w, const Nonlinearity& nl,
                                                     double s);

/// u_eps(x) = w_eps(x / S_eps^{1/2s}), the ground state of (P_eps).
Field ground_state(const MinimizerResult& result, const ProblemParams& pr);

/// |(-Delta)^s u + eps u - u^{p-1} + u^{q-1}|_2 / max(|u^{p-1}|_2, |u|_2).
double pde_residual(const Field& u, const ProblemParams& pr);

/// |(-Delta)^s u - theta f(u)|_2 / max(theta |u^{p-1}|_2, |u|_2) for a family.
double pde_residual_family(const Field& u, const Nonlinearity& nl, double s, double theta);

}  // namespace frsf
