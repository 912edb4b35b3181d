#pragma once

#include "frsf/field.hpp"
#include "frsf/problem.hpp"
#include "frsf/spectral.hpp"

namespace frsf {

enum class BubbleFamily { U, W };

/// Constant of the explicit Emden-Fowler ground state:
/// c_{N,s} = 2^{(N-2s)/2} (Gamma((N+2s)/2) / Gamma((N-2s)/2))^{(N-2s)/(4s)}.
double bubble_constant(int dim, double s);

/// U_lambda(x) = lambda^{-(N-2s)/2} c_{N,s} (1 + |x/lambda|^2)^{-(N-2s)/2};
/// W_lambda(x) = U_lambda(S_*^{1/2s} x) needs the numeric S_*.
Field sample_bubble(const Grid& grid, const ProblemParams& pr, double lambda,
                    BubbleFamily family = BubbleFamily::U, double s_star_value = 0.0);

/// Dilation-invariant Sobolev quotient |w|_{Hs}^2 / (int |w|^{2*})^{(N-2s)/N}.
double sobolev_quotient(const Field& w, const ProblemParams& pr);
double sobolev_quotient(const Field& w, const ProblemParams& pr, const Transform& tr);

struct SStarResult {
  double value = 0.0;
  double self_consistency_residual = 0.0;  // | |U|_{Hs}^2 - |U|_{2*}^{2*} | / |U|_{Hs}^2
};

/// Best Sobolev constant from the sampled bubble on this grid.
SStarResult compute_S_star(const ProblemParams& pr, const Grid& grid);
SStarResult compute_S_star(const ProblemParams& pr, const Grid& grid, const Transform& tr);

/// Q_* = int_{B_1} |W_1|^{2*}, cell-center membership |x| < 1.
double q_star(const Grid& grid, const ProblemParams& pr, double s_star_value);

}  // namespace frsf
