#pragma once

#include <Eigen/Core>
#include <complex>
#include <map>
#include <memory>
#include <vector>

#include "frsf/field.hpp"

namespace frsf {

/// Real-to-complex FFT workspace for one grid geometry (FFTW backend,
/// half-spectrum layout along the last axis). Forward is the unnormalized
/// DFT; inverse divides by m^dim. A Transform instance is not safe for
/// concurrent use; create one per thread. Plan creation is serialized
/// internally, so instances may be built concurrently.
class Transform {
 public:
  explicit Transform(const Grid& g, int threads = 1);
  ~Transform();
  Transform(const Transform&) = delete;
  Transform& operator=(const Transform&) = delete;

  const Grid& grid() const { return grid_; }
  std::int64_t spec_size() const { return spec_size_; }
  int threads() const { return threads_; }

  void forward(const Eigen::ArrayXd& in, Eigen::ArrayXcd& out) const;
  void inverse(const Eigen::ArrayXcd& in, Eigen::ArrayXd& out) const;

  Eigen::ArrayXcd forward(const Eigen::ArrayXd& in) const;
  Eigen::ArrayXd inverse(const Eigen::ArrayXcd& in) const;

  /// Hermitian multiplicity of each half-spectrum bin (1 or 2).
  const Eigen::ArrayXd& sym_weight() const { return sym_weight_; }
  /// |xi|^2 of each half-spectrum bin, xi = (pi/L) * integer mode.
  const Eigen::ArrayXd& xi_sq() const { return xi_sq_; }
  /// |xi|^{2s}, cached per s.
  const Eigen::ArrayXd& symbol(double s) const;

  /// Parseval form: (h^dim / m^dim) * sum w_k mult_k |spec_k|^2.
  double weighted_spectral_sum(const Eigen::ArrayXcd& spec, const Eigen::ArrayXd& mult) const;

 private:
  Grid grid_;
  int threads_ = 1;
  std::int64_t spec_size_ = 0;
  Eigen::ArrayXd sym_weight_;
  Eigen::ArrayXd xi_sq_;
  mutable std::map<double, Eigen::ArrayXd> symbol_cache_;
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// (-Delta)^s f via the Fourier multiplier |xi|^{2s}; the zero mode is
/// annihilated and the output is real by conjugate symmetry.
Field frac_laplacian_apply(const Field& f, double s);
Field frac_laplacian_apply(const Field& f, double s, const Transform& tr);

struct NormSet {
  double hs_seminorm_sq = 0.0;
  double l2_sq = 0.0;
  std::map<double, double> lt_pow;  // t -> integral of |f|^t
};

double l2_sq(const Field& f);
double lt_pow(const Field& f, double t);
double hs_seminorm_sq(const Field& f, double s);
double hs_seminorm_sq(const Field& f, double s, const Transform& tr);
NormSet norms(const Field& f, double s, const std::vector<double>& t_list);
NormSet norms(const Field& f, double s, const std::vector<double>& t_list, const Transform& tr);

enum class NormKind { HsSeminormSq, LtPow, IntegralF };

/// Analytic factor picked up by w(x / delta): delta^{N-2s} for the Hs
/// seminorm squared, delta^N for integral quantities.
double dilation_scaling(NormKind kind, double delta, int dim, double s, double t = 2.0);

/// Exact dilation g(x) = f(x / delta) realized by rescaling the box:
/// same samples on the grid with half_length L * delta. Norm scalings
/// hold to round-off; no interpolation is involved.
Field dilate_rescale_grid(const Field& f, double delta);

struct ResampleOptions {
  double support_rel_threshold = 1e-2;  // tail level defining effective support
  double overflow_factor = 2.0;         // hard error when delta * r_eff > factor * L
  bool warn = true;
};

/// g(x) ~ f(x / delta) on the same grid via trigonometric interpolation
/// (chirp-z evaluation of the Fourier series at the scaled sample points).
Field resample_dilate(const Field& f, double delta, const ResampleOptions& opts = {});

/// Largest sample radius where |f| >= rel_threshold * max|f|.
double effective_support_radius(const Field& f, double rel_threshold);

struct RadialProfile {
  Eigen::ArrayXd radii;   // representative radius per bin (geometric mean)
  Eigen::ArrayXd values;  // bin means
  Eigen::ArrayXd counts;
  double asymmetry = 0.0;  // max over bins of in-bin spread
};

/// Bins samples by |x| with bin width h (half-open [r, r+h)). The
/// asymmetry is taken over groups of identical sample radius, where a
/// radial field is constant to the bit.
RadialProfile radialize(const Field& f);

/// Linear interpolation of a profile; clamps outside the covered range.
double profile_interp(const RadialProfile& pr, double r);

/// O(M^2) double-sum quadrature of the Gagliardo form
/// sum |f(x)-f(y)|^2 / |x-y|^{1+2s} h^2 with nearest-image distance.
/// Used only to measure its ratio against the Fourier seminorm.
double gagliardo_seminorm_1d(const Field& f, double s);

}  // namespace frsf
