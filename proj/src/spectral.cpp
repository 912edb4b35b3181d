#include "frsf/spectral.hpp"

#include "frsf/problem.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstring>
#include <iostream>
#include <mutex>
#include <numbers>
#include <vector>

namespace frsf {

namespace {

std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

void init_threads_once() {
#ifdef FRSF_FFTW_THREADS
  static std::once_flag flag;
  std::call_once(flag, [] { fftw_init_threads(); });
#endif
}

}  // namespace

struct Transform::Impl {
  fftw_plan fwd = nullptr;
  fftw_plan inv = nullptr;
  double* real_buf = nullptr;
  fftw_complex* cplx_buf = nullptr;
  std::int64_t n = 0;

  ~Impl() {
    std::lock_guard<std::mutex> lock(plan_mutex());
    if (fwd) fftw_destroy_plan(fwd);
    if (inv) fftw_destroy_plan(inv);
    if (real_buf) fftw_free(real_buf);
    if (cplx_buf) fftw_free(cplx_buf);
  }
};

Transform::Transform(const Grid& g, int threads)
    : grid_(g), threads_(std::max(1, threads)), impl_(std::make_unique<Impl>()) {
  const int d = g.dim;
  const int m = g.m;
  const std::int64_t n = g.points();
  spec_size_ = n / m * (m / 2 + 1);
  impl_->n = n;

  {
    std::lock_guard<std::mutex> lock(plan_mutex());
    init_threads_once();
#ifdef FRSF_FFTW_THREADS
    fftw_plan_with_nthreads(threads_);
#endif
    impl_->real_buf = fftw_alloc_real(n);
    impl_->cplx_buf = fftw_alloc_complex(spec_size_);
    int dims[3] = {m, m, m};
    impl_->fwd = fftw_plan_dft_r2c(d, dims, impl_->real_buf, impl_->cplx_buf, FFTW_ESTIMATE);
    impl_->inv = fftw_plan_dft_c2r(d, dims, impl_->cplx_buf, impl_->real_buf, FFTW_ESTIMATE);
  }

  // mode geometry of the half spectrum (last axis 0..m/2)
  sym_weight_.resize(spec_size_);
  xi_sq_.resize(spec_size_);
  const double base = std::numbers::pi / g.half_length;
  const int last = m / 2 + 1;
  for (std::int64_t i = 0; i < spec_size_; ++i) {
    std::int64_t rest = i;
    const int kz = static_cast<int>(rest % last);
    rest /= last;
    double k2 = 0;
    int mode = kz;  // last axis already in [0, m/2]
    k2 += static_cast<double>(mode) * mode;
    for (int a = d - 2; a >= 0; --a) {
      const int idx = static_cast<int>(rest % m);
      rest /= m;
      mode = g.signed_mode(idx);
      k2 += static_cast<double>(mode) * mode;
    }
    xi_sq_[i] = base * base * k2;
    sym_weight_[i] = (kz == 0 || kz == m / 2) ? 1.0 : 2.0;
  }
}

Transform::~Transform() = default;

void Transform::forward(const Eigen::ArrayXd& in, Eigen::ArrayXcd& out) const {
  if (in.size() != impl_->n) throw DimensionError("transform: field size mismatch");
  out.resize(spec_size_);
  std::memcpy(impl_->real_buf, in.data(), sizeof(double) * impl_->n);
  fftw_execute(impl_->fwd);
  std::memcpy(reinterpret_cast<double*>(out.data()), impl_->cplx_buf,
              sizeof(fftw_complex) * spec_size_);
}

void Transform::inverse(const Eigen::ArrayXcd& in, Eigen::ArrayXd& out) const {
  if (in.size() != spec_size_) throw DimensionError("transform: spectrum size mismatch");
  out.resize(impl_->n);
  std::memcpy(impl_->cplx_buf, in.data(), sizeof(fftw_complex) * spec_size_);
  fftw_execute(impl_->inv);
  const double scale = 1.0 / static_cast<double>(impl_->n);
  for (std::int64_t i = 0; i < impl_->n; ++i) out[i] = impl_->real_buf[i] * scale;
}

Eigen::ArrayXcd Transform::forward(const Eigen::ArrayXd& in) const {
  Eigen::ArrayXcd out;
  forward(in, out);
  return out;
}

Eigen::ArrayXd Transform::inverse(const Eigen::ArrayXcd& in) const {
  Eigen::ArrayXd out;
  inverse(in, out);
  return out;
}

const Eigen::ArrayXd& Transform::symbol(double s) const {
  auto it = symbol_cache_.find(s);
  if (it != symbol_cache_.end()) return it->second;
  Eigen::ArrayXd sym(spec_size_);
  for (std::int64_t i = 0; i < spec_size_; ++i) sym[i] = std::pow(xi_sq_[i], s);
  return symbol_cache_.emplace(s, std::move(sym)).first->second;
}

double Transform::weighted_spectral_sum(const Eigen::ArrayXcd& spec,
                                        const Eigen::ArrayXd& mult) const {
  const double h = grid_.spacing();
  double hd = 1.0;
  for (int a = 0; a < grid_.dim; ++a) hd *= h;
  const double scale = hd / static_cast<double>(grid_.points());
  double acc = 0;
  for (std::int64_t i = 0; i < spec_size_; ++i)
    acc += sym_weight_[i] * mult[i] * std::norm(spec[i]);
  return acc * scale;
}

Field frac_laplacian_apply(const Field& f, double s, const Transform& tr) {
  if (!(s > 0.0 && s < 1.0)) throw InvalidParams("fractional order s must lie in (0,1)");
  Eigen::ArrayXcd spec = tr.forward(f.values);
  spec *= tr.symbol(s);
  return Field(f.grid, tr.inverse(spec));
}

Field frac_laplacian_apply(const Field& f, double s) {
  Transform tr(f.grid);
  return frac_laplacian_apply(f, s, tr);
}

double l2_sq(const Field& f) {
  double hd = 1.0;
  for (int a = 0; a < f.grid.dim; ++a) hd *= f.grid.spacing();
  return hd * f.values.square().sum();
}

double lt_pow(const Field& f, double t) {
  if (!(t >= 1.0)) throw InvalidParams("L^t norm requires t >= 1");
  double hd = 1.0;
  for (int a = 0; a < f.grid.dim; ++a) hd *= f.grid.spacing();
  const PowFn pw = PowFn::make(t);
  double acc = 0;
  const std::int64_t n = f.values.size();
  for (std::int64_t i = 0; i < n; ++i) acc += pw(std::abs(f.values[i]));
  return hd * acc;
}

double hs_seminorm_sq(const Field& f, double s, const Transform& tr) {
  return tr.weighted_spectral_sum(tr.forward(f.values), tr.symbol(s));
}

double hs_seminorm_sq(const Field& f, double s) {
  Transform tr(f.grid);
  return hs_seminorm_sq(f, s, tr);
}

NormSet norms(const Field& f, double s, const std::vector<double>& t_list, const Transform& tr) {
  NormSet out;
  out.hs_seminorm_sq = hs_seminorm_sq(f, s, tr);
  out.l2_sq = l2_sq(f);
  for (double t : t_list) out.lt_pow[t] = lt_pow(f, t);
  return out;
}

NormSet norms(const Field& f, double s, const std::vector<double>& t_list) {
  Transform tr(f.grid);
  return norms(f, s, t_list, tr);
}

double dilation_scaling(NormKind kind, double delta, int dim, double s, double) {
  if (!(delta > 0)) throw InvalidParams("dilation factor must be positive");
  switch (kind) {
    case NormKind::HsSeminormSq: return std::pow(delta, dim - 2.0 * s);
    case NormKind::LtPow:
    case NormKind::IntegralF: return std::pow(delta, static_cast<double>(dim));
  }
  return 1.0;
}

Field dilate_rescale_grid(const Field& f, double delta) {
  if (!(delta > 0)) throw InvalidParams("dilation factor must be positive");
  Grid g = f.grid;
  g.half_length *= delta;
  return Field(g, f.values);
}

double effective_support_radius(const Field& f, double rel_threshold) {
  const double vmax = f.values.abs().maxCoeff();
  if (vmax <= 0.0) return 0.0;
  const double cut = rel_threshold * vmax;
  double r2max = 0.0;
  const std::int64_t n = f.values.size();
  for (std::int64_t i = 0; i < n; ++i)
    if (std::abs(f.values[i]) >= cut) r2max = std::max(r2max, f.grid.radius_sq(i));
  return std::sqrt(r2max);
}

namespace {

using cplx = std::complex<double>;

// Chirp-z evaluation of the length-m trigonometric interpolant at sample
// points scaled by 1/delta:
//   g_j = (1/m) sum_{k=-m/2}^{m/2} c_k uhat_k exp(i alpha k (j - m/2)),
// alpha = 2 pi / (m delta), c_{+-m/2} = 1/2, uhat_k = (-1)^k FFT_k(a).
// Bluestein: k j' = (k0+kap)(j0+jm), kap*jm = (kap^2 + jm^2 - (kap-jm)^2)/2.
struct CztAxisPlan {
  int m = 0;
  int K = 0;  // m + 1 coefficients
  int P = 0;  // 2 m, exact circular convolution length
  std::vector<cplx> coeff_chirp;  // exp(i alpha (kap j0 + kap^2/2)), kap = 0..K-1
  std::vector<cplx> out_chirp;    // (1/m) exp(i alpha (k0 j0 + k0 jm + jm^2/2))
  std::vector<cplx> kernel_hat;   // FFT_P of exp(-i alpha n^2 / 2)
  fftw_plan plan_m = nullptr;
  fftw_plan plan_p_fwd = nullptr;
  fftw_plan plan_p_inv = nullptr;
  fftw_complex* buf_m = nullptr;
  fftw_complex* buf_p = nullptr;

  CztAxisPlan(int m_, double delta) : m(m_), K(m_ + 1), P(2 * m_) {
    const double alpha = 2.0 * std::numbers::pi / (m * delta);
    const double k0 = -m / 2.0, j0 = -m / 2.0;
    coeff_chirp.resize(K);
    for (int kap = 0; kap < K; ++kap)
      coeff_chirp[kap] = std::polar(1.0, alpha * (kap * j0 + 0.5 * kap * double(kap)));
    out_chirp.resize(m);
    for (int jm = 0; jm < m; ++jm)
      out_chirp[jm] =
          std::polar(1.0 / m, alpha * (k0 * j0 + k0 * jm + 0.5 * jm * double(jm)));
    {
      std::lock_guard<std::mutex> lock(plan_mutex());
      buf_m = fftw_alloc_complex(m);
      buf_p = fftw_alloc_complex(P);
      plan_m = fftw_plan_dft_1d(m, buf_m, buf_m, FFTW_FORWARD, FFTW_ESTIMATE);
      plan_p_fwd = fftw_plan_dft_1d(P, buf_p, buf_p, FFTW_FORWARD, FFTW_ESTIMATE);
      plan_p_inv = fftw_plan_dft_1d(P, buf_p, buf_p, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    // kernel v_n = exp(-i alpha n^2/2) at index n mod P, n = -m .. m-1
    for (int n = -m; n < m; ++n) {
      const cplx v = std::polar(1.0, -alpha * 0.5 * n * double(n));
      const int at = (n + P) % P;
      buf_p[at][0] = v.real();
      buf_p[at][1] = v.imag();
    }
    fftw_execute(plan_p_fwd);
    kernel_hat.resize(P);
    for (int i = 0; i < P; ++i) kernel_hat[i] = cplx(buf_p[i][0], buf_p[i][1]);
  }

  ~CztAxisPlan() {
    std::lock_guard<std::mutex> lock(plan_mutex());
    fftw_destroy_plan(plan_m);
    fftw_destroy_plan(plan_p_fwd);
    fftw_destroy_plan(plan_p_inv);
    fftw_free(buf_m);
    fftw_free(buf_p);
  }

  // in/out: strided pencil of length m
  void run(cplx* data, std::int64_t stride) const {
    for (int j = 0; j < m; ++j) {
      buf_m[j][0] = data[j * stride].real();
      buf_m[j][1] = data[j * stride].imag();
    }
    fftw_execute(plan_m);
    // b_k = c_k (-1)^k F_{k mod m}, k = -m/2 .. m/2 -> kap = 0 .. K-1
    std::fill(reinterpret_cast<cplx*>(buf_p), reinterpret_cast<cplx*>(buf_p) + P, cplx(0));
    for (int kap = 0; kap < K; ++kap) {
      const int k = kap - m / 2;
      const int idx = (k + m) % m;
      cplx F(buf_m[idx][0], buf_m[idx][1]);
      if (k & 1) F = -F;
      if (kap == 0 || kap == K - 1) F *= 0.5;
      const cplx u = F * coeff_chirp[kap];
      buf_p[kap][0] = u.real();
      buf_p[kap][1] = u.imag();
    }
    fftw_execute(plan_p_fwd);
    for (int i = 0; i < P; ++i) {
      const cplx z = cplx(buf_p[i][0], buf_p[i][1]) * kernel_hat[i];
      buf_p[i][0] = z.real();
      buf_p[i][1] = z.imag();
    }
    fftw_execute(plan_p_inv);
    const double inv_p = 1.0 / P;
    for (int jm = 0; jm < m; ++jm) {
      const cplx conv = cplx(buf_p[jm][0], buf_p[jm][1]) * inv_p;
      const cplx g = conv * out_chirp[jm];
      data[jm * stride] = g;
    }
  }
};

}  // namespace

Field resample_dilate(const Field& f, double delta, const ResampleOptions& opts) {
  if (!(delta > 0) || !std::isfinite(delta))
    throw InvalidParams("dilation factor must be positive and finite");
  if (delta == 1.0) return f;

  const double L = f.grid.half_length;
  if (delta > 1.0) {
    const double r_eff = effective_support_radius(f, opts.support_rel_threshold);
    if (delta * r_eff > opts.overflow_factor * L)
      throw ResampleOverflow("dilated effective support exceeds the box");
    if (opts.warn && delta * r_eff > L)
      std::cerr << "frsf: resample_dilate: dilated support radius " << delta * r_eff
                << " exceeds box half length " << L << "; periodic images will alias\n";
  }

  const int m = f.grid.m;
  const int d = f.grid.dim;
  const std::int64_t n = f.grid.points();
  std::vector<cplx> data(n);
  for (std::int64_t i = 0; i < n; ++i) data[i] = cplx(f.values[i], 0.0);

  CztAxisPlan plan(m, delta);
  for (int axis = 0; axis < d; ++axis) {
    std::int64_t stride = 1;
    for (int a = axis + 1; a < d; ++a) stride *= m;
    const std::int64_t block = stride * m;
    for (std::int64_t base = 0; base < n; base += block)
      for (std::int64_t off = 0; off < stride; ++off) plan.run(data.data() + base + off, stride);
  }

  Field out(f.grid);
  for (std::int64_t i = 0; i < n; ++i) out.values[i] = data[i].real();
  return out;
}

RadialProfile radialize(const Field& f) {
  const double h = f.grid.spacing();
  const std::int64_t n = f.grid.points();
  std::vector<std::pair<double, double>> samples(n);  // (radius, value)
  for (std::int64_t i = 0; i < n; ++i)
    samples[i] = {std::sqrt(f.grid.radius_sq(i)), f.values[i]};
  std::sort(samples.begin(), samples.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  // asymmetry over groups of identical radius: lattice symmetry makes the
  // radius arithmetic bit-exact, so a radial field spreads by 0
  double spread = 0.0;
  const int max_bins = static_cast<int>(samples.back().first / h) + 2;
  std::vector<double> sum(max_bins, 0.0), logsum(max_bins, 0.0);
  std::vector<std::int64_t> count(max_bins, 0);
  {
    std::int64_t i = 0;
    while (i < n) {
      std::int64_t j = i;
      double vmin = samples[i].second, vmax = samples[i].second;
      while (j + 1 < n && samples[j + 1].first == samples[i].first) {
        ++j;
        vmin = std::min(vmin, samples[j].second);
        vmax = std::max(vmax, samples[j].second);
      }
      spread = std::max(spread, vmax - vmin);
      i = j + 1;
    }
  }
  for (std::int64_t i = 0; i < n; ++i) {
    const double r = samples[i].first;
    int b = static_cast<int>(r / h);
    if (b >= max_bins) b = max_bins - 1;
    sum[b] += samples[i].second;
    if (r > 0) logsum[b] += std::log(r);
    ++count[b];
  }

  int used = 0;
  for (int b = 0; b < max_bins; ++b)
    if (count[b] > 0) ++used;

  RadialProfile pr;
  pr.radii.resize(used);
  pr.values.resize(used);
  pr.counts.resize(used);
  int at = 0;
  for (int b = 0; b < max_bins; ++b) {
    if (count[b] == 0) continue;
    const double cnt = static_cast<double>(count[b]);
    pr.radii[at] = (b == 0 && count[b] == 1) ? 0.0 : std::exp(logsum[b] / cnt);
    pr.values[at] = sum[b] / cnt;
    pr.counts[at] = cnt;
    ++at;
  }
  pr.asymmetry = spread;
  return pr;
}

double profile_interp(const RadialProfile& pr, double r) {
  const auto& x = pr.radii;
  const auto& y = pr.values;
  const Eigen::Index n = x.size();
  if (n == 0) throw ZeroField("empty radial profile");
  if (r <= x[0]) return y[0];
  if (r >= x[n - 1]) return y[n - 1];
  Eigen::Index lo = 0, hi = n - 1;
  while (hi - lo > 1) {
    const Eigen::Index mid = (lo + hi) / 2;
    (x[mid] <= r ? lo : hi) = mid;
  }
  const double t = (r - x[lo]) / (x[hi] - x[lo]);
  return (1.0 - t) * y[lo] + t * y[hi];
}

double gagliardo_seminorm_1d(const Field& f, double s) {
  if (f.grid.dim != 1) throw DimensionError("Gagliardo double sum is 1-D only");
  const int m = f.grid.m;
  const double h = f.grid.spacing();
  double total = 0.0;
  for (int lag = 1; lag < m; ++lag) {
    const int near = std::min(lag, m - lag);
    const double kern = std::pow(near * h, -(1.0 + 2.0 * s));
    double acc = 0.0;
    for (int i = 0; i < m; ++i) {
      const int j = i + lag < m ? i + lag : i + lag - m;
      const double d = f.values[i] - f.values[j];
      acc += d * d;
    }
    total += acc * kern;
  }
  return total * h * h;
}

}  // namespace frsf
