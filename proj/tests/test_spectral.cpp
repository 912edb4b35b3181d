#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "frsf/field_io.hpp"
#include "frsf/spectral.hpp"

using namespace frsf;

namespace {

constexpr double pi = std::numbers::pi;

Field cosine_mode(const Grid& g, const std::array<int, 3>& k) {
  return make_field(g, [&](const std::array<double, 3>& x) {
    double phase = 0;
    for (int a = 0; a < g.dim; ++a) phase += k[a] * pi / g.half_length * x[a];
    return std::cos(phase);
  });
}

// O(M^2) direct evaluation of the trigonometric interpolant at scaled
// sample points, the oracle for the chirp-z resampler (1-D).
Eigen::ArrayXd direct_resample_1d(const Field& f, double delta) {
  const int m = f.grid.m;
  const double L = f.grid.half_length;
  std::vector<std::complex<double>> spec(m + 1);
  for (int k = -m / 2; k <= m / 2; ++k) {
    std::complex<double> acc = 0;
    for (int j = 0; j < m; ++j) {
      const double x = f.grid.coord(j);
      acc += f.values[j] * std::polar(1.0, -pi * k / L * x);
    }
    spec[k + m / 2] = acc;
  }
  Eigen::ArrayXd out(m);
  for (int j = 0; j < m; ++j) {
    const double y = f.grid.coord(j) / delta;
    std::complex<double> acc = 0;
    for (int k = -m / 2; k <= m / 2; ++k) {
      const double c = (k == -m / 2 || k == m / 2) ? 0.5 : 1.0;
      acc += c * spec[k + m / 2] * std::polar(1.0, pi * k / L * y);
    }
    out[j] = acc.real() / m;
  }
  return out;
}

}  // namespace

TEST_SUITE("spectral") {
  TEST_CASE("constant field is annihilated") {
    const Grid g = make_grid(2, 32, 3.0);
    Field f(g);
    f.values.setConstant(4.2);
    const Field lap = frac_laplacian_apply(f, 0.5);
    CHECK(lap.values.abs().maxCoeff() <= 1e-12);
  }

  TEST_CASE("cos(2x) on [-pi,pi) at s = 1/2 maps to 2 cos(2x)") {
    const Grid g = make_grid(1, 64, pi);
    const Field f = cosine_mode(g, {2, 0, 0});
    const Field lap = frac_laplacian_apply(f, 0.5);
    CHECK((lap.values - 2.0 * f.values).abs().maxCoeff() <= 1e-10);
  }

  TEST_CASE("multiplier exactness on random single modes, dims 1-3") {
    std::mt19937 rng(42);
    for (int dim = 1; dim <= 3; ++dim) {
      const int m = dim == 3 ? 16 : 32;
      const Grid g = make_grid(dim, m, 2.5);
      std::uniform_int_distribution<int> dk(-m / 2 + 1, m / 2 - 1);
      for (double s : {0.25, 0.5, 0.75}) {
        for (int trial = 0; trial < 4; ++trial) {
          std::array<int, 3> k{0, 0, 0};
          double k2 = 0;
          for (int a = 0; a < dim; ++a) {
            k[a] = dk(rng);
            k2 += double(k[a]) * k[a];
          }
          if (k2 == 0) continue;
          const Field f = cosine_mode(g, k);
          const Field lap = frac_laplacian_apply(f, s);
          const double expect = std::pow(k2 * pi * pi / (g.half_length * g.half_length), s);
          CHECK((lap.values - expect * f.values).abs().maxCoeff() <=
                1e-10 * std::max(1.0, expect));
        }
      }
    }
  }

  TEST_CASE("linearity to machine precision") {
    const Grid g = make_grid(1, 128, 4.0);
    std::mt19937 rng(1);
    std::normal_distribution<double> dn;
    Field f(g), h(g);
    for (int i = 0; i < g.m; ++i) {
      f.values[i] = dn(rng);
      h.values[i] = dn(rng);
    }
    Field combo(g);
    combo.values = 1.7 * f.values - 0.3 * h.values;
    const Field left = frac_laplacian_apply(combo, 0.37);
    const Field right1 = frac_laplacian_apply(f, 0.37);
    const Field right2 = frac_laplacian_apply(h, 0.37);
    CHECK((left.values - 1.7 * right1.values + 0.3 * right2.values).abs().maxCoeff() <= 1e-10);
  }

  TEST_CASE("self-adjointness and quadratic-form consistency") {
    const Grid g = make_grid(2, 24, 3.0);
    std::mt19937 rng(5);
    std::normal_distribution<double> dn;
    Field f(g), h(g);
    for (std::int64_t i = 0; i < g.points(); ++i) {
      f.values[i] = dn(rng);
      h.values[i] = dn(rng);
    }
    const double s = 0.6;
    const Field lf = frac_laplacian_apply(f, s);
    const Field lh = frac_laplacian_apply(h, s);
    const double hd = g.spacing() * g.spacing();
    const double a = hd * (lf.values * h.values).sum();
    const double b = hd * (f.values * lh.values).sum();
    CHECK(a == doctest::Approx(b).epsilon(1e-10));
    const double quad = hd * (lf.values * f.values).sum();
    CHECK(quad == doctest::Approx(hs_seminorm_sq(f, s)).epsilon(1e-10));
  }

  TEST_CASE("semigroup composition of multipliers") {
    const Grid g = make_grid(1, 256, 5.0);
    const Field f = make_radial_field(g, [](double r2) { return std::exp(-r2); });
    const Field two_step = frac_laplacian_apply(frac_laplacian_apply(f, 0.3), 0.45);
    const Field one_step = frac_laplacian_apply(f, 0.75);
    CHECK((two_step.values - one_step.values).abs().maxCoeff() <=
          1e-10 * one_step.values.abs().maxCoeff());
  }

  TEST_CASE("norms of simple fields") {
    const Grid g = make_grid(1, 128, pi);
    Field c(g);
    c.values.setConstant(1.5);
    const NormSet nc = norms(c, 0.5, {3.0});
    CHECK(nc.l2_sq == doctest::Approx(1.5 * 1.5 * 2 * pi).epsilon(1e-12));
    CHECK(nc.lt_pow.at(3.0) == doctest::Approx(std::pow(1.5, 3) * 2 * pi).epsilon(1e-12));
    CHECK(nc.hs_seminorm_sq <= 1e-12);

    const Field f = cosine_mode(g, {2, 0, 0});
    const NormSet nf = norms(f, 0.5, {});
    CHECK(nf.hs_seminorm_sq == doctest::Approx(2 * pi).epsilon(1e-12));
    CHECK(nf.l2_sq == doctest::Approx(pi).epsilon(1e-12));
  }

  TEST_CASE("Parseval cross-check of the L2 norm") {
    const Grid g = make_grid(2, 32, 2.0);
    std::mt19937 rng(11);
    std::normal_distribution<double> dn;
    Field f(g);
    for (std::int64_t i = 0; i < g.points(); ++i) f.values[i] = dn(rng);
    Transform tr(g);
    const double phys = l2_sq(f);
    const double spec = tr.weighted_spectral_sum(tr.forward(f.values),
                                                 Eigen::ArrayXd::Ones(tr.spec_size()));
    CHECK(phys == doctest::Approx(spec).epsilon(1e-10));
  }

  TEST_CASE("analytic dilation factors") {
    CHECK(dilation_scaling(NormKind::HsSeminormSq, 1.0, 3, 0.5) == 1.0);
    CHECK(dilation_scaling(NormKind::LtPow, 1.0, 3, 0.5) == 1.0);
    CHECK(dilation_scaling(NormKind::HsSeminormSq, 2.0, 3, 0.5) == doctest::Approx(4.0));
    CHECK(dilation_scaling(NormKind::IntegralF, 2.0, 3, 0.5) == doctest::Approx(8.0));
  }

  TEST_CASE("exact grid-rescaling dilation scales norms analytically") {
    const Grid g = make_grid(1, 512, 10.0);
    const Field f = make_radial_field(g, [](double r2) { return std::exp(-r2); });
    const double s = 0.45;
    const double delta = 1.7;
    const Field fd = dilate_rescale_grid(f, delta);
    CHECK(hs_seminorm_sq(fd, s) ==
          doctest::Approx(std::pow(delta, 1 - 2 * s) * hs_seminorm_sq(f, s)).epsilon(1e-12));
    CHECK(l2_sq(fd) == doctest::Approx(delta * l2_sq(f)).epsilon(1e-12));
  }

  TEST_CASE("resample identity at delta = 1") {
    const Grid g = make_grid(1, 64, 5.0);
    const Field f = make_radial_field(g, [](double r2) { return std::exp(-r2); });
    const Field r = resample_dilate(f, 1.0);
    CHECK((r.values - f.values).abs().maxCoeff() == 0.0);
  }

  TEST_CASE("resample matches the direct interpolation oracle") {
    std::mt19937 rng(3);
    std::normal_distribution<double> dn;
    const Grid g = make_grid(1, 48, 4.0);
    Field f = make_radial_field(g, [](double r2) { return std::exp(-r2); });
    for (int i = 0; i < g.m; ++i) f.values[i] += 0.01 * dn(rng);
    for (double delta : {0.7, 1.3, 2.0}) {
      ResampleOptions opts;
      opts.warn = false;
      opts.overflow_factor = 100.0;
      const Field got = resample_dilate(f, delta, opts);
      const Eigen::ArrayXd want = direct_resample_1d(f, delta);
      CHECK((got.values - want).abs().maxCoeff() <= 1e-11);
    }
  }

  TEST_CASE("resample of a Gaussian matches the closed form") {
    const Grid g = make_grid(1, 512, 20.0);
    const Field f = make_radial_field(g, [](double r2) { return std::exp(-r2); });
    const Field r = resample_dilate(f, 2.0);
    double worst = 0;
    for (int i = 0; i < g.m; ++i) {
      const double x = g.coord(i);
      if (std::abs(x) > 0.75 * g.half_length) continue;
      worst = std::max(worst, std::abs(r.values[i] - std::exp(-x * x / 4.0)));
    }
    CHECK(worst <= 1e-6);
  }

  TEST_CASE("resample in 3-D preserves the dilation norm law") {
    const Grid g = make_grid(3, 32, 8.0);
    const Field f = make_radial_field(g, [](double r2) { return std::exp(-r2); });
    const double s = 0.5, delta = 1.5;
    const Field r = resample_dilate(f, delta);
    const double ratio = hs_seminorm_sq(r, s) / hs_seminorm_sq(f, s);
    CHECK(ratio == doctest::Approx(std::pow(delta, 3 - 2 * s)).epsilon(1e-3));
    const double ratio2 = l2_sq(r) / l2_sq(f);
    CHECK(ratio2 == doctest::Approx(std::pow(delta, 3.0)).epsilon(1e-3));
  }

  TEST_CASE("resample overflow detection") {
    const Grid g = make_grid(1, 128, 5.0);
    // slowly decaying profile fills the box
    const Field f = make_radial_field(g, [](double r2) { return 1.0 / (1.0 + r2 / 25.0); });
    ResampleOptions opts;
    opts.warn = false;
    CHECK_THROWS_AS(resample_dilate(f, 4.0, opts), ResampleOverflow);
  }

  TEST_CASE("radialize flags radial and non-radial fields") {
    const Grid g = make_grid(2, 64, 4.0);
    const Field radial = make_radial_field(g, [](double r2) { return 1.0 / (1.0 + r2); });
    const RadialProfile pr = radialize(radial);
    CHECK(pr.asymmetry <= 1e-12 * pr.values[0]);
    CHECK(pr.radii[0] == 0.0);
    // strictly decreasing profile
    for (Eigen::Index i = 0; i + 1 < pr.values.size(); ++i) CHECK(pr.values[i + 1] <= pr.values[i]);

    const Field skew = make_field(g, [](const std::array<double, 3>& x) { return x[0]; });
    const RadialProfile ps = radialize(skew);
    CHECK(ps.asymmetry > 1.0);  // comparable to the profile scale
  }

  TEST_CASE("gagliardo double sum: zero, constant, refinement-stable ratio") {
    const Grid g = make_grid(1, 128, 6.0);
    Field zero(g);
    CHECK(gagliardo_seminorm_1d(zero, 0.4) == 0.0);
    Field c(g);
    c.values.setConstant(2.0);
    CHECK(gagliardo_seminorm_1d(c, 0.4) <= 1e-14);

    const double s = 0.4;
    auto ratio_at = [&](int m) {
      const Grid gg = make_grid(1, m, 6.0);
      const Field f = make_radial_field(gg, [](double r2) { return std::exp(-r2); });
      return hs_seminorm_sq(f, s) / gagliardo_seminorm_1d(f, s);
    };
    const double r1 = ratio_at(128);
    const double r2 = ratio_at(256);
    CHECK(std::abs(r1 - r2) / r2 <= 0.05);
    CHECK_THROWS_AS(gagliardo_seminorm_1d(Field(make_grid(2, 16, 1.0)), 0.4), DimensionError);
  }

  TEST_CASE("field binary round-trip") {
    const Grid g = make_grid(2, 16, 2.5);
    std::mt19937 rng(8);
    std::normal_distribution<double> dn;
    Field f(g);
    for (std::int64_t i = 0; i < g.points(); ++i) f.values[i] = dn(rng);
    const std::string path = "roundtrip_test.frsf";
    write_field(path, f);
    const Field back = read_field(path);
    CHECK(back.grid.dim == g.dim);
    CHECK(back.grid.m == g.m);
    CHECK(back.grid.half_length == g.half_length);
    CHECK((back.values == f.values).all());
    std::remove(path.c_str());
  }
}
