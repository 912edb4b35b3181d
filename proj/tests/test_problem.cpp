#include <doctest.h>

#include <cmath>
#include <random>

#include "frsf/problem.hpp"

using namespace frsf;

namespace {

// independent oracle for eps_*: dense scan of sup_{z in (0,2]} F_eps(z)
// over 10^6 grid points, bisecting in eps until the sup changes sign
double eps_star_scan_oracle(double p, double q) {
  constexpr int n = 1'000'000;
  std::vector<double> zp(n), zq(n), z2(n);
  for (int i = 0; i < n; ++i) {
    const double z = 2.0 * (i + 1) / n;
    zp[i] = std::pow(z, p) / p;
    zq[i] = std::pow(z, q) / q;
    z2[i] = z * z / 2.0;
  }
  auto sup_positive = [&](double eps) {
    for (int i = 0; i < n; ++i)
      if (zp[i] - zq[i] - eps * z2[i] > 0) return true;
    return false;
  };
  double lo = 0.0, hi = 1.0;
  while (!(!sup_positive(hi))) hi *= 2.0;  // ensure sup <= 0 at hi
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (sup_positive(mid) ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_SUITE("problem") {
  TEST_CASE("regime classification") {
    CHECK(classify_regime(make_params(3, 0.5, 2.5, 4, 0.01)) == Regime::Subcritical);
    CHECK(classify_regime(make_params(3, 0.5, 3.0, 5, 0.01)) == Regime::Critical);
    CHECK(classify_regime(make_params(3, 0.5, 4.0, 6, 0.01)) == Regime::Supercritical);
    CHECK(make_params(3, 0.5, 2.5, 4, 0).two_star() == doctest::Approx(3.0).epsilon(1e-15));
  }

  TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(make_params(1, 0.6, 3, 6, 0.01), InvalidParams);   // N <= 2s
    CHECK_THROWS_AS(make_params(3, 0.5, 2.0, 3, 0.01), InvalidParams); // p = 2
    CHECK_THROWS_AS(make_params(3, 0.5, 4.0, 4, 0.01), InvalidParams); // q = p
    CHECK_THROWS_AS(make_params(3, 1.5, 3.0, 5, 0.01), InvalidParams); // s out of range
  }

  TEST_CASE("nonlinearity point values") {
    const ProblemParams pr = make_params(1, 0.45, 3, 6, 0.05);
    {
      const auto [f, F] = nonlinearity(0.0, pr, false);
      CHECK(f == 0.0);
      CHECK(F == 0.0);
    }
    {
      const auto [f, F] = nonlinearity(1.0, pr, false);
      CHECK(f == doctest::Approx(-0.05).epsilon(1e-14));
      CHECK(F == doctest::Approx(1.0 / 3 - 1.0 / 6 - 0.025).epsilon(1e-14));
    }
    {
      // truncated branch above 1: f = -eps
      const auto [f, F] = nonlinearity(2.0, pr, true);
      CHECK(f == doctest::Approx(-0.05).epsilon(1e-14));
      CHECK(F == doctest::Approx((1.0 / 3 - 1.0 / 6 - 0.025) - 0.05).epsilon(1e-14));
    }
  }

  TEST_CASE("nonlinearity rejects negative arguments for fractional powers") {
    const ProblemParams pr = make_params(3, 0.5, 2.5, 4, 0.01);
    CHECK_THROWS_AS(nonlinearity(-0.5, pr, false), DomainError);
    // truncated accepts any real
    const auto [f, F] = nonlinearity(-0.5, pr, true);
    CHECK(f == 0.0);
    CHECK(F == 0.0);
  }

  TEST_CASE("truncated agrees with exact on [0,1] and is bounded") {
    const ProblemParams pr = make_params(1, 0.45, 3, 6, 0.05);
    const Nonlinearity ex = Nonlinearity::physical(pr, false);
    const Nonlinearity tr = Nonlinearity::physical(pr, true);
    double bound = 0;
    for (int i = 0; i <= 100; ++i) {
      const double u = i / 100.0;
      CHECK(tr.f(u) == doctest::Approx(ex.f(u)).epsilon(1e-15));
      bound = std::max(bound, std::abs(ex.f(u)));
    }
    for (double u : {1.5, 3.0, 10.0, 1e6}) CHECK(std::abs(tr.f(u)) <= std::max(pr.eps, bound));
  }

  TEST_CASE("primitive matches derivative by central differences") {
    const ProblemParams pr = make_params(3, 0.5, 2.5, 4, 0.07);
    const Nonlinearity nl = Nonlinearity::physical(pr, false);
    const double h = 1e-6;
    for (int i = 1; i < 20; ++i) {
      const double u = i / 20.0;
      const double fd = (nl.F(u + h) - nl.F(u - h)) / (2 * h);
      CHECK(fd == doctest::Approx(nl.f(u)).epsilon(1e-6));
    }
  }

  TEST_CASE("eps_star closed form") {
    CHECK(eps_star(4, 6) == doctest::Approx(0.1875).epsilon(1e-15));
    // scan-oracle agreement for the stock pair
    CHECK(eps_star(4, 6) == doctest::Approx(eps_star_scan_oracle(4, 6)).epsilon(1e-6));
  }

  TEST_CASE("sup F changes sign across eps_star") {
    const double p = 4, q = 6;
    auto supF = [&](double eps) {
      double sup = -1e300;
      for (int i = 1; i <= 200000; ++i) {
        const double z = 2.0 * i / 200000;
        sup = std::max(sup, std::pow(z, p) / p - std::pow(z, q) / q - eps * z * z / 2);
      }
      return sup;
    };
    CHECK(supF(0.1) > 0);
    CHECK(supF(0.2) < 0);
  }

  TEST_CASE("eps_star vs scan oracle on random exponent pairs") {
    std::mt19937 rng(20240811);
    std::uniform_real_distribution<double> dp(2.05, 8.0);
    for (int trial = 0; trial < 10; ++trial) {
      const double p = dp(rng);
      std::uniform_real_distribution<double> dq(p + 0.3, 10.0);
      const double q = dq(rng);
      const double closed = eps_star(p, q);
      const double scanned = eps_star_scan_oracle(p, q);
      CHECK(std::abs(closed - scanned) <= 1e-6 * std::max(1.0, closed));
    }
  }

  TEST_CASE("F nonpositive above the threshold, positive somewhere below") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> dp(2.1, 6.0);
    for (int trial = 0; trial < 5; ++trial) {
      const double p = dp(rng);
      const double q = p + 1.0 + trial * 0.5;
      const double es = eps_star(p, q);
      auto F = [&](double z, double eps) {
        return std::pow(z, p) / p - std::pow(z, q) / q - eps * z * z / 2;
      };
      bool any_positive_above = false, any_positive_below = false;
      for (int i = 1; i <= 100000; ++i) {
        const double z = 2.0 * i / 100000;
        if (F(z, es * 1.0000001) > 0) any_positive_above = true;
        if (F(z, es * 0.99) > 0) any_positive_below = true;
      }
      CHECK_FALSE(any_positive_above);
      CHECK(any_positive_below);
    }
  }

  TEST_CASE("limit constants") {
    {
      const LimitConstants lc = limit_constants(make_params(3, 0.5, 4, 6, 0.01));
      CHECK(lc.supercritical_p_norm == doctest::Approx(2.0).epsilon(1e-15));
      CHECK(lc.supercritical_q_norm == doctest::Approx(1.0).epsilon(1e-15));
      CHECK(lc.eps_star == doctest::Approx(0.1875).epsilon(1e-15));
    }
    {
      const LimitConstants lc = limit_constants(make_params(3, 0.5, 2.5, 4, 0.01));
      CHECK(lc.subcritical_two_norm == doctest::Approx(2.0 / 3).epsilon(1e-15));
      CHECK(lc.subcritical_p_norm == doctest::Approx(5.0 / 3).epsilon(1e-15));
    }
    CHECK(make_params(3, 0.5, 3, 5, 0.01).k_critical() == doctest::Approx(1.25).epsilon(1e-15));
  }

  TEST_CASE("fast power paths agree with std::pow") {
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> du(0.0, 3.0);
    for (double e : {2.0, 3.0, 5.0, 1.5, 2.5, 4.5, 2.7, 3.14}) {
      const PowFn f = PowFn::make(e);
      for (int i = 0; i < 50; ++i) {
        const double u = du(rng) + 1e-12;
        CHECK(f(u) == doctest::Approx(std::pow(u, e)).epsilon(1e-12));
      }
    }
  }
}
