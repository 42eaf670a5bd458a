#include "doctest.h"

#include "stabletp/errors.hpp"
#include "stabletp/specfun.hpp"
#include "stabletp/stable.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <random>

using namespace stabletp;
using namespace stabletp::stable;

namespace {

EvalConfig cfg() { return EvalConfig{}; }

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// Fourier inversion of exp(-|t|^{2 a}) by panel-wise Gauss-Kronrod, written out here
// independently of the library.
double cosine_integral(double a, double x) {
  double tmax = std::pow(50.0, 1.0 / (2 * a));
  double width = std::min(0.5, M_PI / std::max(std::abs(x), 1e-9));
  double total = 0;
  for (double lo = 0; lo < tmax; lo += width) {
    auto f = [&](double t) { return std::cos(t * x) * std::exp(-std::pow(t, 2 * a)); };
    total += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, lo, lo + width, 10, 1e-14);
  }
  return total / M_PI;
}

}  // namespace

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(StableParams(0.0, 0.5), InvalidParams);
  CHECK_THROWS_AS(StableParams(2.5, 0.5), InvalidParams);
  CHECK_THROWS_AS(StableParams(2.0, 0.4), InvalidParams);
  CHECK_THROWS_AS(StableParams(1.0, 1.0), InvalidParams);
  CHECK_THROWS_AS(StableParams(1.5, 0.2), InvalidParams);
  CHECK_NOTHROW(StableParams(1.5, 1.0 / 1.5));
  CHECK_NOTHROW(StableParams(0.5, 0.0));
  StableParams p(0.5, 0.25);
  CHECK(p.gamma_param() == doctest::Approx(3.0));
  CHECK(p.delta_param() == doctest::Approx(7.0));
  CHECK(p.gamma_param() <= p.delta_param() + 1);
  EvalConfig bad;
  bad.series_terms = 5;
  CHECK_THROWS_AS(bad.validate(), InvalidParams);
  bad = EvalConfig{};
  bad.quadrature_rel_tol = 1e-3;
  CHECK_THROWS_AS(bad.validate(), InvalidParams);
}

TEST_CASE("density closed forms") {
  CHECK(density<double>(StableParams(1, 0.5), 0.0, cfg()) == doctest::Approx(1 / M_PI).epsilon(1e-15));
  CHECK(density<double>(StableParams(2, 0.5), 0.0, cfg()) == doctest::Approx(1 / (2 * std::sqrt(M_PI))).epsilon(1e-15));
  double levy = std::exp(-0.25) / (2 * std::sqrt(M_PI));
  CHECK(density<double>(StableParams(0.5, 1), 1.0, cfg()) == doctest::Approx(levy).epsilon(1e-14));
  // the general machinery reproduces the Levy density too
  CHECK(std::exp(integral_log_density<double>(StableParams(0.5, 1), 1.0, cfg())) == doctest::Approx(levy).epsilon(1e-10));
  CHECK(tail_series<double>(StableParams(0.5, 1), 0, 1.0, cfg()).value() == doctest::Approx(levy).epsilon(1e-11));
  // alpha = 1 skewed Cauchy
  double r = 0.3;
  double x = 0.7;
  CHECK(density<double>(StableParams(1, r), x, cfg()) ==
        doctest::Approx(std::sin(M_PI * r) / (M_PI * (1 + 2 * std::cos(M_PI * r) * x + x * x))));
}

TEST_CASE("density matches frozen 55-digit references") {
  // references from an independent arbitrary-precision quadrature of the Laplace-contour and
  // Fourier integrals at 70 digits
  struct Ref {
    double a, r;
    const char* x;
    const char* value;
  };
  const Ref refs[] = {
      {0.9, 1, "0.5", "0.00000008203967675351351424549273437590484319001"},
      {0.6, 1, "1", "0.2899412600088371124746810486291783241097205752099449269"},
      {0.3, 0.5, "2", "0.02560481927808399578257116535917149448986623276901065103"},
      {0.7, 0.4, "0.3", "0.2311176370100290184807204644512384341363810829601525336"},
      {1.5, 0.5, "3", "0.03150942361632493531350302411880040772930961055025415082"},
      {1.5, 0.6, "0.7", "0.3052203873582402296082723345369943041357808679963833663"},
      {1.2, 0.3, "-2", "0.1157115277913313916189033136193856811463212317932824527"},
  };
  EvalConfig c;
  c.precision = Precision(50);
  PrecisionScope scope(60);
  for (const Ref& ref : refs) {
    mp_real x(ref.x);
    mp_real want(ref.value);
    mp_real got = density<mp_real>(StableParams(ref.a, ref.r), x, c);
    CHECK(abs(got - want) / want < mp_real("1e-40"));
    // the double path agrees to its own accuracy
    CHECK(rel(density<double>(StableParams(ref.a, ref.r), x.convert_to<double>(), cfg()), want.convert_to<double>()) <
          1e-9);
  }
}

TEST_CASE("high-precision results are stable under a precision increase") {
  StableParams p(0.7, 0.8);
  EvalConfig c60;
  c60.precision = Precision(60);
  EvalConfig c90;
  c90.precision = Precision(90);
  PrecisionScope scope(100);
  for (const char* xs : {"0.15", "1.3", "9"}) {
    mp_real x(xs);
    mp_real a = density<mp_real>(p, x, c60);
    mp_real b = density<mp_real>(p, x, c90);
    CHECK(abs(a - b) / b < mp_real("1e-57"));
  }
}

TEST_CASE("density derivatives") {
  CHECK(density_derivative<double>(StableParams(1, 0.5), 1, 0.0, cfg()) == doctest::Approx(0.0));
  CHECK(density_derivative<double>(StableParams(1, 0.5), 1, 1.0, cfg()) == doctest::Approx(-1 / (2 * M_PI)));
  // Gaussian: f'' = (x^2/4 - 1/2) f
  double x = 0.8;
  double f = density<double>(StableParams(2, 0.5), x, cfg());
  CHECK(density_derivative<double>(StableParams(2, 0.5), 2, x, cfg()) == doctest::Approx((x * x / 4 - 0.5) * f));
  CHECK_THROWS_AS(density_derivative<double>(StableParams(0.5, 1), 9, 1.0, cfg()), InvalidParams);
}

TEST_CASE("differentiated tail series agrees with high-precision finite differences") {
  StableParams p(0.4, 1.0);
  EvalConfig c;
  c.precision = Precision(60);
  PrecisionScope scope(70);
  mp_real x(2);
  mp_real h("1e-10");
  auto f = [&](const mp_real& t) { return density<mp_real>(p, t, c); };
  mp_real fd2 = (-f(x + 2 * h) + 16 * f(x + h) - 30 * f(x) + 16 * f(x - h) - f(x - 2 * h)) / (12 * h * h);
  mp_real series = density_derivative<mp_real>(p, 2, x, c);
  CHECK(abs(series - fd2) < mp_real("1e-8") * abs(fd2));
  CHECK(abs(series - fd2) < mp_real("1e-30") * abs(fd2));
  // double path, first and third derivatives
  double d1 = density_derivative<double>(p, 1, 2.0, cfg());
  CHECK(d1 == doctest::Approx(density_derivative<mp_real>(p, 1, x, c).convert_to<double>()).epsilon(1e-10));
  double d3 = density_derivative<double>(p, 3, 2.0, cfg());
  CHECK(d3 == doctest::Approx(density_derivative<mp_real>(p, 3, x, c).convert_to<double>()).epsilon(1e-10));
}

TEST_CASE("finite-difference fallback for derivatives away from the series regimes") {
  // alpha = 0.9 at x = 0.6: neither series is usable, so the derivative comes from extrapolated
  // finite differences; compare with the log-derivative route for j = 1 and with a plain
  // high-precision stencil for j = 2.
  StableParams p(0.9, 1.0);
  EvalConfig c;
  c.precision = Precision(40);
  PrecisionScope scope(60);
  mp_real x("0.6");
  CHECK(!tail_series<mp_real>(p, 2, x, c));
  mp_real h("1e-12");
  auto f = [&](const mp_real& t) { return density<mp_real>(p, t, c); };
  mp_real fd2 = (f(x + h) - 2 * f(x) + f(x - h)) / (h * h);
  mp_real d2 = density_derivative<mp_real>(p, 2, x, c);
  CHECK(abs(d2 - fd2) < mp_real("1e-12") * abs(fd2));
  double d2d = density_derivative<double>(p, 2, 0.6, cfg());
  CHECK(d2d == doctest::Approx(d2.convert_to<double>()).epsilon(1e-6));
}

TEST_CASE("derivatives at zero") {
  CHECK(derivative_at_zero<double>(StableParams(1.5, 0.5), 2) == 0.0);
  StableParams p(1.5, 0.6);
  CHECK(derivative_at_zero<double>(p, 1) ==
        doctest::Approx(std::tgamma(1 + 1 / 1.5) * std::sin(M_PI * 0.6) / M_PI).epsilon(1e-14));
  StableParams q(1.5, 0.5);
  CHECK(rel(derivative_at_zero<double>(q, 1), density_inversion(q, 0.0, cfg())) < 1e-8);
  // the Taylor series itself, at a small positive x, approaches the value at zero
  CHECK(rel(density<double>(q, 1e-7, cfg()), derivative_at_zero<double>(q, 1)) < 1e-8);
  // first derivative at the origin against an inversion-based difference quotient
  double h = 1e-4;
  double d = (density_inversion(p, h, cfg()) - density_inversion(p, -h, cfg())) / (2 * h);
  CHECK(derivative_at_zero<double>(p, 2) == doctest::Approx(d).epsilon(1e-6));
}

TEST_CASE("Laplace transform of the positive law") {
  CHECK(laplace_oracle(0.5, 1.0, cfg()) == doctest::Approx(std::exp(-1.0)).epsilon(1e-9));
  CHECK(laplace_oracle(0.3, 2.0, cfg()) == doctest::Approx(std::exp(-std::pow(2.0, 0.3))).epsilon(1e-9));
  CHECK(laplace_oracle(0.7, 1e-10, cfg()) == doctest::Approx(std::exp(-std::pow(1e-10, 0.7))).epsilon(1e-8));
  CHECK_THROWS_AS(laplace_oracle(1.2, 1.0, cfg()), InvalidParams);
}

TEST_CASE("mass on the positive half-line is rho") {
  CHECK(positive_mass(StableParams(1, 0.3), cfg()) == doctest::Approx(0.3).epsilon(1e-6));
  CHECK(positive_mass(StableParams(0.6, 1), cfg()) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(positive_mass(StableParams(1.5, 0.6), cfg()) == doctest::Approx(0.6).epsilon(1e-6));
}

TEST_CASE("normalisation over a grid covering every regime") {
  const std::pair<double, double> grid[] = {{0.3, 1},   {0.3, 0.5}, {0.3, 0},   {0.6, 0.2},
                                            {0.9, 0.8}, {1, 0.3},   {1, 0.5},   {1.2, 0.5},
                                            {1.5, 2.0 / 3}, {1.5, 0.5}, {1.8, 0.5}, {2, 0.5}};
  for (auto [a, r] : grid) {
    StableParams p(a, r);
    double total = positive_mass(p, cfg()) + positive_mass(p.reflected(), cfg());
    CHECK(total == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("tail series against the inversion oracle") {
  for (double a : {0.3, 0.4, 0.6}) {
    for (double r : {0.5, 1.0}) {
      for (double x : {2.0, 5.0, 10.0}) {
        StableParams p(a, r);
        auto s = tail_series<double>(p, 0, x, cfg());
        REQUIRE(s.has_value());
        CHECK(rel(*s, density_inversion(p, x, cfg())) < 1e-8);
      }
    }
  }
}

TEST_CASE("space-time rescaling") {
  StableParams p(0.8, 0.7);
  for (double t : {0.1, 1.0, 7.5}) {
    for (double x : {-1.0, 0.4, 3.0}) {
      double s = std::pow(t, -1 / 0.8);
      CHECK(spacetime_density<double>(p, t, x, cfg()) == doctest::Approx(s * density<double>(p, x * s, cfg())).epsilon(1e-12));
    }
  }
}

TEST_CASE("density is non-negative at random points") {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(-4, 4);
  for (auto [a, r] : {std::pair{0.4, 0.7}, std::pair{0.9, 1.0}, std::pair{1.3, 0.5}, std::pair{1.7, 1 / 1.7}}) {
    StableParams p(a, r);
    bool ok = true;
    for (int i = 0; i < 10000; ++i) {
      double x = std::sinh(u(gen));
      double f = density<double>(p, x, cfg());
      if (!(f >= 0)) ok = false;
    }
    CHECK(ok);
  }
}

TEST_CASE("mode of the positive law") {
  CHECK(mode(StableParams(0.5, 1), cfg()) == doctest::Approx(1.0 / 6).epsilon(1e-10));
  StableParams p7(0.7, 1);
  double m7 = mode(p7, cfg());
  CHECK(std::abs(density_derivative<double>(p7, 1, m7, cfg())) < 1e-10);
  for (double a : {0.3, 0.6, 0.9}) {
    StableParams p(a, 1);
    double m = mode(p, cfg());
    double fm = density<double>(p, m, cfg());
    CHECK(density<double>(p, m - 1e-3, cfg()) < fm);
    CHECK(density<double>(p, m + 1e-3, cfg()) < fm);
  }
  CHECK_THROWS_AS(mode(StableParams(0.5, 0.5), cfg()), InvalidParams);
}

TEST_CASE("unimodality: f' changes sign once on (0, 10 mode)") {
  for (double a : {0.35, 0.8}) {
    StableParams p(a, 1);
    double m = mode(p, cfg());
    int changes = 0;
    double prev = 0;
    for (int i = 1; i <= 10000; ++i) {
      double x = 10 * m * i / 10000.0;
      double s = log_derivative<double>(p, x, cfg());
      if (i > 1 && (s > 0) != (prev > 0)) ++changes;
      prev = s;
    }
    CHECK(changes == 1);
  }
}

TEST_CASE("symmetric subordinated density") {
  CHECK(symmetric_density<double>(0.5, 0, 0.0, cfg()) == doctest::Approx(1 / M_PI).epsilon(1e-14));
  CHECK(symmetric_density<double>(0.5, 0, 0.7, cfg()) == doctest::Approx(1 / (M_PI * (1 + 0.49))).epsilon(1e-10));
  for (double a : {0.2, 0.6}) {
    CHECK(symmetric_density<double>(a, 1, 0.0, cfg()) == 0.0);
    CHECK(symmetric_density<double>(a, 3, 0.0, cfg()) == 0.0);
  }
  for (double x : {0.3, 1.0, 4.0}) {
    CHECK(rel(symmetric_density<double>(1.0 / 3, 0, x, cfg()), cosine_integral(1.0 / 3, x)) < 1e-8);
    CHECK(rel(symmetric_density<double>(0.7, 0, x, cfg()), cosine_integral(0.7, x)) < 1e-8);
  }
  // q = f_{2 alpha, 1/2}
  CHECK(rel(symmetric_density<double>(0.35, 0, 1.4, cfg()), density<double>(StableParams(0.7, 0.5), 1.4, cfg())) < 1e-9);
  // derivatives against differences of the density
  double h = 1e-5;
  double fd = (symmetric_density<double>(0.3, 0, 1.2 + h, cfg()) - symmetric_density<double>(0.3, 0, 1.2 - h, cfg())) / (2 * h);
  CHECK(symmetric_density<double>(0.3, 1, 1.2, cfg()) == doctest::Approx(fd).epsilon(1e-7));
}

TEST_CASE("Hermite mixture representation reproduces the derivatives") {
  for (double a : {0.3, 0.45, 0.7}) {
    for (int n = 0; n <= 4; ++n) {
      for (double x : {0.5, 1.0, 2.5}) {
        double direct = symmetric_density<double>(a, n, x, cfg());
        double herm = symmetric_density_hermite(a, n, x, cfg());
        CHECK(std::abs(direct - herm) < 1e-8 * std::max(1.0, std::abs(direct)));
      }
    }
  }
}

TEST_CASE("fractional moments of the positive part") {
  StableParams p(1.3, 0.45);
  CHECK(fractional_moment_positive_part<double>(p, 0.0) == doctest::Approx(1.0));
  StableParams q(0.6, 1.0);
  CHECK(fractional_moment_positive_part<double>(q, 0.4) ==
        doctest::Approx(std::tgamma(1 - 0.4 / 0.6) / std::tgamma(1 - 0.4)).epsilon(1e-13));
  CHECK(fractional_moment_positive_part<double>(StableParams(1, 0.5), 1.0 / 3) ==
        doctest::Approx(1 / std::cos(M_PI / 6)).epsilon(1e-13));
  CHECK_THROWS_AS(fractional_moment_positive_part<double>(q, 0.6), DomainError);
  CHECK_THROWS_AS(fractional_moment_positive_part<double>(q, -1.0), DomainError);
  // s = 1 inside the strip for alpha > 1 is a removable singularity of the displayed formula
  double left = fractional_moment_positive_part<double>(p, 1.0 - 1e-7);
  double mid = fractional_moment_positive_part<double>(p, 1.0);
  CHECK(mid == doctest::Approx(left).epsilon(1e-6));
  // direct integral of x^s f(x) / rho on (0, inf)
  for (double s : {-0.4, 0.3, 0.9}) {
    StableParams r(1.4, 0.6);
    auto f = [&](double x) { return std::pow(x, s) * density<double>(r, x, cfg()) / 0.6; };
    double lo = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, 1.0, 15, 1e-12);
    double hi = boost::math::quadrature::exp_sinh<double>().integrate(f, 1.0, std::numeric_limits<double>::infinity());
    double want = fractional_moment_positive_part<double>(r, s);
    CHECK(lo + hi == doctest::Approx(want).epsilon(5e-6));
  }
}

TEST_CASE("inversion oracle agrees with the density across regimes") {
  for (auto [a, r] : {std::pair{0.4, 0.3}, std::pair{0.95, 0.6}, std::pair{1.1, 0.5}, std::pair{1.8, 1 / 1.8}}) {
    StableParams p(a, r);
    for (double x : {-2.0, -0.3, 0.2, 1.5, 4.0}) {
      double f = density<double>(p, x, cfg());
      double o = density_inversion(p, x, cfg());
      CHECK(std::abs(f - o) < 1e-9 * std::max(f, 1e-3));
    }
  }
}
