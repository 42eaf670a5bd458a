#include "doctest.h"

#include "stabletp/errors.hpp"
#include "stabletp/factorization.hpp"
#include "stabletp/quadrature.hpp"
#include "stabletp/specfun.hpp"
#include "stabletp/stable.hpp"

#include <boost/math/special_functions/beta.hpp>

#include <cmath>
#include <complex>

using namespace stabletp;
using namespace stabletp::factorization;
using stable::StableParams;

namespace {

constexpr double kEulerGamma = 0.5772156649015329;

// density of log B_{a,b} at t < 0
double log_beta_density(double a, double b, double t) {
  if (!(t < 0)) return 0.0;
  return std::exp(a * t + (b - 1) * std::log(-std::expm1(t))) / boost::math::beta(a, b);
}

// density of log X_{alpha,n} by direct convolution of the log-Beta factors, n <= 2
double convolved_density(double alpha, int n, double x) {
  BetaProductSpec spec = beta_product_spec(alpha, n);
  double shift = std::log(spec.global_scale);
  for (const BetaFactor& f : spec.factors) shift += std::log(f.scale);
  const auto& fs = spec.factors;
  auto dens = [&](int k, double t) { return log_beta_density(fs[k].a, fs[k].b, t); };
  double y = x - shift;
  if (n == 0) return dens(0, y);
  // density of the sum of factors 1..n at t
  auto rest = [&](double t) -> double {
    if (n == 1) return dens(1, t);
    if (!(t < 0)) return 0.0;
    return quad::tanh_sinh<double>([&](double u) { return dens(1, u) * dens(2, t - u); }, t, 0.0, 1e-12).value;
  };
  if (!(y < 0)) return 0.0;
  return quad::tanh_sinh<double>([&](double u) { return dens(0, u) * rest(y - u); }, y, 0.0, 1e-10).value;
}

}  // namespace

TEST_CASE("Beta-product factors") {
  BetaProductSpec half = beta_product_spec(0.5, 0);
  REQUIRE(half.factors.size() == 1);
  CHECK(half.factors[0].a == 1.0);
  CHECK(half.factors[0].b == 1.0);
  // exp(psi(2) - psi(1)) = e
  CHECK(half.factors[0].scale == doctest::Approx(std::exp(1.0)).epsilon(1e-14));
  CHECK(half.global_scale == doctest::Approx(std::exp(-kEulerGamma / 2)).epsilon(1e-15));
  BetaProductSpec third = beta_product_spec(1.0 / 3, 2);
  REQUIRE(third.factors.size() == 3);
  for (int k = 0; k < 3; ++k) {
    CHECK(third.factors[k].a == doctest::Approx(1 + 3 * k).epsilon(1e-15));
    CHECK(third.factors[k].b == doctest::Approx(2.0).epsilon(1e-15));
  }
  BetaProductSpec s = beta_product_spec(0.7, 10);
  for (const BetaFactor& f : s.factors) {
    CHECK(f.b == s.factors[0].b);
    CHECK(f.b > 0);
    CHECK(f.scale > 1);
  }
  CHECK_THROWS_AS(beta_product_spec(1.0, 2), InvalidParams);
  CHECK_THROWS_AS(beta_product_spec(0.5, -1), InvalidParams);
}

TEST_CASE("characteristic function of log X_alpha") {
  CHECK(std::abs(h_hat(0.4, 0.0) - 1.0) < 1e-15);
  double prev = 2;
  for (double s = 0.5; s <= 40; s *= 1.5) {
    std::complex<double> v = h_hat(0.6, s);
    CHECK(std::abs(h_hat(0.6, -s) - std::conj(v)) < 1e-14);
    CHECK(std::abs(v) < prev);
    prev = std::abs(v);
  }
}

TEST_CASE("characteristic function of the Beta-product approximation") {
  CHECK(std::abs(h_hat_n(0.6, 5, 0.0) - 1.0) < 1e-14);
  for (double a : {0.3, 0.6, 0.9}) {
    for (double s : {0.5, 1.0, 2.0, 5.0}) {
      double prev = 1e300;
      for (int n : {5, 10, 20, 40}) {
        std::complex<double> v = h_hat_n(a, n, s);
        CHECK(std::abs(v) <= 1.0 + 1e-14);
        double gap = std::abs(v - h_hat(a, s));
        CHECK_MESSAGE(gap <= prev + 1e-12, "alpha=", a, " s=", s, " n=", n);
        prev = gap;
      }
    }
  }
  CHECK(std::abs(h_hat_n(0.6, 40, 1.0) - h_hat(0.6, 1.0)) < std::abs(h_hat_n(0.6, 5, 1.0) - h_hat(0.6, 1.0)));
  // a single factor is the Mellin transform of a scaled Beta variable
  BetaProductSpec spec = beta_product_spec(0.5, 0);
  double s = 0.7;
  std::complex<double> i(0, 1);
  std::complex<double> want = std::exp(i * s * std::log(spec.global_scale * spec.factors[0].scale)) *
                              (std::exp(specfun::log_gamma<double>(1.0 + i * s) -
                                        specfun::log_gamma<double>(2.0 + i * s)));
  CHECK(std::abs(h_hat_n(0.5, 0, s) - want) < 1e-14);
}

TEST_CASE("Fourier inversion") {
  auto gauss = [](double s) { return std::complex<double>(std::exp(-s * s / 2)); };
  CHECK(density_from_cf(gauss, 0.0) == doctest::Approx(1 / std::sqrt(2 * M_PI)).epsilon(1e-12));
  CHECK(density_from_cf(gauss, 1.5) == doctest::Approx(std::exp(-1.125) / std::sqrt(2 * M_PI)).epsilon(1e-10));
  // Cauchy law, cf e^{-|s|}
  auto cauchy = [](double s) { return std::complex<double>(std::exp(-std::abs(s))); };
  CHECK(density_from_cf(cauchy, 2.0) == doctest::Approx(1 / (5 * M_PI)).epsilon(1e-9));
  auto slow = [](double s) { return std::complex<double>(1 / std::sqrt(1 + s * s)); };
  CHECK_THROWS_AS(density_from_cf(slow, 0.0), DomainError);
  InversionConfig bad;
  bad.abs_tol = 0;
  CHECK_THROWS_AS(density_from_cf(gauss, 0.0, bad), InvalidParams);
}

TEST_CASE("log-scale density of X_alpha by inversion") {
  for (double a : {0.3, 0.6}) {
    auto cf = [a](double s) { return h_hat(a, s); };
    std::vector<double> xs;
    for (int i = 0; i <= 1200; ++i) xs.push_back(-30 + 0.05 * i);
    std::vector<double> h = density_from_cf(cf, xs);
    double mass = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      CHECK(h[i] >= -1e-9);
      mass += (i == 0 || i + 1 == xs.size() ? 0.5 : 1.0) * 0.05 * h[i];
    }
    CHECK(std::abs(mass - 1) < 1e-6);
    // X = Z^{-alpha}: h(x) = f_Z(e^{-x/alpha}) e^{-x/alpha} / alpha
    for (double x : {-4.0, -1.0, 0.0, 0.7, 3.0}) {
      double z = std::exp(-x / a);
      double direct = stable::density<double>(StableParams(a, 1.0), z, {}) * z / a;
      CHECK(std::abs(density_from_cf(cf, x) - direct) < 1e-8);
    }
  }
}

// only parameters whose characteristic function decays fast enough for a tight inversion
TEST_CASE("inversion of the approximating characteristic function matches direct convolution") {
  for (auto [a, n] : {std::pair{0.2, 0}, std::pair{0.3, 1}, std::pair{0.3, 2}, std::pair{0.25, 1}}) {
    auto cf = [a, n](double s) { return h_hat_n(a, n, s); };
    for (double x : {-3.0, -1.5, -0.8, -0.3, 0.2}) {
      double direct = convolved_density(a, n, x);
      CHECK_MESSAGE(std::abs(density_from_cf(cf, x) - direct) < 1e-6, "alpha=", a, " n=", n, " x=", x);
    }
  }
}

TEST_CASE("sup distance between X_alpha and its Beta-product approximation") {
  CHECK(sup_distance_grid().size() == 400);
  CHECK(sup_distance_grid().front() == -10.0);
  CHECK(sup_distance_grid().back() == 10.0);
  // values recorded on the first run of the inversion
  struct Frozen {
    double alpha;
    double d[4];
  };
  for (Frozen f : {Frozen{0.3, {0.012336356, 0.0063766778, 0.0032511623, 0.0016410464}},
                   Frozen{0.6, {0.077075164, 0.033809926, 0.016108272, 0.0078261326}}}) {
    int ns[4] = {5, 10, 20, 40};
    double prev = 1e300;
    for (int i = 0; i < 4; ++i) {
      double d = sup_distance(f.alpha, ns[i]);
      CHECK(d >= 0);
      CHECK(d == doctest::Approx(f.d[i]).epsilon(1e-6));
      CHECK(d < prev);
      prev = d;
    }
  }
}

TEST_CASE("Levy exponent of log Z_beta") {
  CHECK(std::abs(levy_exponent_oracle(0.5, 0.0) - 1.0) < 1e-15);
  std::complex<double> i(0, 1);
  std::complex<double> want = std::exp(specfun::log_gamma<double>(1.0 - 2.0 * i) - specfun::log_gamma<double>(1.0 - i));
  CHECK(std::abs(levy_exponent_oracle(0.5, 1.0) - want) < 1e-8);
  int pairs = 0;
  for (double b : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    for (double s : {-2.5, -0.4, 0.8, 3.0}) {
      std::complex<double> v = levy_exponent_oracle(b, s);
      CHECK(std::abs(v) <= 1.0 + 1e-12);
      CHECK_MESSAGE(std::abs(v - positive_stable_imaginary_moment(b, s)) < 1e-8, "beta=", b, " s=", s);
      ++pairs;
    }
  }
  CHECK(pairs == 20);
  CHECK_THROWS_AS(levy_exponent_oracle(1.0, 1.0), InvalidParams);
}

TEST_CASE("elementary moments") {
  CHECK(positive_stable_moment(1.0, 5.0) == 1.0);
  // E[Z_{1/2}^{-1}] = Gamma(3)/Gamma(2)
  CHECK(positive_stable_moment(0.5, -1.0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK_THROWS_AS(positive_stable_moment(0.5, 0.5), DomainError);
  CHECK(beta_fractional_moment(2.0, 3.0, 1.0) == doctest::Approx(0.4).epsilon(1e-14));
  CHECK(gamma_fractional_moment(1.0, 2.0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK_THROWS_AS(beta_fractional_moment(1.0, 1.0, -1.0), DomainError);
}

TEST_CASE("factorization of the positive part") {
  // alpha = 1, rho = 1/2, s = 1/3: both sides are sec(pi/6)
  MomentPair ex = zolotarev_factorization_check(StableParams(1.0, 0.5), 1.0 / 3);
  CHECK(ex.lhs == doctest::Approx(1 / std::cos(M_PI / 6)).epsilon(1e-13));
  CHECK(ex.rhs == doctest::Approx(1 / std::cos(M_PI / 6)).epsilon(1e-13));
  // rho = 1: the right-hand side is E[Z_alpha^s]
  MomentPair one = zolotarev_factorization_check(StableParams(0.6, 1.0), 0.3);
  CHECK(one.rhs == doctest::Approx(positive_stable_moment(0.6, 0.3)).epsilon(1e-14));
  int points = 0;
  for (auto [a, r] : {std::pair{0.5, 1.0}, std::pair{0.8, 0.7}, std::pair{1.5, 0.5}, std::pair{1.2, 0.8},
                      std::pair{1.8, 0.5}}) {
    for (double s : {-0.6, 0.4 * a}) {
      MomentPair m = zolotarev_factorization_check(StableParams(a, r), s);
      CHECK(std::abs(m.lhs - m.rhs) <= 1e-12 * std::abs(m.rhs));
      ++points;
    }
  }
  CHECK(points == 10);
  CHECK_THROWS_AS(zolotarev_factorization_check(StableParams(0.8, 0.7), 0.8), DomainError);
  CHECK_THROWS_AS(zolotarev_factorization_check(StableParams(0.8, 0.7), -1.0), DomainError);
}

TEST_CASE("Monte Carlo factorization") {
  for (auto [a, r, s] : {std::tuple{0.8, 0.7, 0.3}, std::tuple{1.5, 0.5, -0.25}}) {
    MonteCarloMoment m = zolotarev_monte_carlo(StableParams(a, r), s, 2024, 1000000);
    CHECK_MESSAGE(m.sigmas() < 3, "alpha=", a, " rho=", r, " mean=", m.mean, " exact=", m.exact);
    CHECK(m.standard_error > 0);
  }
  CHECK_THROWS_AS(zolotarev_monte_carlo(StableParams(0.8, 0.7), 0.5, 1, 100), DomainError);
}

TEST_CASE("duality") {
  MomentPair zero = duality_check(1.5, 0.5, 0.0);
  CHECK(zero.lhs == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(zero.rhs == doctest::Approx(1.0).epsilon(1e-15));
  for (auto [a, r, s] : {std::tuple{1.5, 0.5, 0.2}, std::tuple{1.2, 0.8, -0.3}, std::tuple{1.9, 0.5, 1.5},
                         std::tuple{1.5, 1 / 1.5, 0.7}, std::tuple{1.5, 1 - 1 / 1.5, -0.9}}) {
    MomentPair m = duality_check(a, r, s);
    CHECK(std::abs(m.lhs - m.rhs) <= 1e-12 * std::abs(m.rhs));
  }
  CHECK_THROWS_AS(duality_check(0.8, 0.5, 0.1), InvalidParams);
  CHECK_THROWS_AS(duality_check(1.5, 0.5, 1.6), DomainError);
}

TEST_CASE("chi-square factorization") {
  MomentPair zero = chi_square_factorization_check(0.4, 3, 0.0);
  CHECK(zero.lhs == doctest::Approx(1.0).epsilon(1e-15));
  for (auto [a, d, s] : {std::tuple{0.4, 3, 0.25}, std::tuple{0.7, 5, -0.3}, std::tuple{0.2, 9, 0.1}}) {
    MomentPair m = chi_square_factorization_check(a, d, s);
    CHECK(std::abs(m.lhs - m.rhs) <= 1e-12 * std::abs(m.rhs));
    // after cancelling E[Z_alpha^s] the identity does not involve alpha
    MomentPair other = chi_square_factorization_check(0.9, d, s);
    CHECK(m.lhs / positive_stable_moment(a, s) == doctest::Approx(other.lhs / positive_stable_moment(0.9, s)));
  }
  CHECK_THROWS_AS(chi_square_factorization_check(0.4, 4, 0.1), InvalidParams);
  CHECK_THROWS_AS(chi_square_factorization_check(0.4, 3, -0.6), DomainError);
}
