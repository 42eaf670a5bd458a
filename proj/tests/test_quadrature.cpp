#include "doctest.h"

#include "stabletp/quadrature.hpp"

#include <cmath>

using namespace stabletp;

TEST_CASE("tanh-sinh on endpoint singularities") {
  auto r = quad::tanh_sinh<double>([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, 1e-12);
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(2.0).epsilon(1e-12));
  auto l = quad::tanh_sinh<double>([](double x) { return std::log(x); }, 0.0, 1.0, 1e-12);
  CHECK(l.value == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("half-line and whole-line rules") {
  auto e = quad::exp_sinh<double>([](double x) { return std::exp(-x) * std::pow(x, 1.5); }, 0.0, 1e-12);
  CHECK(e.value == doctest::Approx(std::tgamma(2.5)).epsilon(1e-11));
  auto c = quad::exp_sinh<double>([](double x) { return 1.0 / (1.0 + x * x); }, 0.0, 1e-12);
  CHECK(c.value == doctest::Approx(M_PI / 2).epsilon(1e-11));
  auto g = quad::sinh_sinh<double>([](double x) { return std::exp(-x * x); }, 1e-12);
  CHECK(g.value == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-12));
}

TEST_CASE("mp quadrature reaches high precision") {
  PrecisionScope scope(60);
  auto r = quad::tanh_sinh<mp_real>([](const mp_real& x) { return 4 / (1 + x * x); }, mp_real(0), mp_real(1),
                                    mp_real("1e-55"));
  CHECK(r.converged);
  CHECK(abs(r.value - pi<mp_real>()) < mp_real("1e-55"));
  auto e = quad::exp_sinh<mp_real>([](const mp_real& x) { return exp(-x); }, mp_real(0), mp_real("1e-55"));
  CHECK(abs(e.value - 1) < mp_real("1e-54"));
}
