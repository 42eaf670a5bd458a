#include "doctest.h"

#include "stabletp/errors.hpp"
#include "stabletp/kernels.hpp"
#include "stabletp/quadrature.hpp"
#include "stabletp/specfun.hpp"
#include "stabletp/stable.hpp"

#include <cmath>
#include <random>

using namespace stabletp;
using namespace stabletp::kernels;

TEST_CASE("TP order values") {
  CHECK(TPOrder::finite(3).value() == 3);
  CHECK(TPOrder::infinity().is_infinite());
  CHECK_THROWS_AS(TPOrder::infinity().value(), DomainError);
  CHECK_THROWS_AS(TPOrder::finite(0), InvalidParams);
  CHECK(TPOrder::finite(2).covers(2));
  CHECK(!TPOrder::finite(2).covers(3));
  CHECK(TPOrder::infinity().covers(1000));
  CHECK(TPOrder::infinity().str() == "infinity");
  CHECK(TPOrder::finite(4).str() == "4");
}

TEST_CASE("predicate for the positive stable kernel") {
  CHECK(predict_tp_positive(1.0 / 4).is_infinite());
  CHECK(predict_tp_positive(1.0 / 3).is_infinite());
  CHECK(predict_tp_positive(0.5).is_infinite());
  CHECK(predict_tp_positive(0.4) == TPOrder::finite(2));
  CHECK(predict_tp_positive(0.45) == TPOrder::finite(2));
  CHECK(predict_tp_positive(0.3) == TPOrder::finite(3));
  CHECK(predict_tp_positive(0.6) == TPOrder::finite(1));
  CHECK(predict_tp_positive(0.9) == TPOrder::finite(1));
  CHECK_THROWS_AS(predict_tp_positive(1.0), InvalidParams);
  CHECK_THROWS_AS(predict_tp_positive(0.0), InvalidParams);
}

TEST_CASE("predicted order is non-increasing in alpha off the reciprocal integers") {
  int prev = 1 << 30;
  for (int i = 1; i < 1000; ++i) {
    double a = i / 1000.0;
    TPOrder o = predict_tp_positive(a);
    if (o.is_infinite()) continue;
    CHECK(o.value() <= prev);
    prev = o.value();
  }
}

TEST_CASE("predicate for the general stable kernel") {
  using stable::StableParams;
  CHECK(predict_tp_general(StableParams(0.5, 0.5)).is_infinite());
  CHECK(predict_tp_general(StableParams(0.7, 0.5)) == TPOrder::finite(2));
  CHECK(predict_tp_general(StableParams(1.25, 0.8)) == TPOrder::finite(1));
  CHECK(predict_tp_general(StableParams(1.5, 0.6)) == TPOrder::finite(1));
  CHECK_THROWS_AS(predict_tp_general(StableParams(0.5, 1.0)), InvalidParams);
  for (double r : {0.2, 0.25, 1.0 / 3, 0.4, 0.45, 0.6, 0.9}) {
    CHECK(predict_tp_general(StableParams(1.0, r)) == predict_tp_positive(r));
  }
}

TEST_CASE("predicate for the fractional integration kernel") {
  CHECK(predict_tp_fractional(2.5) == TPOrder::finite(3));
  CHECK(predict_tp_fractional(3.0).is_infinite());
  CHECK(predict_tp_fractional(1.0).is_infinite());
  CHECK(predict_tp_fractional(0.5) == TPOrder::finite(1));
  CHECK_THROWS_AS(predict_tp_fractional(-1.0), InvalidParams);
}

TEST_CASE("positive stable kernel") {
  Kernel k = positive_stable_kernel(0.5);
  double levy = std::exp(-0.25) / (2 * std::sqrt(M_PI));
  CHECK(k(1.0, 1.0) == doctest::Approx(levy).epsilon(1e-14));
  Kernel k7 = positive_stable_kernel(0.7);
  double f1 = stable::density<double>(stable::StableParams(0.7, 1), 1.0, {});
  for (double x : {0.01, 0.3, 2.0, 50.0}) CHECK(k7(x, x) == doctest::Approx(f1).epsilon(1e-13));
  CHECK(positive_stable_kernel(1.0 / 3).predicted_order()->is_infinite());
  CHECK_THROWS_AS(positive_stable_kernel(1.2), InvalidParams);
  // the high-precision evaluator agrees with the double one
  PrecisionScope scope(40);
  mp_real v = k7.evaluate(mp_real("0.7"), mp_real(2), Precision(30));
  CHECK(v.convert_to<double>() == doctest::Approx(k7(0.7, 2.0)).epsilon(1e-12));
}

TEST_CASE("stable convolution kernel") {
  using stable::StableParams;
  CHECK(stable_convolution_kernel(StableParams(0.5, 0.5)).predicted_order()->is_infinite());
  CHECK(*stable_convolution_kernel(StableParams(0.7, 0.5)).predicted_order() == TPOrder::finite(2));
  CHECK(*stable_convolution_kernel(StableParams(1.0, 0.4)).predicted_order() == predict_tp_positive(0.4));
  CHECK(*stable_convolution_kernel(StableParams(1.5, 1 / 1.5)).predicted_order() == TPOrder::finite(1));
  CHECK_THROWS_AS(stable_convolution_kernel(StableParams(0.5, 1.0)), InvalidParams);
  Kernel k = stable_convolution_kernel(StableParams(1.2, 0.45));
  CHECK(k(3.0, 2.0) == doctest::Approx(stable::density<double>(StableParams(1.2, 0.45), 1.5, {})));
}

TEST_CASE("Cauchy-type kernel") {
  Kernel k = cauchy_type_kernel(0.5);
  CHECK(k(1.0, 2.0) == doctest::Approx(1.0 / 5).epsilon(1e-15));
  CHECK(k(3.0, 4.0) == doctest::Approx(1.0 / 25).epsilon(1e-15));
  CHECK(cauchy_type_kernel(1.0 / 3)(1.0, 1.0) == doctest::Approx(1.0 / 3).epsilon(1e-15));
  CHECK(*cauchy_type_kernel(0.4).predicted_order() == TPOrder::finite(2));
}

TEST_CASE("Cauchy-type kernel is the alpha = 1 space-time density up to a factor") {
  for (double a : {0.2, 0.5, 0.8}) {
    Kernel k = cauchy_type_kernel(a);
    stable::StableParams p(1.0, a);
    for (double t : {0.3, 1.0, 4.0}) {
      for (double x : {0.1, 1.0, 7.0}) {
        double p1 = stable::spacetime_density<double>(p, t, x, {});
        CHECK(std::abs(M_PI / (t * std::sin(M_PI * a)) * p1 - k(t, x)) < 1e-10 * k(t, x));
      }
    }
  }
}

TEST_CASE("Chebyshev generating function converges to the Cauchy-type kernel") {
  for (double a : {0.3, 0.5, 0.7}) {
    Kernel k = cauchy_type_kernel(a);
    double c = std::cos(M_PI * a);
    for (double z = 0.0; z <= 0.9 + 1e-12; z += 0.05) {
      double s = 0;
      double zn = 1;
      for (unsigned n = 0; n <= 200; ++n) {
        s += (n % 2 == 0 ? 1 : -1) * zn * specfun::chebyshev_u<double>(n, c);
        zn *= z;
      }
      // closed-form remainder of the truncated generating function, w = -z
      double w = -z;
      double w201 = std::pow(w, 201);
      double rem = (specfun::chebyshev_u<double>(201, c) * w201 - specfun::chebyshev_u<double>(200, c) * w201 * w) /
                   (1 + 2 * c * z + z * z);
      CHECK(std::abs(s + rem - k(1.0, z)) < 1e-13);
      if (z <= 0.8 + 1e-12) CHECK(std::abs(s - k(1.0, z)) < 1e-12);
    }
  }
}

TEST_CASE("fractional integration kernel") {
  Kernel one = fractional_integration_kernel(1.0);
  CHECK(one(1.0, 2.0) == 1.0);
  CHECK(one(2.0, 2.0) == 1.0);
  CHECK(one(3.0, 2.0) == 0.0);
  Kernel k = fractional_integration_kernel(2.5);
  CHECK(k(1.0, 5.0) == doctest::Approx(8.0));
  CHECK(k(5.0, 1.0) == 0.0);
  CHECK(*k.predicted_order() == TPOrder::finite(3));
  CHECK(fractional_integration_kernel(3.0).predicted_order()->is_infinite());
  CHECK_THROWS_AS(fractional_integration_kernel(0.5)(1.0, 1.0), DomainError);
  PrecisionScope scope(40);
  CHECK(k.evaluate(mp_real(1), mp_real(5), Precision(30)) == 8);
}

TEST_CASE("Gaussian space-time kernel") {
  Kernel k = gaussian_spacetime_kernel();
  CHECK(k(1.0, 0.0) == doctest::Approx(1 / (2 * std::sqrt(M_PI))).epsilon(1e-15));
  CHECK(k(2.0, 1.5) == k(2.0, -1.5));
  double det = k(1.0, 0.0) * k(2.0, 1.0) - k(1.0, 1.0) * k(2.0, 0.0);
  CHECK(det > 0);
  CHECK(k.predicted_order()->is_infinite());
}

TEST_CASE("radial kernel: quadrature, series and Mellin-Barnes agree") {
  stable::EvalConfig cfg;
  auto s = radial::series<double>(0.3, 2, 10.0, cfg);
  REQUIRE(s.has_value());
  CHECK(std::abs(radial::density<double>(0.3, 2, 10.0, cfg) - *s) < 1e-8 * *s);
  // d = 2 series reproduces the displayed Gamma(1 + q alpha)^2 form divided by pi
  double a = 1.0 / 3;
  double direct = 0;
  for (int q = 1; q <= 60; ++q) {
    double t = std::pow(std::tgamma(1 + q * a), 2) / std::tgamma(q + 1.0) * std::sin(M_PI * q * a) *
               std::pow(1.0, -q * a - 1);
    direct += (q % 2 == 1 ? t : -t);
  }
  CHECK(radial::density<double>(a, 2, 1.0, cfg) == doctest::Approx(direct / M_PI).epsilon(1e-9));
  PrecisionScope scope(50);
  stable::EvalConfig mp_cfg;
  mp_cfg.precision = Precision(40);
  for (auto [al, d, z] : {std::tuple{0.7, 2, 3.0}, std::tuple{0.4, 1, 0.05}, std::tuple{0.55, 3, 20.0}}) {
    mp_real v = radial::density<mp_real>(al, d, mp_real(z), mp_cfg);
    CHECK(std::abs(v.convert_to<double>() - radial::density<double>(al, d, z, cfg)) < 1e-9 * v.convert_to<double>());
  }
  // series and Mellin-Barnes at high precision, alpha < 1/2
  mp_real ser = *radial::series<mp_real>(0.3, 2, mp_real(10), mp_cfg);
  mp_real mb = radial::mellin_barnes_density(0.3, 2, mp_real(10), mp_cfg);
  CHECK(abs(ser - mb) < mp_real("1e-35") * ser);
}

TEST_CASE("radial density integrates to one") {
  stable::EvalConfig cfg;
  for (auto [a, d] : {std::pair{1.0 / 3, 1}, std::pair{0.4, 2}, std::pair{0.7, 3}}) {
    auto f = [&](double z) { return radial::density<double>(a, d, z, cfg); };
    double lower = quad::tanh_sinh<double>(f, 0.0, 1.0, 1e-10).value;
    double upper = quad::exp_sinh<double>(f, 1.0, 1e-10).value;
    CHECK(lower + upper == doctest::Approx(1.0).epsilon(1e-6));
  }
  CHECK(radial_kernel(1.0 / 3, 2).predicted_order()->is_infinite());
  CHECK(radial_kernel(1.0 / 3, 5).predicted_order()->is_infinite());
  CHECK(*radial_kernel(0.4, 2).predicted_order() == TPOrder::finite(2));
}

TEST_CASE("every kernel is nonnegative at random points") {
  std::vector<Kernel> ks = {positive_stable_kernel(0.45),
                            stable_convolution_kernel(stable::StableParams(1.3, 0.5)),
                            cauchy_type_kernel(0.7),
                            fractional_integration_kernel(1.7),
                            radial_kernel(0.4, 2),
                            gaussian_spacetime_kernel()};
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(-2, 2);
  for (const Kernel& k : ks) {
    bool ok = true;
    for (int i = 0; i < 3000; ++i) {
      double x = std::pow(10.0, u(gen));
      double y = std::pow(10.0, u(gen));
      double v = k(x, y);
      if (!(v >= 0)) ok = false;
    }
    CHECK_MESSAGE(ok, k.name());
  }
}
