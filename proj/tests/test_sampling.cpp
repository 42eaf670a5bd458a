#include "doctest.h"

#include "stabletp/errors.hpp"
#include "stabletp/stable.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace stabletp;
using namespace stabletp::stable;

namespace {

struct Moments {
  double mean;
  double stderr_;
};

template <class F>
Moments mean_of(const std::vector<double>& xs, F&& f) {
  double s = 0;
  double s2 = 0;
  for (double x : xs) {
    double v = f(x);
    s += v;
    s2 += v * v;
  }
  double n = static_cast<double>(xs.size());
  double m = s / n;
  return {m, std::sqrt(std::max(0.0, s2 / n - m * m) / n)};
}

}  // namespace

TEST_CASE("sampler is deterministic for a seed") {
  StableParams p(1.3, 0.4);
  CHECK(sample(p, 42, 100) == sample(p, 42, 100));
  CHECK(sample(p, 42, 100) != sample(p, 43, 100));
  CHECK(sample_positive_stable(0.6, 9, 50) == sample_positive_stable(0.6, 9, 50));
  CHECK(sample(p, 1, 0).empty());
  CHECK_THROWS_AS(sample(StableParams(0.5, 0.0), 1, 10), InvalidParams);
  CHECK_THROWS_AS(sample_positive_stable(1.2, 1, 10), InvalidParams);
  auto ones = sample_positive_stable(1.0, 3, 10);
  CHECK(std::all_of(ones.begin(), ones.end(), [](double v) { return v == 1.0; }));
}

TEST_CASE("positivity probability matches rho") {
  const std::size_t n = 1000000;
  for (auto [a, r] : {std::pair{1.0, 0.3}, std::pair{1.5, 0.6}, std::pair{0.7, 0.4}}) {
    auto xs = sample(StableParams(a, r), 2024, n);
    auto m = mean_of(xs, [](double x) { return x > 0 ? 1.0 : 0.0; });
    CHECK(std::abs(m.mean - r) < 3 * std::sqrt(r * (1 - r) / n));
  }
  auto one_sided = sample(StableParams(0.6, 1.0), 5, 10000);
  CHECK(std::all_of(one_sided.begin(), one_sided.end(), [](double v) { return v > 0; }));
}

TEST_CASE("Gaussian case has variance 2") {
  auto xs = sample(StableParams(2.0, 0.5), 11, 1000000);
  auto m = mean_of(xs, [](double x) { return x * x; });
  // Var(X^2) = 3 * 4 - 4 = 8 for N(0, 2)
  CHECK(std::abs(m.mean - 2.0) < 3 * std::sqrt(8.0 / 1e6));
}

TEST_CASE("positive stable sampler: Laplace transform and inverse moment") {
  auto zs = sample_positive_stable(0.5, 77, 1000000);
  auto inv = mean_of(zs, [](double z) { return 1 / z; });
  // E[Z^{-1}] = Gamma(1 + 1/beta) / Gamma(2) = 2, E[Z^{-2}] = Gamma(1 + 2/beta) / Gamma(3) = 12
  CHECK(std::abs(inv.mean - 2.0) < 3 * std::sqrt((12.0 - 4.0) / 1e6));
  for (double beta : {0.3, 0.8}) {
    auto ws = sample_positive_stable(beta, 5, 1000000);
    auto lt = mean_of(ws, [](double z) { return std::exp(-z); });
    double want = std::exp(-1.0);
    double var = std::exp(-std::pow(2.0, beta)) - want * want;
    CHECK(std::abs(lt.mean - want) < 3 * std::sqrt(var / 1e6));
  }
  // the general sampler with rho = 1 targets the same law
  auto cms = sample(StableParams(0.5, 1.0), 78, 1000000);
  auto inv2 = mean_of(cms, [](double z) { return 1 / z; });
  CHECK(std::abs(inv2.mean - 2.0) < 3 * std::sqrt(8.0 / 1e6));
}

TEST_CASE("conditional fractional moments of the positive part") {
  const std::size_t n = 1000000;
  for (auto [a, r, s] : {std::tuple{1.5, 0.6, 0.4}, std::tuple{0.7, 0.4, 0.3}}) {
    StableParams p(a, r);
    auto xs = sample(p, 99, n);
    std::vector<double> pos;
    for (double x : xs) {
      if (x > 0) pos.push_back(x);
    }
    auto m = mean_of(pos, [s = s](double x) { return std::pow(x, s); });
    // the second moment of X^s is finite here (2 s < alpha)
    double want = fractional_moment_positive_part<double>(p, s);
    double second = fractional_moment_positive_part<double>(p, 2 * s);
    double sigma = std::sqrt((second - want * want) / static_cast<double>(pos.size()));
    CHECK(std::abs(m.mean - want) < 3 * sigma);
  }
}

TEST_CASE("empirical distribution function against the integrated density") {
  StableParams p(1.5, 0.6);
  auto xs = sample(p, 3, 1000000);
  EvalConfig cfg;
  for (double t : {-1.5, 0.5, 2.0}) {
    auto f = [&](double x) { return density<double>(p, x, cfg); };
    double cdf = (1 - p.rho) + (t > 0 ? 1 : -1) * boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
                                                       f, std::min(0.0, t), std::max(0.0, t), 12, 1e-12);
    double emp = std::count_if(xs.begin(), xs.end(), [t](double x) { return x <= t; }) / 1e6;
    CHECK(std::abs(emp - cdf) < 3 * std::sqrt(cdf * (1 - cdf) / 1e6));
  }
}
