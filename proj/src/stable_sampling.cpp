#include "stabletp/errors.hpp"
#include "stabletp/stable.hpp"

#include <cmath>
#include <random>

namespace stabletp::stable {

// Chambers-Mallows-Stuck transform in the (alpha, rho) parametrisation. With
// B = pi (rho - 1/2), U uniform on (-pi/2, pi/2) and W standard exponential:
//   X = sin(alpha (U + B)) / cos(U)^{1/alpha} * (cos(U - alpha (U + B)) / W)^{(1-alpha)/alpha}.
std::vector<double> sample(const StableParams& p, std::uint64_t seed, std::size_t count) {
  if (p.rho == 0.0) throw InvalidParams("sample: rho must be positive");
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> uni(-M_PI / 2, M_PI / 2);
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> out;
  out.reserve(count);
  const double a = p.alpha;
  const double b = M_PI * (p.rho - 0.5);
  for (std::size_t i = 0; i < count; ++i) {
    double u = uni(gen);
    double w = expo(gen);
    if (a == 1.0) {
      out.push_back(-std::cos(M_PI * p.rho) + std::sin(M_PI * p.rho) * std::tan(u));
      continue;
    }
    double s = std::sin(a * (u + b)) / std::pow(std::cos(u), 1.0 / a);
    double t = std::pow(std::cos(u - a * (u + b)) / w, (1.0 - a) / a);
    out.push_back(s * t);
  }
  return out;
}

// Kanter's representation: Z = (A(U) / E)^{(1-beta)/beta} with U uniform on (0, pi),
// A(u) = (sin(beta u) / sin u)^{1/(1-beta)} sin((1-beta) u) / sin(beta u).
std::vector<double> sample_positive_stable(double beta, std::uint64_t seed, std::size_t count) {
  if (!(beta > 0.0) || beta > 1.0) throw InvalidParams("sample_positive_stable: beta must lie in (0, 1]");
  std::vector<double> out;
  out.reserve(count);
  if (beta == 1.0) {
    out.assign(count, 1.0);
    return out;
  }
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> uni(0.0, M_PI);
  std::exponential_distribution<double> expo(1.0);
  for (std::size_t i = 0; i < count; ++i) {
    double u = uni(gen);
    double e = expo(gen);
    double a = std::pow(std::sin(beta * u) / std::sin(u), 1.0 / (1.0 - beta)) * std::sin((1.0 - beta) * u) /
               std::sin(beta * u);
    out.push_back(std::pow(a / e, (1.0 - beta) / beta));
  }
  return out;
}

}  // namespace stabletp::stable
