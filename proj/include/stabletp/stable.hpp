#pragma once

#include "stabletp/precision.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace stabletp::stable {

// Strictly stable law with index alpha and positivity parameter rho = P(X > 0).
struct StableParams {
  double alpha;
  double rho;

  StableParams(double alpha, double rho);

  double gamma_param() const;  // 1/rho - 1
  double delta_param() const;  // 1/(rho alpha) - 1
  StableParams reflected() const { return StableParams(alpha, 1.0 - rho); }
};

struct EvalConfig {
  Precision precision{};
  int series_terms = 200;
  double quadrature_rel_tol = 1e-10;
  // When set, forces the series for x beyond (alpha < 1) or below (alpha > 1) this abscissa
  // and the integral representation elsewhere. Unset means the choice is made per point from
  // the size of the series terms.
  std::optional<double> regime_switch_x;

  void validate() const;
};

// f_{alpha,rho}(x).
template <class Real>
Real density(const StableParams& p, const Real& x, const EvalConfig& cfg);

// log f_{alpha,rho}(x); -inf where the density vanishes.
template <class Real>
Real log_density(const StableParams& p, const Real& x, const EvalConfig& cfg);

// j-th derivative f^{(j)}_{alpha,rho}(x), 1 <= j <= 8.
template <class Real>
Real density_derivative(const StableParams& p, int j, const Real& x, const EvalConfig& cfg);

// x f'(x) / f(x) for x > 0 with f(x) > 0.
template <class Real>
Real log_derivative(const StableParams& p, const Real& x, const EvalConfig& cfg);

// f^{(j-1)}_{alpha,rho}(0) = (-1)^{j-1} Gamma(1 + j/alpha) sin(pi j rho) / (pi j), j >= 1.
// Evaluated at the precision currently in scope.
template <class Real>
Real derivative_at_zero(const StableParams& p, int j);

// Term-by-term differentiated tail series sum_q (1/pi)(-1)^{q-1} Gamma(1+q alpha)
// sin(pi q rho alpha) x^{-q alpha - 1} / q! for x > 0. Returns nothing when the series
// (convergent for alpha < 1, asymptotic otherwise) cannot deliver full accuracy.
template <class Real>
std::optional<Real> tail_series(const StableParams& p, int j, const Real& x, const EvalConfig& cfg);

// Taylor series at the origin with coefficients derivative_at_zero; convergent for alpha > 1
// and summed only up to its least term for alpha < 1.
template <class Real>
std::optional<Real> taylor_series(const StableParams& p, int j, const Real& x, const EvalConfig& cfg);

// Single-integral representation of the density (alpha != 1), evaluated in log domain.
template <class Real>
Real integral_log_density(const StableParams& p, const Real& x, const EvalConfig& cfg);

// Independent inversion oracle: Laplace-contour integral for alpha < 1 and x != 0,
// Fourier inversion of the characteristic function otherwise. Double precision only.
double density_inversion(const StableParams& p, double x, const EvalConfig& cfg);

// int_0^inf f_alpha(x) e^{-lambda x} dx for the positive law (rho = 1), alpha in (0,1).
double laplace_oracle(double alpha, double lambda, const EvalConfig& cfg);

// int_0^inf f_{alpha,rho}(x) dx.
double positive_mass(const StableParams& p, const EvalConfig& cfg);

// n-th derivative of q(x) = (1/pi) int_0^inf cos(t x) exp(-t^{2 alpha_sub}) dt.
template <class Real>
Real symmetric_density(double alpha_sub, int n, const Real& x, const EvalConfig& cfg);

// The same derivative through the Hermite mixture over the positive law of index alpha_sub.
double symmetric_density_hermite(double alpha_sub, int n, double x, const EvalConfig& cfg);

// Unique positive mode of the positive law (rho = 1, alpha < 1).
double mode(const StableParams& p, const EvalConfig& cfg);

// E[(X^+)^s] = sin(pi rho s) / (rho sin(pi s)) * Gamma(1 - s/alpha) / Gamma(1 - s), -1 < s < alpha,
// at the precision currently in scope.
template <class Real>
Real fractional_moment_positive_part(const StableParams& p, const Real& s);

// p_{alpha,rho}(t, x) = t^{-1/alpha} f_{alpha,rho}(x t^{-1/alpha}).
template <class Real>
Real spacetime_density(const StableParams& p, const Real& t, const Real& x, const EvalConfig& cfg);

// Seeded draws of X_{alpha,rho}.
std::vector<double> sample(const StableParams& p, std::uint64_t seed, std::size_t count);

// Seeded draws of the positive stable variable Z_beta, beta in (0,1].
std::vector<double> sample_positive_stable(double beta, std::uint64_t seed, std::size_t count);

}  // namespace stabletp::stable
