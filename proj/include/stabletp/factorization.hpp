#pragma once

#include "stabletp/stable.hpp"

#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

namespace stabletp::factorization {

// One factor scale * B_{a,b} of the Beta-product approximation of X_alpha = Z_alpha^{-alpha}.
struct BetaFactor {
  double a;      // 1 + k/alpha
  double b;      // 1/alpha - 1
  double scale;  // exp(psi((1+k)/alpha) - psi(1+k/alpha)) > 1
};

struct BetaProductSpec {
  double alpha;
  int n;
  std::vector<BetaFactor> factors;  // n + 1 entries
  double global_scale;              // exp(gamma_E (alpha - 1))
};

BetaProductSpec beta_product_spec(double alpha, int n);

// E[X_alpha^{is}] = Gamma(1 + is) / Gamma(1 + i alpha s).
std::complex<double> h_hat(double alpha, double s);

// Characteristic function of log X_{alpha,n}.
std::complex<double> h_hat_n(double alpha, int n, double s);

using CharacteristicFunction = std::function<std::complex<double>(double)>;

struct InversionConfig {
  double abs_tol = 1e-9;       // target absolute error of each density value
  double max_cutoff = 1e5;     // largest truncation point of the s-integral
  int max_refinements = 4;     // panel halvings allowed beyond the starting width
};

// (1/2 pi) int cf(s) e^{-isx} ds for the density of a real random variable. The integral is
// truncated where the power-law tail estimate falls below tolerance and evaluated on Gauss-Legendre
// panels, halving the panel width until two successive widths agree. Throws DomainError when
// |cf(s)| s^{1.5} grows on [1e2, 1e3] (the inversion integral may not converge) and NonConvergence
// when no cutoff below max_cutoff is accurate enough.
double density_from_cf(const CharacteristicFunction& cf, double x, const InversionConfig& cfg = {});
std::vector<double> density_from_cf(const CharacteristicFunction& cf, const std::vector<double>& xs,
                                    const InversionConfig& cfg = {});

// 400 equally spaced points on [-10, 10], the log-scale image of [e^-10, e^10].
std::vector<double> sup_distance_grid();

// max over sup_distance_grid() of |h_alpha(x) - h_{alpha,n}(x)|, both densities of log X by inversion.
double sup_distance(double alpha, int n, const InversionConfig& cfg = {});

// exp of the Levy-Khintchine exponent of log Z_beta, by quadrature, evaluated so that it
// reproduces E[Z_beta^{is}] = Gamma(1 - is/beta) / Gamma(1 - is).
std::complex<double> levy_exponent_oracle(double beta, double s, double rel_tol = 1e-12);
std::complex<double> positive_stable_imaginary_moment(double beta, double s);

// E[Z_beta^u] = Gamma(1 - u/beta) / Gamma(1 - u), u < beta; Z_1 = 1.
double positive_stable_moment(double beta, double u);
// E[B_{a,b}^s] = Gamma(a + s) Gamma(a + b) / (Gamma(a) Gamma(a + b + s)), s > -a.
double beta_fractional_moment(double a, double b, double s);
// E[Gamma_c^s] = Gamma(c + s) / Gamma(c), s > -c.
double gamma_fractional_moment(double c, double s);

struct MomentPair {
  double lhs;
  double rhs;
};

// E[(X+)^s] against E[Z_{alpha rho}^{rho s}] E[Z_rho^{-rho s}], -1 < s < alpha.
MomentPair zolotarev_factorization_check(const stable::StableParams& p, double s);
// E[(X+_{alpha,rho})^s] against E[(X+_{1/alpha, alpha rho})^{-s/alpha}], alpha in (1,2).
MomentPair duality_check(double alpha, double rho, double s);
// E[Gamma_{1/2}^s] E[Z_alpha^s] against E[Gamma_{d/2}^s] E[Z_alpha^s] E[B_{1/2,(d-1)/2}^s], d odd >= 3.
MomentPair chi_square_factorization_check(double alpha, int d, double s);

struct MonteCarloMoment {
  double mean;
  double standard_error;
  double exact;
  double sigmas() const;  // |mean - exact| / standard_error
};

// Empirical E[Y^s] for Y = (Z_{alpha rho} / Z_rho)^rho from count independent pairs.
MonteCarloMoment zolotarev_monte_carlo(const stable::StableParams& p, double s, std::uint64_t seed,
                                       std::size_t count);

}  // namespace stabletp::factorization
