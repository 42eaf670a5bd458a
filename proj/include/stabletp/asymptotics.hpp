#pragma once

#include "stabletp/precision.hpp"
#include "stabletp/stable.hpp"
#include "stabletp/tp.hpp"

#include <functional>
#include <vector>

namespace stabletp::asymptotics {

struct DeltaSeriesConfig {
  int q_max = 40;          // terms of the tail series used for alpha < 1 at large z
  double fd_step = 1e-2;   // base step of the finite differences, relative to max(1, |z|)
  int fd_levels = 8;       // Richardson levels

  void validate() const;
};

struct DeltaValue {
  mp_real value;
  mp_real hadamard_scale;
  tp::Sign classification;  // same rule as for kernel minors
};

// Delta^k(z) = (-1)^{k(k-1)/2} det[(z^{j-1} f^{(j-1)}(z))^{(i-1)}], 1 <= k <= 5, z >= 0.
// For alpha < 1 and z large enough that q_max tail terms resolve every entry, the entries come
// from the differentiated tail series; otherwise from density_derivative via Leibniz' rule.
DeltaValue delta_k_value(const stable::StableParams& p, int k, double z, const DeltaSeriesConfig& dcfg = {},
                         const stable::EvalConfig& cfg = {});
double delta_k(const stable::StableParams& p, int k, double z, const DeltaSeriesConfig& dcfg = {},
               const stable::EvalConfig& cfg = {});

// Whether delta_k at (p, k, z) is taken from the truncated tail series: alpha < 1 and the first
// omitted term is below 1e-30 of the largest one.
bool delta_k_uses_series(const stable::StableParams& p, int k, double z, const DeltaSeriesConfig& dcfg,
                         const stable::EvalConfig& cfg);

// Closed form of Delta^k(0): prod_j (j-1)! Gamma(1 + j/alpha) sin(pi j rho) / (pi^k k!).
double delta_k_at_zero(const stable::StableParams& p, int k);

// Least-squares slope of log |Delta^k| against log z; the default grid is 21 log-spaced points
// on [1e2, 1e4].
double tail_exponent_fit(const stable::StableParams& p, int k, const std::vector<double>& z_grid = {},
                         const DeltaSeriesConfig& dcfg = {}, const stable::EvalConfig& cfg = {});

// -k(k+1)(alpha+1)/2
double predicted_tail_exponent(double alpha, int k);

struct Identity {
  double lhs;
  double rhs;
};

// Sum over sigma in S_k of det[Gamma(j + sigma(i) alpha) prod_{r<i} (r + sigma(i) alpha)] against
// alpha^{k(k-1)} prod_j ((j-1)!)^2 Gamma(1 + alpha j), k <= 4.
Identity leading_coefficient_identity(double alpha, int k);
// The same sum with row i also multiplied by Gamma(1 + sigma(i) alpha), against
// alpha^{k(k-1)} (prod_j (j-1)! Gamma(1 + alpha j))^2.
Identity radial_leading_identity(double alpha, int k);

using SmoothFunction = std::function<mp_real(const mp_real&)>;

// det[f_j^{(i-1)}(z)] with derivatives from Richardson-extrapolated central differences,
// carried out at prec plus guard digits.
mp_real wronskian(const std::vector<SmoothFunction>& fs, const mp_real& z, const DeltaSeriesConfig& dcfg,
                  const Precision& prec);

// g_j(z) = (-1)^{j-1} z^{j-1} f^{(j-1)}(z), whose Wronskian is Delta^k.
std::vector<SmoothFunction> delta_generators(const stable::StableParams& p, int k, const stable::EvalConfig& cfg);

}  // namespace stabletp::asymptotics
