#pragma once

#include "stabletp/precision.hpp"
#include "stabletp/stable.hpp"

#include <functional>
#include <optional>
#include <string>

namespace stabletp::kernels {

// Order of total positivity; infinity is its own state.
class TPOrder {
 public:
  static TPOrder finite(int n);
  static TPOrder infinity() { return TPOrder(0, true); }

  bool is_infinite() const { return infinite_; }
  int value() const;  // throws for infinity
  bool covers(int m) const { return infinite_ || m <= n_; }
  std::string str() const;

  bool operator==(const TPOrder& o) const { return infinite_ == o.infinite_ && n_ == o.n_; }

 private:
  TPOrder(int n, bool inf) : n_(n), infinite_(inf) {}
  int n_;
  bool infinite_;
};

// A nonnegative kernel K(x, y) on the open positive quadrant. The double and high-precision
// evaluators are fixed at construction, together with whatever quadrature budget they use.
class Kernel {
 public:
  using DoubleEval = std::function<double(double, double)>;
  // evaluated at the working precision given; returns a value rounded to that precision
  using MpEval = std::function<mp_real(const mp_real&, const mp_real&, const Precision&)>;

  Kernel(std::string name, DoubleEval f, MpEval g, std::optional<TPOrder> predicted);

  const std::string& name() const { return name_; }
  std::optional<TPOrder> predicted_order() const { return predicted_; }

  double operator()(double x, double y) const { return f_(x, y); }
  mp_real evaluate(const mp_real& x, const mp_real& y, const Precision& prec) const;

 private:
  std::string name_;
  DoubleEval f_;
  MpEval g_;
  std::optional<TPOrder> predicted_;
};

// floor(1/alpha), or infinity when 1/alpha is an integer >= 2
TPOrder predict_tp_positive(double alpha);
// infinity when gamma and delta are both integers, floor(min(gamma, delta)) + 1 otherwise
TPOrder predict_tp_general(const stable::StableParams& p);
// infinity for integer beta, otherwise the largest n with beta > n - 1
TPOrder predict_tp_fractional(double beta);

// K(x, y) = f_alpha(x / y) for the positive stable law
Kernel positive_stable_kernel(double alpha, const stable::EvalConfig& cfg = {});
// K(x, y) = f_{alpha,rho}(x / y), rho in (0, 1)
Kernel stable_convolution_kernel(const stable::StableParams& p, const stable::EvalConfig& cfg = {});
// K(t, x) = 1 / (t^2 + 2 cos(pi alpha) t x + x^2)
Kernel cauchy_type_kernel(double alpha);
// K(x, y) = (y - x)_+^{beta - 1}
Kernel fractional_integration_kernel(double beta);
// K(t, r) = f_{alpha,d}(r / t), the density of Gamma_{d/2} x Z_alpha
Kernel radial_kernel(double alpha, int d, const stable::EvalConfig& cfg = {});
// K(t, x) = exp(-x^2 / 4t) / (2 sqrt(pi t))
Kernel gaussian_spacetime_kernel();

namespace radial {

// Density of Gamma_{d/2} x Z_alpha. The double path integrates the mixture over the stable
// factor; the high-precision path sums the series when it converges and otherwise integrates
// the Mellin-Barnes representation.
template <class Real>
Real density(double alpha, int d, const Real& z, const stable::EvalConfig& cfg);

// The Mellin-Barnes integral alone, at cfg.precision plus the guard digits it needs.
mp_real mellin_barnes_density(double alpha, int d, const mp_real& z, const stable::EvalConfig& cfg);

// Tail series (1/pi) sum_q (-1)^{q-1} Gamma(1+q alpha) Gamma(d/2+q alpha) / (Gamma(d/2) q!)
//   sin(pi q alpha) z^{-q alpha-1}; convergent for alpha < 1/2. Empty if it does not reach
// the requested accuracy.
template <class Real>
std::optional<Real> series(double alpha, int d, const Real& z, const stable::EvalConfig& cfg);

}  // namespace radial

}  // namespace stabletp::kernels
