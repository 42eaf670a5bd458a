#include "stabletp/kernels.hpp"

#include "stabletp/errors.hpp"

#include <cmath>
#include <limits>

namespace stabletp::kernels {

TPOrder TPOrder::finite(int n) {
  if (n < 1) throw InvalidParams("TP order must be at least 1");
  return TPOrder(n, false);
}

int TPOrder::value() const {
  if (infinite_) throw DomainError("TP order is infinite");
  return n_;
}

std::string TPOrder::str() const { return infinite_ ? "infinity" : std::to_string(n_); }

Kernel::Kernel(std::string name, DoubleEval f, MpEval g, std::optional<TPOrder> predicted)
    : name_(std::move(name)), f_(std::move(f)), g_(std::move(g)), predicted_(predicted) {}

mp_real Kernel::evaluate(const mp_real& x, const mp_real& y, const Precision& prec) const {
  PrecisionScope scope(prec);
  return at_scope(g_(at_scope(x), at_scope(y), prec));
}

namespace {

bool is_nonneg_integer(double v) { return v > -1e-9 && near_integer(v, 1e-9); }

// floor that does not drop a value sitting on an integer by round-off
int robust_floor(double v) {
  double r = std::round(v);
  if (std::abs(v - r) <= 1e-9 * std::max(1.0, std::abs(v))) return static_cast<int>(r);
  return static_cast<int>(std::floor(v));
}

std::string fmt(double v) { return shortest_decimal(v); }

stable::EvalConfig with_precision(const stable::EvalConfig& cfg, const Precision& prec) {
  stable::EvalConfig c = cfg;
  c.precision = prec;
  return c;
}

}  // namespace

TPOrder predict_tp_positive(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidParams("predict_tp_positive: alpha must lie in (0, 1)");
  double inv = 1.0 / alpha;
  if (near_integer(inv, 1e-9) && std::round(inv) >= 2) return TPOrder::infinity();
  return TPOrder::finite(std::max(1, static_cast<int>(std::floor(inv))));
}

TPOrder predict_tp_general(const stable::StableParams& p) {
  if (!(p.rho > 0.0 && p.rho < 1.0)) throw InvalidParams("predict_tp_general: rho must lie in (0, 1)");
  if (!(p.alpha < 2.0)) throw InvalidParams("predict_tp_general: alpha must be below 2");
  double g = p.gamma_param();
  double d = p.delta_param();
  if (is_nonneg_integer(g) && is_nonneg_integer(d)) return TPOrder::infinity();
  return TPOrder::finite(robust_floor(std::min(g, d)) + 1);
}

TPOrder predict_tp_fractional(double beta) {
  if (!(beta > 0.0)) throw InvalidParams("fractional integration kernel: beta must be positive");
  if (near_integer(beta, 1e-12)) return TPOrder::infinity();
  return TPOrder::finite(static_cast<int>(std::ceil(beta)));
}

Kernel positive_stable_kernel(double alpha, const stable::EvalConfig& cfg) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidParams("positive_stable_kernel: alpha must lie in (0, 1)");
  cfg.validate();
  stable::StableParams p(alpha, 1.0);
  return Kernel(
      "positive_stable(alpha=" + fmt(alpha) + ")",
      [p, cfg](double x, double y) { return stable::density<double>(p, x / y, cfg); },
      [p, cfg](const mp_real& x, const mp_real& y, const Precision& prec) {
        return stable::density<mp_real>(p, mp_real(x / y), with_precision(cfg, prec));
      },
      predict_tp_positive(alpha));
}

Kernel stable_convolution_kernel(const stable::StableParams& p, const stable::EvalConfig& cfg) {
  TPOrder order = predict_tp_general(p);
  cfg.validate();
  return Kernel(
      "stable(alpha=" + fmt(p.alpha) + ",rho=" + fmt(p.rho) + ")",
      [p, cfg](double x, double y) { return stable::density<double>(p, x / y, cfg); },
      [p, cfg](const mp_real& x, const mp_real& y, const Precision& prec) {
        return stable::density<mp_real>(p, mp_real(x / y), with_precision(cfg, prec));
      },
      order);
}

Kernel cauchy_type_kernel(double alpha) {
  TPOrder order = predict_tp_positive(alpha);
  return Kernel(
      "cauchy_type(alpha=" + fmt(alpha) + ")",
      [alpha](double t, double x) {
        double c = std::abs(alpha - 0.5) < 1e-15 ? 0.0 : std::cos(M_PI * alpha);
        return 1.0 / (t * t + 2 * c * t * x + x * x);
      },
      [alpha](const mp_real& t, const mp_real& x, const Precision&) {
        mp_real c = cos(pi<mp_real>() * lift<mp_real>(alpha));
        return mp_real(1 / (t * t + 2 * c * t * x + x * x));
      },
      order);
}

Kernel fractional_integration_kernel(double beta) {
  TPOrder order = predict_tp_fractional(beta);
  auto check_diag = [beta](bool diag) {
    if (diag && beta < 1.0) throw DomainError("fractional integration kernel is singular on the diagonal");
  };
  return Kernel(
      "fractional_integration(beta=" + fmt(beta) + ")",
      [beta, check_diag](double x, double y) {
        double z = y - x;
        if (z < 0) return 0.0;
        check_diag(z == 0);
        if (beta == 1.0) return 1.0;
        return std::pow(z, beta - 1);
      },
      [beta, check_diag](const mp_real& x, const mp_real& y, const Precision&) {
        mp_real z = y - x;
        if (z < 0) return mp_real(0);
        check_diag(z == 0);
        if (beta == 1.0) return mp_real(1);
        return mp_real(pow(z, lift<mp_real>(beta) - 1));
      },
      order);
}

Kernel radial_kernel(double alpha, int d, const stable::EvalConfig& cfg) {
  TPOrder order = predict_tp_positive(alpha);
  if (d < 1) throw InvalidParams("radial_kernel: dimension must be positive");
  cfg.validate();
  return Kernel(
      "radial(alpha=" + fmt(alpha) + ",d=" + std::to_string(d) + ")",
      [alpha, d, cfg](double t, double r) { return radial::density<double>(alpha, d, r / t, cfg); },
      [alpha, d, cfg](const mp_real& t, const mp_real& r, const Precision& prec) {
        return radial::density<mp_real>(alpha, d, mp_real(r / t), with_precision(cfg, prec));
      },
      order);
}

Kernel gaussian_spacetime_kernel() {
  return Kernel(
      "gaussian_spacetime",
      [](double t, double x) { return std::exp(-x * x / (4 * t)) / (2 * std::sqrt(M_PI * t)); },
      [](const mp_real& t, const mp_real& x, const Precision&) {
        return mp_real(exp(-x * x / (4 * t)) / (2 * sqrt(pi<mp_real>() * t)));
      },
      TPOrder::infinity());
}

}  // namespace stabletp::kernels
