#include "stabletp/errors.hpp"
#include "stabletp/kernels.hpp"
#include "stabletp/quadrature.hpp"
#include "stabletp/specfun.hpp"

#include <cmath>
#include <complex>

namespace stabletp::kernels::radial {

namespace {

void check(double alpha, int d) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidParams("radial density: alpha must lie in (0, 1)");
  if (d < 1) throw InvalidParams("radial density: dimension must be positive");
}

// Below this point log f_alpha < -750 (leading small-x behaviour of the positive law), so
// the stable factor contributes nothing in double.
double lower_cutoff(double alpha) {
  double k = (1 - alpha) * std::pow(alpha, alpha / (1 - alpha));
  return std::pow(k / 750.0, (1 - alpha) / alpha);
}

double mixture(double alpha, int d, double z, const stable::EvalConfig& cfg) {
  const stable::StableParams p(alpha, 1.0);
  const double shape = 0.5 * d;
  const double lgs = std::lgamma(shape);
  // log of the mixture integrand times `scale`; folding the Jacobian into the exponent keeps
  // the integrand out of the subnormal range for large z
  auto f = [&](double x, double log_scale) {
    double u = z / x;
    double lg = (shape - 1) * std::log(u) - u - lgs;
    if (lg < -745) return 0.0;
    return std::exp(lg + stable::log_density<double>(p, x, cfg) - std::log(x) + log_scale);
  };
  // The Gamma factor confines the mass to x >~ z, so the upper piece is integrated in x / z.
  const double tol = cfg.quadrature_rel_tol * 1e-2;
  const double lo = lower_cutoff(alpha);
  const double split = std::max(lo, z);
  auto upper = quad::exp_sinh<double>([&](double u) { return f(split * u, std::log(split)); }, 1.0, tol);
  double total = upper.value;
  bool ok = upper.converged;
  if (split > lo) {
    auto lower = quad::tanh_sinh<double>([&](double s) { return f(std::exp(s), s); }, std::log(lo),
                                         std::log(split), tol);
    total += lower.value;
    // a negligible piece need not converge relative to itself
    ok = ok && (lower.converged || std::abs(lower.error) <= cfg.quadrature_rel_tol * std::abs(total));
  }
  // near the bottom of the double range the estimates lose their meaning; such values are
  // returned as they are
  if (!ok && !(std::abs(total) < 1e-250)) throw NonConvergence("radial density: mixture integral did not converge");
  return total;
}

// Strip of analyticity of the Mellin transform is 1 - d/2 < Re s < 1 + alpha; the contour
// runs through its middle (capped below), which keeps the poles of the Gamma factors far
// from it at the cost of some cancellation for z far from 1.
double mb_abscissa(double alpha, int d) { return 0.5 * (std::max(1.0 - 0.5 * d, -1.0) + 1.0 + alpha); }

int mb_guard_digits(double alpha, int d, double z) {
  double c = mb_abscissa(alpha, d);
  double lz = std::log10(z);
  double loss = lz > 0 ? (1 + alpha - c) * lz : (c - (1 - 0.5 * d)) * -lz;
  return 10 + static_cast<int>(std::ceil(loss));
}

mp_real mellin_barnes(double alpha, int d, const mp_real& z, const stable::EvalConfig& cfg) {
  using C = std::complex<mp_real>;
  using std::log;
  const mp_real a = lift<mp_real>(alpha);
  const mp_real half_d = mp_real(d) / 2;
  const mp_real lz = log(z);
  const mp_real c = lift<mp_real>(mb_abscissa(alpha, d));
  const mp_real lg_half_d = specfun::log_gamma<mp_real>(half_d);
  auto f = [&](const mp_real& t) -> mp_real {
    C s(c, t);
    C one(1, 0);
    C lm = specfun::log_gamma<mp_real>(C(half_d - 1, 0) + s) - lg_half_d +
           specfun::log_gamma<mp_real>(one + (one - s) / a) - specfun::log_gamma<mp_real>(C(2, 0) - s);
    C v = std::exp(lm - s * lz);
    return v.real();
  };
  const mp_real tol = boost::multiprecision::pow(mp_real(10), -(cfg.precision.digits + 3));
  auto r = quad::exp_sinh<mp_real>(f, mp_real(0), tol, 0);
  if (!r.converged) throw NonConvergence("radial density: Mellin-Barnes integral did not converge");
  return r.value / pi<mp_real>();
}

}  // namespace

template <class Real>
std::optional<Real> series(double alpha, int d, const Real& z, const stable::EvalConfig& cfg) {
  using std::exp;
  using std::log;
  using std::sin;
  check(alpha, d);
  if (!(z > 0) || alpha >= 0.5) return std::nullopt;
  const bool mp = std::is_same_v<Real, mp_real>;
  const double digits = mp ? cfg.precision.digits : 12.0;
  const double lz = std::log(to_double(z));
  const double shape = 0.5 * d;
  auto logmag = [&](int q) {
    double qa = q * alpha;
    double s = std::abs(std::sin(M_PI * qa));
    if (s < 1e-13) return -HUGE_VAL;
    return (std::lgamma(1 + qa) + std::lgamma(shape + qa) - std::lgamma(shape) - std::lgamma(q + 1.0) -
            (qa + 1) * lz + std::log(s)) /
           std::log(10.0);
  };
  double lfirst = logmag(1);
  double lmax = lfirst;
  int last = -1;
  int below = 0;
  for (int q = 1; q <= cfg.series_terms; ++q) {
    double l = logmag(q);
    lmax = std::max(lmax, l);
    below = l < lfirst - digits - 3 ? below + 1 : 0;
    if (below >= 2) {
      last = q;
      break;
    }
  }
  if (last < 0) return std::nullopt;
  const double guard = lmax - lfirst;
  if (!mp && guard > 15.3 - digits) return std::nullopt;

  auto sum_terms = [&]() -> Real {
    Real a = lift<Real>(alpha);
    Real hd = Real(d) / 2;
    Real lzz = log(at_scope(z));
    Real lg_hd = specfun::log_gamma<Real>(hd);
    Real total = 0;
    for (int q = 1; q <= last; ++q) {
      Real qa = Real(q) * a;
      Real l = specfun::log_gamma<Real>(Real(1 + qa)) + specfun::log_gamma<Real>(Real(hd + qa)) - lg_hd -
               specfun::log_gamma<Real>(Real(q + 1)) - (qa + 1) * lzz;
      Real t = exp(l) * sin(pi<Real>() * qa);
      total += (q % 2 == 1) ? t : Real(-t);
    }
    return Real(total / pi<Real>());
  };
  Real total;
  if constexpr (std::is_same_v<Real, mp_real>) {
    PrecisionScope scope(static_cast<int>(std::ceil(digits + guard)) + 10);
    total = sum_terms();
  } else {
    total = sum_terms();
  }
  if (!(total > 0)) return std::nullopt;
  double loss = lmax - std::log10(std::abs(to_double(total)));
  if (!mp && loss > 15.3 - digits) return std::nullopt;
  return at_scope(total);
}

template <class Real>
Real density(double alpha, int d, const Real& z, const stable::EvalConfig& cfg) {
  check(alpha, d);
  cfg.validate();
  if (!(z > 0)) throw DomainError("radial density needs z > 0");
  if constexpr (std::is_same_v<Real, double>) {
    return mixture(alpha, d, z, cfg);
  } else {
    if (auto s = series<mp_real>(alpha, d, z, cfg)) return *s;
    return mellin_barnes_density(alpha, d, z, cfg);
  }
}

mp_real mellin_barnes_density(double alpha, int d, const mp_real& z, const stable::EvalConfig& cfg) {
  check(alpha, d);
  cfg.validate();
  if (!(z > 0)) throw DomainError("radial density needs z > 0");
  mp_real v;
  {
    PrecisionScope scope(cfg.precision.digits + mb_guard_digits(alpha, d, to_double(z)));
    v = mellin_barnes(alpha, d, at_scope(z), cfg);
  }
  PrecisionScope back(cfg.precision);
  return at_scope(v);
}

template double density<double>(double, int, const double&, const stable::EvalConfig&);
template mp_real density<mp_real>(double, int, const mp_real&, const stable::EvalConfig&);
template std::optional<double> series<double>(double, int, const double&, const stable::EvalConfig&);
template std::optional<mp_real> series<mp_real>(double, int, const mp_real&, const stable::EvalConfig&);

}  // namespace stabletp::kernels::radial
