#include "stabletp/stable.hpp"

#include "stabletp/errors.hpp"
#include "stabletp/quadrature.hpp"
#include "stabletp/specfun.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <limits>

namespace stabletp::stable {

StableParams::StableParams(double a, double r) : alpha(a), rho(r) {
  if (!std::isfinite(a) || !(a > 0.0) || a > 2.0) throw InvalidParams("alpha must lie in (0, 2]");
  if (!std::isfinite(r) || r < 0.0 || r > 1.0) throw InvalidParams("rho must lie in [0, 1]");
  const double tol = 1e-12;
  if (a == 2.0 && std::abs(r - 0.5) > tol) throw InvalidParams("alpha = 2 requires rho = 1/2");
  if (a == 1.0 && (r <= 0.0 || r >= 1.0)) throw InvalidParams("alpha = 1 requires rho in (0, 1)");
  if (a > 1.0 && (r < 1.0 - 1.0 / a - tol || r > 1.0 / a + tol)) {
    throw InvalidParams("alpha > 1 requires rho in [1 - 1/alpha, 1/alpha]");
  }
}

double StableParams::gamma_param() const {
  return rho == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / rho - 1.0;
}

double StableParams::delta_param() const {
  return rho == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / (rho * alpha) - 1.0;
}

void EvalConfig::validate() const {
  if (series_terms < 10) throw InvalidParams("series_terms must be at least 10");
  if (!(quadrature_rel_tol > 0.0) || !(quadrature_rel_tol < 1e-4)) {
    throw InvalidParams("quadrature_rel_tol must lie in (0, 1e-4)");
  }
  if (regime_switch_x && !(*regime_switch_x > 0.0)) throw InvalidParams("regime_switch_x must be positive");
}

namespace {

constexpr double kLn10 = 2.302585092994045684;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

template <class Real>
Real neg_inf() {
  return -std::numeric_limits<Real>::infinity();
}

template <class Real>
constexpr bool is_double = std::is_same_v<Real, double>;

// Relative accuracy demanded from series sums: about 12 digits on the double path,
// the configured digits on the high-precision path.
template <class Real>
double target_digits(const EvalConfig& cfg) {
  return is_double<Real> ? 12.0 : static_cast<double>(cfg.precision.digits);
}

template <class Real, class Body>
auto at_working_precision(const EvalConfig& cfg, int guard, Body&& body) {
  if constexpr (is_double<Real>) {
    return body();
  } else {
    PrecisionScope scope(cfg.precision.digits + guard);
    return body();
  }
}

template <class Real>
Real quad_tol(const EvalConfig& cfg) {
  if constexpr (is_double<Real>) {
    return cfg.quadrature_rel_tol;
  } else {
    return boost::multiprecision::pow(mp_real(10), -(cfg.precision.digits + 3));
  }
}

bool alpha_rho_is_one(const StableParams& p) { return std::abs(p.alpha * p.rho - 1.0) < 1e-12; }

bool is_levy(const StableParams& p) { return p.alpha == 0.5 && p.rho == 1.0; }

// ---------------------------------------------------------------------------
// Series machinery. The plan is made in double from log-magnitudes of the terms; the
// sum is then formed in Real with enough guard digits to absorb the cancellation.

struct SeriesPlan {
  bool ok = false;
  int first = 0;
  int last = -1;        // inclusive
  double lmax = kNegInf;
  double lfirst = kNegInf;
  double lstop = kNegInf;  // size of the first neglected term
};

template <class LogMag>
SeriesPlan plan_convergent(LogMag&& logmag, int k0, int max_terms, double digits) {
  SeriesPlan plan;
  plan.first = k0;
  int below = 0;
  double prev = std::numeric_limits<double>::infinity();
  for (int k = k0; k < k0 + max_terms; ++k) {
    double l = logmag(k);
    if (l > plan.lmax) plan.lmax = l;
    if (plan.lfirst == kNegInf && l > kNegInf) plan.lfirst = l;
    if (plan.lfirst > kNegInf) {
      double threshold = plan.lfirst - digits - 3.0;
      if (l < threshold && l <= prev) {
        if (++below >= 2) {
          plan.ok = true;
          plan.last = k;
          plan.lstop = l;
          return plan;
        }
      } else {
        below = 0;
      }
    }
    if (l > kNegInf) prev = l;
  }
  return plan;
}

template <class LogMag>
SeriesPlan plan_asymptotic(LogMag&& logmag, int k0, int max_terms, double digits) {
  SeriesPlan plan;
  plan.first = k0;
  double prev = std::numeric_limits<double>::infinity();
  int prev_k = k0 - 1;
  int below = 0;
  for (int k = k0; k < k0 + max_terms; ++k) {
    double l = logmag(k);
    if (l == kNegInf) continue;
    if (plan.lfirst == kNegInf) plan.lfirst = l;
    below = (l <= prev && l < plan.lfirst - digits - 3.0) ? below + 1 : 0;
    if (below >= 2) {
      // already negligible before the terms start growing again
      plan.ok = true;
      plan.last = k;
      plan.lstop = l;
      plan.lmax = std::max(plan.lmax, l);
      return plan;
    }
    if (l > prev) {
      // previous nonzero term was the least one; stop before it
      plan.ok = true;
      plan.last = prev_k - 1;
      plan.lstop = prev;
      return plan;
    }
    plan.lmax = std::max(plan.lmax, l);
    prev = l;
    prev_k = k;
  }
  return plan;
}

double log10_abs_sin(double v) {
  double s = std::abs(std::sin(v));
  return s < 1e-13 ? kNegInf : std::log10(s);
}

template <class Real>
double log10_of(const Real& v) {
  using std::abs;
  using std::log10;
  return to_double(Real(log10(abs(v))));
}

// Sums the planned terms in Real and verifies the retained precision. term(k) must be
// evaluated at the precision in scope and scaled by 10^-lfirst, so that far tails do not
// underflow.
template <class Real, class Term>
std::optional<Real> sum_planned(const SeriesPlan& plan, Term&& term, double digits, bool convergent) {
  if (!plan.ok || plan.last < plan.first) return std::nullopt;
  double guard = std::max(0.0, plan.lmax - plan.lfirst);
  for (int attempt = 0; attempt < 2; ++attempt) {
    double available;
    Real sum = 0;
    if constexpr (is_double<Real>) {
      available = 15.3;
      if (guard > available - digits) return std::nullopt;
      for (int k = plan.first; k <= plan.last; ++k) sum += term(k);
    } else {
      int work = static_cast<int>(std::ceil(digits + guard)) + 10;
      PrecisionScope scope(work);
      available = work - 1.0;
      for (int k = plan.first; k <= plan.last; ++k) sum += term(k);
    }
    if (sum == 0) return std::nullopt;
    double lsum = log10_of(sum) + plan.lfirst;
    double loss = plan.lmax - lsum;
    bool precise = available - loss >= digits;
    bool truncated_ok = plan.lstop < lsum - digits - (convergent ? 0.0 : 1.0);
    if (!truncated_ok) return std::nullopt;
    if (precise) return sum;
    if constexpr (is_double<Real>) {
      return std::nullopt;
    } else {
      guard = loss + 5.0;
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Closed forms.

template <class Real>
Real gaussian_derivative(int j, const Real& x) {
  using std::exp;
  using std::sqrt;
  Real f = exp(-x * x / 4) / (2 * sqrt(pi<Real>()));
  if (j == 0) return f;
  Real v = specfun::hermite<Real>(static_cast<unsigned>(j), Real(x / 2)) * f;
  for (int i = 0; i < j; ++i) v /= -2;
  return v;
}

template <class Real>
Real cauchy_derivative(const StableParams& p, int j, const Real& x) {
  using std::cos;
  using std::sin;
  using C = std::complex<Real>;
  Real r = lift<Real>(p.rho);
  Real angle = pi<Real>() * r;
  C z(x + cos(angle), -sin(angle));
  C inv = C(Real(1)) / z;
  C pw = inv;
  for (int i = 0; i < j; ++i) pw *= inv;
  Real fact = 1;
  for (int i = 2; i <= j; ++i) fact *= i;
  Real v = pw.imag() * fact / pi<Real>();
  return (j % 2 == 1) ? Real(-v) : v;
}

template <class Real>
Real levy_log_density(const Real& x) {
  using std::log;
  using std::sqrt;
  return -log(2 * sqrt(pi<Real>())) - Real(3) / 2 * log(x) - 1 / (4 * x);
}

// ---------------------------------------------------------------------------
// Single-integral representation. With theta = 2 rho - 1 and v = phi + theta in (0, 1 + theta),
//   f(x) = alpha x^{1/(alpha-1)} / (2|1-alpha|) int U(v) exp(-c U(v)) dv,  c = x^{alpha/(alpha-1)},
//   U = (sin(pi alpha v/2) / cos(pi phi/2))^{alpha/(1-alpha)} cos(pi((alpha-1)v + theta)/2) / cos(pi phi/2).
// Both v and its complement w = 1 + theta - v are carried so the factors that vanish at the
// ends of the range stay accurate.

template <class Real>
struct Zolotarev {
  Real alpha;
  Real theta;
  Real len;
  Real expo;
  Real half_pi;
  bool theta_one;
  bool alpha_rho_one;

  Zolotarev(const StableParams& p)
      : alpha(lift<Real>(p.alpha)),
        theta(2 * lift<Real>(p.rho) - 1),
        len(1 + theta),
        expo(alpha / (1 - alpha)),
        half_pi(pi<Real>() / 2),
        theta_one(p.rho == 1.0),
        alpha_rho_one(alpha_rho_is_one(p)) {}

  // log U; -inf (or +inf) is returned through a false flag when a factor vanishes.
  bool log_u(const Real& v, const Real& w, Real& out) const {
    using std::cos;
    using std::log;
    using std::sin;
    bool right = w < len / 2;
    Real a = (right && alpha_rho_one) ? Real(sin(half_pi * alpha * w)) : Real(sin(half_pi * alpha * v));
    Real b;
    if (right) {
      b = sin(half_pi * w);
    } else if (theta_one) {
      b = sin(half_pi * v);
    } else {
      b = cos(half_pi * (v - theta));
    }
    Real c;
    if (right && alpha_rho_one) {
      c = sin(half_pi * (alpha - 1) * w);
    } else if (!right && theta_one) {
      c = sin(half_pi * (1 - alpha) * v);
    } else {
      c = cos(half_pi * ((alpha - 1) * v + theta));
    }
    if (!(a > 0) || !(b > 0) || !(c > 0)) return false;
    Real lb = log(b);
    out = expo * (log(a) - lb) + log(c) - lb;
    return true;
  }
};

// log U on the double grid, used to place the peak of the integrand.
double log_u_double(const Zolotarev<double>& z, double v) {
  double out = 0;
  if (!z.log_u(v, z.len - v, out)) return std::numeric_limits<double>::quiet_NaN();
  return out;
}

template <class Real>
struct IntegralParts {
  Real log_scale;  // log of prefactor plus the peak value of the exponent
  Real i0;         // int exp(g - M)
  Real i1;         // int c U exp(g - M)
};

// Location of the maximum of log U - c U (where U = 1/c), in double.
std::optional<double> peak_location(const StableParams& p, double logc) {
  Zolotarev<double> z(p);
  double lo = z.len * 1e-14;
  double hi = z.len * (1 - 1e-14);
  double target = -logc;
  double flo = log_u_double(z, lo);
  double fhi = log_u_double(z, hi);
  if (std::isnan(flo)) flo = (p.alpha < 1) ? kNegInf : std::numeric_limits<double>::infinity();
  if (std::isnan(fhi)) fhi = (p.alpha < 1) ? std::numeric_limits<double>::infinity() : kNegInf;
  bool increasing = flo < fhi;
  if (increasing ? (target <= flo || target >= fhi) : (target >= flo || target <= fhi)) return std::nullopt;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * z.len; ++it) {
    double mid = 0.5 * (lo + hi);
    double fm = log_u_double(z, mid);
    if (std::isnan(fm)) break;
    if ((fm < target) == increasing) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Shape of the integrand exp(log U - c U): peak location and value, and the sub-range outside
// of which it is negligible at the requested accuracy. Positions are kept in double; the
// exponent is evaluated in Real since it can be far larger than 1 / eps.
template <class Real>
struct Layout {
  std::optional<double> vstar;
  Real peak = 0;
  double lo = 0;
  double hi = 0;
};

template <class Real>
Layout<Real> analyse_integrand(const StableParams& p, const Real& logc, double digits) {
  using std::exp;
  Zolotarev<Real> z(p);
  const double len = to_double(z.len);
  Layout<Real> lay;
  lay.hi = len;
  auto g = [&](double v) -> Real {
    Real lu;
    Real vv(v);
    if (!z.log_u(vv, z.len - vv, lu)) return neg_inf<Real>();
    return lu - exp(logc + lu);
  };
  lay.vstar = peak_location(p, to_double(logc));
  double centre;
  if (lay.vstar) {
    centre = *lay.vstar;
    lay.peak = -logc - 1;
  } else {
    std::vector<double> probes;
    for (double f : {1e-300, 1e-100, 1e-50, 1e-30, 1e-20, 1e-13, 1e-10, 1e-7, 1e-5, 1e-3}) {
      probes.push_back(f * len);
      probes.push_back((1 - f) * len);
    }
    for (int i = 1; i < 64; ++i) probes.push_back(len * i / 64.0);
    lay.peak = neg_inf<Real>();
    centre = 0.5 * len;
    for (double v : probes) {
      Real gv = g(v);
      if (gv > lay.peak) {
        lay.peak = gv;
        centre = v;
      }
    }
    if (!(lay.peak > neg_inf<Real>())) throw NonConvergence("density integral: integrand vanishes identically");
  }
  const Real cut = (digits + 15.0) * kLn10;
  auto keep = [&](double v) { return g(v) - lay.peak + cut >= 0; };
  auto boundary = [&](double inside, double outside) {
    for (int it = 0; it < 2000; ++it) {
      double mid = std::abs(inside - outside) > 1e-3 * std::max(std::abs(inside), std::abs(outside)) || inside == 0 ||
                           outside == 0
                       ? 0.5 * (inside + outside)
                       : std::sqrt(inside * outside);
      if (mid == inside || mid == outside) break;
      if (keep(mid)) {
        inside = mid;
      } else {
        outside = mid;
      }
    }
    return outside;
  };
  const double edge = 1e-300 * len;
  if (centre > edge && !keep(edge)) {
    lay.lo = boundary(centre, edge);
    if (lay.lo <= edge) lay.lo = 0.0;
  }
  const double redge = len * (1 - 1e-16);
  if (centre < redge && !keep(redge)) {
    lay.hi = boundary(centre, redge);
    if (lay.hi >= redge) lay.hi = len;
  }
  return lay;
}

template <class Real>
IntegralParts<Real> integral_parts_at(const StableParams& p, const Real& x, const EvalConfig& cfg, bool with_moment,
                                      const Layout<Real>& lay) {
  using std::abs;
  using std::exp;
  using std::log;
  Zolotarev<Real> z(p);
  const Real lx = log(at_scope(x));
  const Real logc = z.alpha / (z.alpha - 1) * lx;
  const Real c = exp(logc);
  const double len_d = to_double(z.len);

  const Real peak = lay.vstar ? Real(-logc - 1) : lay.peak;

  auto integrand = [&](const Real& v, const Real& w, bool moment) -> Real {
    Real lu;
    if (!z.log_u(v, w, lu)) return Real(0);
    Real u = exp(lu);
    Real g = lu - c * u - peak;
    Real e = exp(g);
    return moment ? Real(c * u * e) : e;
  };

  struct Piece {
    Real a;
    Real b;
    bool at_zero;
    bool at_end;
  };
  std::vector<Piece> pieces;
  auto add_piece = [&](double a, double b) {
    if (!(b > a)) return;
    Real ra = a == 0.0 ? Real(0) : Real(a);
    Real rb = b == len_d ? z.len : Real(b);
    pieces.push_back(Piece{ra, rb, a == 0.0, b == len_d});
  };
  if (lay.vstar && *lay.vstar > lay.lo && *lay.vstar < lay.hi) {
    add_piece(lay.lo, *lay.vstar);
    add_piece(*lay.vstar, lay.hi);
  } else {
    add_piece(lay.lo, lay.hi);
  }

  Real tol = quad_tol<Real>(cfg);
  if constexpr (is_double<Real>) {
    // the exponent is only known to about eps * |peak| in double
    tol = std::max(tol, 64 * epsilon<double>() * std::max(1.0, std::abs(peak)));
  }
  const int levels = is_double<Real> ? 11 : 14;
  auto integrate = [&](bool moment) -> Real {
    Real total = 0;
    for (const Piece& pc : pieces) {
      auto f = [&](const Real& v, const Real& vc) {
        Real vv = (pc.at_zero && vc > 0) ? vc : v;
        Real w = (pc.at_end && vc < 0) ? Real(-vc) : Real(z.len - vv);
        return integrand(vv, w, moment);
      };
      auto r = quad::tanh_sinh<Real>(f, pc.a, pc.b, tol, levels);
      if (!r.converged) throw NonConvergence("density integral did not converge");
      total += r.value;
    }
    return total;
  };

  IntegralParts<Real> out;
  out.log_scale = log(z.alpha / (2 * abs(Real(1 - z.alpha)))) + lx / (z.alpha - 1) + peak;
  out.i0 = integrate(false);
  out.i1 = with_moment ? integrate(true) : Real(0);
  return out;
}

template <class Real>
IntegralParts<Real> integral_parts(const StableParams& p, const Real& x, const EvalConfig& cfg, bool with_moment) {
  using std::log;
  auto logc_of = [&](const auto& xx) {
    using R = std::decay_t<decltype(xx)>;
    R a = lift<R>(p.alpha);
    return R(a / (a - 1) * log(xx));
  };
  if constexpr (is_double<Real>) {
    Layout<double> lay = analyse_integrand<double>(p, logc_of(x), target_digits<double>(cfg));
    if (std::abs(lay.peak) < 1e6) return integral_parts_at<double>(p, x, cfg, with_moment, lay);
    // g - peak cancels catastrophically in double; redo everything with enough digits
    int extra = static_cast<int>(std::ceil(std::log10(std::abs(lay.peak))));
    PrecisionScope scope(20 + extra);
    EvalConfig coarse = cfg;
    coarse.precision = Precision(15);
    mp_real xm(x);
    Layout<mp_real> lm = analyse_integrand<mp_real>(p, logc_of(xm), 15);
    auto mp = integral_parts_at<mp_real>(p, xm, coarse, with_moment, lm);
    return IntegralParts<double>{to_double(mp.log_scale), to_double(mp.i0), to_double(mp.i1)};
  } else {
    Layout<Real> lay = analyse_integrand<Real>(p, logc_of(x), target_digits<Real>(cfg));
    // digits eaten by the size of the exponent at the peak
    double mag = std::abs(to_double(lay.peak));
    if (mag <= 10) return integral_parts_at<Real>(p, x, cfg, with_moment, lay);
    int extra = static_cast<int>(std::ceil(std::log10(mag)));
    PrecisionScope scope(static_cast<int>(mp_real::default_precision()) + extra);
    Real xx = at_scope(x);
    Layout<Real> fine = analyse_integrand<Real>(p, logc_of(xx), target_digits<Real>(cfg));
    return integral_parts_at<Real>(p, xx, cfg, with_moment, fine);
  }
}

// A series sum kept as exp(log_scale) * sum.
template <class Real>
struct Scaled {
  Real log_scale;
  Real sum;
  Real value() const {
    using std::exp;
    return exp(log_scale) * sum;
  }
};

template <class Real>
std::optional<Scaled<Real>> tail_scaled(const StableParams& p, int j, const Real& x, const EvalConfig& cfg) {
  using std::exp;
  using std::log;
  using std::sin;
  if (!(x > 0) || p.alpha == 1.0 || p.alpha == 2.0) return std::nullopt;
  const bool convergent = p.alpha < 1;
  const double a = p.alpha;
  const double lx = std::log(to_double(x));
  const double digits = target_digits<Real>(cfg);
  auto logmag = [&](int q) {
    double s = log10_abs_sin(M_PI * q * p.rho * a);
    if (s == kNegInf) return kNegInf;
    double l = std::lgamma(q * a + 1 + j) - std::lgamma(q + 1.0) - (q * a + 1 + j) * lx;
    return l / kLn10 + s - std::log10(M_PI);
  };
  SeriesPlan plan = convergent ? plan_convergent(logmag, 1, cfg.series_terms, digits)
                               : plan_asymptotic(logmag, 1, cfg.series_terms, digits);
  const Real shift = Real(plan.lfirst * kLn10);
  auto term = [&](int q) -> Real {
    Real al = lift<Real>(p.alpha);
    Real r = lift<Real>(p.rho);
    Real qa = Real(q) * al;
    Real l = specfun::log_gamma<Real>(Real(qa + 1 + j)) - specfun::log_gamma<Real>(Real(q + 1)) -
             (qa + 1 + j) * log(at_scope(x));
    Real t = exp(l - shift) * sin(pi<Real>() * qa * r) / pi<Real>();
    return ((q - 1 + j) % 2 == 0) ? t : Real(-t);
  };
  auto sum = sum_planned<Real>(plan, term, digits, convergent);
  if (!sum) return std::nullopt;
  return Scaled<Real>{shift, *sum};
}

template <class Real>
std::optional<Scaled<Real>> taylor_scaled(const StableParams& p, int j, const Real& x, const EvalConfig& cfg) {
  using std::exp;
  using std::log;
  using std::sin;
  if (!(x > 0) || p.alpha == 1.0 || p.alpha == 2.0) return std::nullopt;
  const bool convergent = p.alpha > 1;
  const double a = p.alpha;
  const double lx = std::log(to_double(x));
  const double digits = target_digits<Real>(cfg);
  auto logmag = [&](int n) {
    double s = log10_abs_sin(M_PI * n * p.rho);
    if (s == kNegInf) return kNegInf;
    double l = std::lgamma(1 + n / a) - std::log(static_cast<double>(n)) - std::lgamma(static_cast<double>(n - j)) +
               (n - 1 - j) * lx;
    return l / kLn10 + s - std::log10(M_PI);
  };
  SeriesPlan plan = convergent ? plan_convergent(logmag, j + 1, cfg.series_terms, digits)
                               : plan_asymptotic(logmag, j + 1, cfg.series_terms, digits);
  const Real shift = Real(plan.lfirst * kLn10);
  auto term = [&](int n) -> Real {
    Real al = lift<Real>(p.alpha);
    Real r = lift<Real>(p.rho);
    Real l = specfun::log_gamma<Real>(Real(1 + Real(n) / al)) - log(Real(n)) -
             specfun::log_gamma<Real>(Real(n - j)) + Real(n - 1 - j) * log(at_scope(x));
    Real t = exp(l - shift) * sin(pi<Real>() * Real(n) * r) / pi<Real>();
    return ((n - 1) % 2 == 0) ? t : Real(-t);
  };
  auto sum = sum_planned<Real>(plan, term, digits, convergent);
  if (!sum) return std::nullopt;
  return Scaled<Real>{shift, *sum};
}

template <class Real>
std::optional<Real> series_pair_log_derivative(const StableParams& p, const Real& x, const EvalConfig& cfg) {
  auto try_kind = [&](bool tail) -> std::optional<Real> {
    using std::exp;
    auto s0 = tail ? tail_scaled<Real>(p, 0, x, cfg) : taylor_scaled<Real>(p, 0, x, cfg);
    if (!s0 || !(s0->sum > 0)) return std::nullopt;
    auto s1 = tail ? tail_scaled<Real>(p, 1, x, cfg) : taylor_scaled<Real>(p, 1, x, cfg);
    if (!s1) return std::nullopt;
    return Real(x * exp(s1->log_scale - s0->log_scale) * s1->sum / s0->sum);
  };
  auto first = try_kind(p.alpha < 1);
  if (first) return first;
  return try_kind(p.alpha > 1);
}

template <class Real>
Real log_density_positive(const StableParams& p, const Real& x, const EvalConfig& cfg) {
  using std::log;
  using std::sqrt;
  // density e^{-x^2/4} / (2 sqrt(pi)), in closed form so that the far tail does not underflow
  if (p.alpha == 2.0) return Real(-x * x / 4 - log(2 * sqrt(pi<Real>())));
  if (p.alpha == 1.0) return log(cauchy_derivative<Real>(p, 0, x));
  if (x == 0) {
    Real f0 = derivative_at_zero<Real>(p, 1);
    return f0 > 0 ? Real(log(f0)) : neg_inf<Real>();
  }
  if (p.alpha < 1 && p.rho == 0.0) return neg_inf<Real>();
  if (is_levy(p)) return levy_log_density(x);
  bool below_one = p.alpha < 1;
  auto series_log = [&](bool tail) -> std::optional<Real> {
    auto s = tail ? tail_scaled<Real>(p, 0, x, cfg) : taylor_scaled<Real>(p, 0, x, cfg);
    if (!s || !(s->sum > 0)) return std::nullopt;
    return Real(s->log_scale + log(s->sum));
  };
  if (cfg.regime_switch_x) {
    double xd = to_double(x);
    bool series_side = below_one ? xd >= *cfg.regime_switch_x : xd <= *cfg.regime_switch_x;
    if (series_side) {
      if (auto s = series_log(below_one)) return *s;
    }
    return integral_log_density<Real>(p, x, cfg);
  }
  if (auto s = series_log(below_one)) return *s;
  if (auto s = series_log(!below_one)) return *s;
  return integral_log_density<Real>(p, x, cfg);
}

template <class Real>
Real finite_difference_derivative(const StableParams& p, int j, const Real& x, const EvalConfig& cfg) {
  // Central differences of order j with Richardson extrapolation in h^2.
  // The density is nearly singular at the origin for alpha < 1, so the base step stays well
  // inside (0, x).
  const int levels = 7;
  Real h0 = x / Real(50 * (j + 1));
  std::vector<Real> binom(j + 1);
  binom[0] = 1;
  for (int i = 1; i <= j; ++i) binom[i] = binom[i - 1] * Real(j - i + 1) / Real(i);
  auto stencil = [&](const Real& h) {
    Real s = 0;
    for (int i = 0; i <= j; ++i) {
      Real xi = x + (Real(j) / 2 - Real(i)) * h;
      Real fi = density<Real>(p, xi, cfg);
      s += (i % 2 == 0 ? binom[i] : Real(-binom[i])) * fi;
    }
    Real hj = 1;
    for (int i = 0; i < j; ++i) hj *= h;
    return Real(s / hj);
  };
  std::vector<std::vector<Real>> table(levels);
  Real h = h0;
  for (int k = 0; k < levels; ++k) {
    table[k].resize(k + 1);
    table[k][0] = stencil(h);
    Real four = 4;
    Real factor = 1;
    for (int m = 1; m <= k; ++m) {
      factor *= four;
      table[k][m] = table[k][m - 1] + (table[k][m - 1] - table[k - 1][m - 1]) / (factor - 1);
    }
    h /= 2;
  }
  return table[levels - 1][levels - 1];
}

}  // namespace

// ---------------------------------------------------------------------------

template <class Real>
Real derivative_at_zero(const StableParams& p, int j) {
  using std::exp;
  using std::sin;
  if (j < 1) throw InvalidParams("derivative_at_zero: j must be positive");
  if (near_integer(j * p.rho, 1e-13)) return Real(0);
  Real a = lift<Real>(p.alpha);
  Real r = lift<Real>(p.rho);
  Real s = sin(pi<Real>() * Real(j) * r);
  Real v = exp(specfun::log_gamma<Real>(Real(1 + Real(j) / a))) * s / (pi<Real>() * Real(j));
  return (j % 2 == 0) ? Real(-v) : v;
}

template <class Real>
std::optional<Real> tail_series(const StableParams& p, int j, const Real& x, const EvalConfig& cfg) {
  auto s = tail_scaled<Real>(p, j, x, cfg);
  if (!s) return std::nullopt;
  return s->value();
}

template <class Real>
std::optional<Real> taylor_series(const StableParams& p, int j, const Real& x, const EvalConfig& cfg) {
  auto s = taylor_scaled<Real>(p, j, x, cfg);
  if (!s) return std::nullopt;
  return s->value();
}

template <class Real>
Real integral_log_density(const StableParams& p, const Real& x, const EvalConfig& cfg) {
  using std::log;
  if (p.alpha == 1.0 || p.alpha == 2.0) throw InvalidParams("integral representation needs alpha != 1, 2");
  if (!(x > 0)) throw DomainError("integral representation needs x > 0");
  if (p.alpha < 1 && p.rho == 0.0) return neg_inf<Real>();
  return at_working_precision<Real>(cfg, 10, [&]() -> Real {
    Real xx = at_scope(x);
    auto parts = integral_parts<Real>(p, xx, cfg, false);
    if (!(parts.i0 > 0)) return neg_inf<Real>();
    return parts.log_scale + log(parts.i0);
  });
}

template <class Real>
Real log_density(const StableParams& p, const Real& x, const EvalConfig& cfg) {
  cfg.validate();
  return at_working_precision<Real>(cfg, 10, [&]() -> Real {
    Real xx = at_scope(x);
    if (xx < 0) return log_density_positive<Real>(p.reflected(), Real(-xx), cfg);
    return log_density_positive<Real>(p, xx, cfg);
  });
}

template <class Real>
Real density(const StableParams& p, const Real& x, const EvalConfig& cfg) {
  using std::exp;
  Real l = log_density<Real>(p, x, cfg);
  if (l == neg_inf<Real>()) return Real(0);
  return exp(l);
}

template <class Real>
Real density_derivative(const StableParams& p, int j, const Real& x, const EvalConfig& cfg) {
  cfg.validate();
  if (j < 1 || j > 8) throw InvalidParams("density_derivative: order must lie in 1..8");
  return at_working_precision<Real>(cfg, 10, [&]() -> Real {
    Real xx = at_scope(x);
    if (p.alpha == 2.0) return gaussian_derivative<Real>(j, xx);
    if (p.alpha == 1.0) return cauchy_derivative<Real>(p, j, xx);
    if (xx < 0) {
      Real v = density_derivative<Real>(p.reflected(), j, Real(-xx), cfg);
      return (j % 2 == 0) ? v : Real(-v);
    }
    if (xx == 0) return derivative_at_zero<Real>(p, j + 1);
    if (p.alpha < 1 && p.rho == 0.0) return Real(0);
    bool below_one = p.alpha < 1;
    auto s1 = below_one ? tail_series<Real>(p, j, xx, cfg) : taylor_series<Real>(p, j, xx, cfg);
    if (s1) return *s1;
    auto s2 = below_one ? taylor_series<Real>(p, j, xx, cfg) : tail_series<Real>(p, j, xx, cfg);
    if (s2) return *s2;
    if (j == 1) {
      Real f = density<Real>(p, xx, cfg);
      return f * log_derivative<Real>(p, xx, cfg) / xx;
    }
    // differences lose about j * log10(1/h) digits, so even the double path works in mp
    EvalConfig fine = cfg;
    fine.precision = (is_double<Real> ? Precision(16) : cfg.precision).raised(20 + 4 * j);
    PrecisionScope scope(fine.precision.digits + 10);
    mp_real xm(xx);
    return Real(finite_difference_derivative<mp_real>(p, j, at_scope(xm), fine));
  });
}

template <class Real>
Real log_derivative(const StableParams& p, const Real& x, const EvalConfig& cfg) {
  cfg.validate();
  if (!(x > 0)) throw DomainError("log_derivative needs x > 0");
  return at_working_precision<Real>(cfg, 10, [&]() -> Real {
    Real xx = at_scope(x);
    if (p.alpha == 2.0) return Real(-xx * xx / 2);
    if (p.alpha == 1.0) return xx * cauchy_derivative<Real>(p, 1, xx) / cauchy_derivative<Real>(p, 0, xx);
    if (p.alpha < 1 && p.rho == 0.0) throw DomainError("log_derivative: density vanishes on (0, inf)");
    if (is_levy(p)) return Real(Real(-3) / 2 + 1 / (4 * xx));
    auto s = series_pair_log_derivative<Real>(p, xx, cfg);
    if (s) return *s;
    auto parts = integral_parts<Real>(p, xx, cfg, true);
    Real a = lift<Real>(p.alpha);
    return 1 / (a - 1) - a / (a - 1) * parts.i1 / parts.i0;
  });
}

template <class Real>
Real fractional_moment_positive_part(const StableParams& p, const Real& s) {
  using std::exp;
  using std::sin;
  if (p.rho == 0.0) throw DomainError("fractional moment of X+ needs rho > 0");
  double sd = to_double(s);
  if (!(sd > -1.0) || !(sd < p.alpha)) throw DomainError("fractional moment: s outside (-1, alpha)");
  Real a = lift<Real>(p.alpha);
  Real r = lift<Real>(p.rho);
  Real ss = at_scope(s);
  Real sinc = 1;
  if (ss != 0) {
    Real arg = pi<Real>() * r * ss;
    sinc = sin(arg) / arg;
  }
  // sin(pi rho s)/(rho sin(pi s)) / Gamma(1-s) = sinc(pi rho s) Gamma(1+s) / 1, which removes
  // the removable singularities at integer s.
  return sinc * exp(specfun::log_gamma<Real>(Real(1 + ss)) + specfun::log_gamma<Real>(Real(1 - ss / a)));
}

template <class Real>
Real spacetime_density(const StableParams& p, const Real& t, const Real& x, const EvalConfig& cfg) {
  using std::pow;
  if (!(t > 0)) throw DomainError("spacetime_density needs t > 0");
  return at_working_precision<Real>(cfg, 10, [&]() -> Real {
    Real scale = pow(at_scope(t), Real(-1 / lift<Real>(p.alpha)));
    return scale * density<Real>(p, Real(at_scope(x) * scale), cfg);
  });
}

template <class Real>
Real symmetric_density(double alpha_sub, int n, const Real& x, const EvalConfig& cfg) {
  using std::abs;
  using std::cos;
  using std::exp;
  using std::log;
  using std::pow;
  using std::sin;
  if (!(alpha_sub > 0.0) || !(alpha_sub < 1.0)) throw InvalidParams("symmetric_density: alpha_sub must lie in (0,1)");
  if (n < 0) throw InvalidParams("symmetric_density: derivative order must be non-negative");
  cfg.validate();
  return at_working_precision<Real>(cfg, 10, [&]() -> Real {
    Real a = lift<Real>(alpha_sub);
    Real two_a = 2 * a;
    Real xx = at_scope(x);
    if (xx == 0) {
      if (n % 2 == 1) return Real(0);
      Real v = exp(specfun::log_gamma<Real>(Real(Real(n + 1) / two_a))) / (two_a * pi<Real>());
      return ((n / 2) % 2 == 0) ? v : Real(-v);
    }
    if (xx < 0) {
      Real v = symmetric_density<Real>(alpha_sub, n, Real(-xx), cfg);
      return (n % 2 == 0) ? v : Real(-v);
    }
    const Real tol = quad_tol<Real>(cfg);
    const int levels = is_double<Real> ? 11 : 14;
    if (alpha_sub < 0.5) {
      // Rotate the contour onto the imaginary axis: the integrand is then exponentially damped.
      Real ca = cos(pi<Real>() * a);
      Real sa = sin(pi<Real>() * a);
      auto f = [&](const Real& r) -> Real {
        if (r == 0) return Real(0);
        Real ra = pow(r, two_a);
        return exp(Real(n) * log(r) - r * xx - ra * ca) * sin(ra * sa);
      };
      auto res = quad::exp_sinh<Real>(f, Real(0), tol, levels);
      if (!res.converged) throw NonConvergence("symmetric_density: integral did not converge");
      Real v = res.value / pi<Real>();
      return (n % 2 == 0) ? v : Real(-v);
    }
    // Direct cosine integral over panels of at most one half-period.
    double tmax = std::pow(60.0 + n * 4.0 + target_digits<Real>(cfg) * kLn10, 1.0 / (2 * alpha_sub));
    double width = std::min(1.0, M_PI / std::max(1e-300, std::abs(to_double(xx))));
    int panels = static_cast<int>(std::ceil(tmax / width));
    Real phase = pi<Real>() * Real(n) / 2;
    auto f = [&](const Real& t) -> Real {
      return pow(t, Real(n)) * cos(t * xx + phase) * exp(-pow(t, two_a));
    };
    Real total = 0;
    for (int k = 0; k < panels; ++k) {
      Real lo = Real(k) * Real(width);
      Real hi = Real(k + 1) * Real(width);
      auto res = quad::tanh_sinh<Real>(f, lo, hi, tol, levels);
      if (!res.converged) throw NonConvergence("symmetric_density: panel did not converge");
      total += res.value;
    }
    return total / pi<Real>();
  });
}

double symmetric_density_hermite(double alpha_sub, int n, double x, const EvalConfig& cfg) {
  if (!(alpha_sub > 0.0) || !(alpha_sub < 1.0)) throw InvalidParams("alpha_sub must lie in (0,1)");
  if (n < 0) throw InvalidParams("derivative order must be non-negative");
  if (x == 0.0) throw DomainError("Hermite representation needs x != 0");
  if (x < 0) {
    double v = symmetric_density_hermite(alpha_sub, n, -x, cfg);
    return (n % 2 == 0) ? v : -v;
  }
  StableParams pos(alpha_sub, 1.0);
  auto f = [&](double z) {
    if (z <= 0) return 0.0;
    double arg = x * x / (4 * z * z);
    double fa = density<double>(pos, arg, cfg);
    if (fa == 0) return 0.0;
    return std::exp(-z * z) * std::pow(z, n - 2) * specfun::hermite<double>(static_cast<unsigned>(n), z) * fa;
  };
  auto res = quad::exp_sinh<double>(f, 0.0, cfg.quadrature_rel_tol);
  if (!res.converged) throw NonConvergence("Hermite representation did not converge");
  double v = std::pow(x, 1 - n) / (2 * std::sqrt(M_PI)) * res.value;
  return (n % 2 == 0) ? v : -v;
}

double density_inversion(const StableParams& p, double x, const EvalConfig& cfg) {
  cfg.validate();
  if (p.alpha < 1.0 && x != 0.0) {
    StableParams q = x < 0 ? p.reflected() : p;
    double xx = std::abs(x);
    if (q.rho == 0.0) return 0.0;
    double c = std::cos(M_PI * q.alpha * q.rho);
    double s = std::sin(M_PI * q.alpha * q.rho);
    auto f = [&](double r) {
      double ra = std::pow(r, q.alpha);
      return std::exp(-r * xx - ra * c) * std::sin(ra * s);
    };
    auto res = quad::exp_sinh<double>(f, 0.0, cfg.quadrature_rel_tol);
    if (!res.converged) throw NonConvergence("Laplace-contour inversion did not converge");
    return res.value / M_PI;
  }
  const double psi = M_PI * p.alpha * (0.5 - p.rho);
  const double cpsi = std::cos(psi);
  const double spsi = std::sin(psi);
  auto f = [&](double lam) {
    double la = std::pow(lam, p.alpha);
    return std::exp(-la * cpsi) * std::cos(lam * x + la * spsi);
  };
  if (x == 0.0) {
    // substitute u = lambda^alpha to remove the slow algebraic scale
    auto g = [&](double u) {
      return std::exp(-u * cpsi) * std::cos(u * spsi) * std::pow(u, 1.0 / p.alpha - 1.0) / p.alpha;
    };
    auto res = quad::exp_sinh<double>(g, 0.0, cfg.quadrature_rel_tol);
    if (!res.converged) throw NonConvergence("Fourier inversion did not converge");
    return res.value / M_PI;
  }
  const double lam_max = std::pow(60.0 / cpsi, 1.0 / p.alpha);
  const double width = std::min(1.0, M_PI / std::abs(x));
  const int panels = static_cast<int>(std::ceil(lam_max / width));
  double total = 0;
  for (int k = 0; k < panels; ++k) {
    double err = 0;
    total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, k * width, (k + 1) * width, 8,
                                                                           1e-13, &err);
  }
  return total / M_PI;
}

double laplace_oracle(double alpha, double lambda, const EvalConfig& cfg) {
  if (!(alpha > 0.0) || !(alpha < 1.0)) throw InvalidParams("laplace_oracle: alpha must lie in (0,1)");
  if (!(lambda > 0.0)) throw InvalidParams("laplace_oracle: lambda must be positive");
  cfg.validate();
  StableParams p(alpha, 1.0);
  auto f = [&](double x) { return density<double>(p, x, cfg) * std::exp(-lambda * x); };
  auto res = quad::exp_sinh<double>(f, 0.0, cfg.quadrature_rel_tol);
  if (!res.converged) throw NonConvergence("laplace_oracle: quadrature did not converge");
  return res.value;
}

double positive_mass(const StableParams& p, const EvalConfig& cfg) {
  cfg.validate();
  auto f = [&](double x) { return density<double>(p, x, cfg); };
  auto res = quad::exp_sinh<double>(f, 0.0, cfg.quadrature_rel_tol);
  if (!res.converged) throw NonConvergence("positive_mass: quadrature did not converge");
  return res.value;
}

double mode(const StableParams& p, const EvalConfig& cfg) {
  if (p.rho != 1.0 || !(p.alpha < 1.0)) throw InvalidParams("mode: needs rho = 1 and alpha < 1");
  cfg.validate();
  auto slope = [&](double x) { return log_derivative<double>(p, x, cfg); };
  const int n = 91;
  const double lo = 1e-6;
  const double hi = 1e3;
  std::vector<double> xs(n);
  std::vector<double> vs(n);
  for (int i = 0; i < n; ++i) {
    xs[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
    vs[i] = slope(xs[i]);
  }
  int changes = 0;
  int at = -1;
  for (int i = 1; i < n; ++i) {
    if ((vs[i - 1] > 0) != (vs[i] > 0)) {
      ++changes;
      at = i;
    }
  }
  if (changes != 1) throw NonConvergence("mode: bracketing failure (f' must change sign exactly once)");
  std::uintmax_t iters = 200;
  auto tol = boost::math::tools::eps_tolerance<double>(50);
  auto root = boost::math::tools::toms748_solve(slope, xs[at - 1], xs[at], vs[at - 1], vs[at], tol, iters);
  return 0.5 * (root.first + root.second);
}

#define STABLETP_STABLE_INSTANTIATE(R)                                                                   \
  template R density<R>(const StableParams&, const R&, const EvalConfig&);                               \
  template R log_density<R>(const StableParams&, const R&, const EvalConfig&);                           \
  template R density_derivative<R>(const StableParams&, int, const R&, const EvalConfig&);               \
  template R log_derivative<R>(const StableParams&, const R&, const EvalConfig&);                        \
  template R derivative_at_zero<R>(const StableParams&, int);                                            \
  template std::optional<R> tail_series<R>(const StableParams&, int, const R&, const EvalConfig&);       \
  template std::optional<R> taylor_series<R>(const StableParams&, int, const R&, const EvalConfig&);     \
  template R integral_log_density<R>(const StableParams&, const R&, const EvalConfig&);                  \
  template R symmetric_density<R>(double, int, const R&, const EvalConfig&);                             \
  template R fractional_moment_positive_part<R>(const StableParams&, const R&);                          \
  template R spacetime_density<R>(const StableParams&, const R&, const R&, const EvalConfig&);

STABLETP_STABLE_INSTANTIATE(double)
STABLETP_STABLE_INSTANTIATE(mp_real)

}  // namespace stabletp::stable
