#pragma once

// Double-exponential quadrature templated on the working type, so that the same
// rules serve the double fast path and the MPFR path.

#include "stabletp/errors.hpp"
#include "stabletp/precision.hpp"

#include <cmath>
#include <type_traits>
#include <utility>

namespace stabletp::quad {

template <class Real>
struct Result {
  Real value{};
  Real error{};
  int evaluations = 0;
  bool converged = false;
};

namespace detail {

inline bool finite(double v) { return std::isfinite(v); }
inline bool finite(const mp_real& v) { return boost::multiprecision::isfinite(v); }

template <class Real>
Real abs_of(const Real& v) {
  using std::abs;
  return abs(v);
}

template <class Real>
int default_levels() {
  return std::is_same_v<Real, double> ? 10 : 12;
}

// Convergence test between successive levels. Besides the plain difference test, once the
// differences shrink quadratically (the usual double-exponential regime) the error of the
// current level is about diff^2 / prev_diff, which saves the final confirming level.
template <class Real>
bool level_converged(int level, const Real& cur, const Real& diff, const Real& prev_diff, const Real& rel_tol,
                     const Real& floor_abs) {
  using std::abs;
  using std::log;
  if (level < 3) return false;
  if (diff <= rel_tol * abs(cur) || diff <= floor_abs) return true;
  if (level < 4 || !(prev_diff > 0) || !(diff > 0) || !(abs(cur) > 0)) return false;
  double l1 = to_double(Real(log(prev_diff / abs(cur))));
  double l2 = to_double(Real(log(diff / abs(cur))));
  double lt = to_double(Real(log(rel_tol)));
  return l1 < -2.0 && l2 <= 1.5 * l1 && 2 * l2 - l1 <= lt - 2.3;
}

}  // namespace detail

// Integral of f over [a, b]. Integrable endpoint singularities are fine; f is never
// evaluated exactly at an endpoint. If f accepts two arguments it also receives the
// signed distance to the nearer endpoint (x - a near a, x - b near b), which keeps
// factors like (b - x)^p accurate close to b.
template <class Real, class F>
Result<Real> tanh_sinh(F&& f, const Real& a, const Real& b, const Real& rel_tol, int max_levels = 0) {
  using std::abs;
  using std::cosh;
  using std::exp;
  using std::sinh;
  if (max_levels <= 0) max_levels = detail::default_levels<Real>();
  const Real half = (b - a) / 2;
  const Real mid = a + half;
  const Real pi_half = pi<Real>() / 2;
  const Real eps = epsilon<Real>();
  const Real tiny = eps * eps;
  Result<Real> out;
  Real maxterm = 0;
  Real l1 = 0;

  auto call = [&](const Real& x, const Real& xc) -> Real {
    Real v;
    if constexpr (std::is_invocable_v<F&, const Real&, const Real&>) {
      v = f(x, xc);
    } else {
      v = f(x);
    }
    ++out.evaluations;
    if (!detail::finite(v)) v = 0;
    return v;
  };

  // Returns 0 when the nodes have collapsed onto the endpoints, 1 for a regular pair,
  // 2 for a pair whose contribution is negligible.
  auto node_pair = [&](const Real& t, Real& sum) -> int {
    Real u = pi_half * sinh(t);
    Real e = exp(-2 * u);
    Real delta = half * (2 * e / (1 + e));
    Real w = half * pi_half * cosh(t) * (4 * e / ((1 + e) * (1 + e)));
    if (delta == 0 || w == 0) return 0;
    constexpr bool with_complement = std::is_invocable_v<F&, const Real&, const Real&>;
    Real xl = a + delta;
    Real xr = b - delta;
    // Without the complement argument a node that rounds onto its endpoint is dropped.
    bool left = with_complement || xl != a;
    bool right = with_complement || xr != b;
    if (!left && !right) return 0;
    Real fsum = 0;
    if (left) fsum += call(xl, delta);
    if (right) fsum += call(xr, Real(-delta));
    Real term = w * fsum;
    sum += term;
    Real at = abs(term);
    l1 += at;
    if (at > maxterm) maxterm = at;
    return at <= tiny * maxterm ? 2 : 1;
  };

  // Level 0: h = 1, find the truncation point of the t axis.
  Real sum = half * pi_half * call(mid, half);
  maxterm = abs(sum);
  l1 = maxterm;
  int tmax = 0;
  int small = 0;
  for (int k = 1; k <= 8; ++k) {
    int st = node_pair(Real(k), sum);
    if (st == 0) break;
    tmax = k;
    if (st == 2) {
      if (++small >= 2) break;
    } else {
      small = 0;
    }
  }
  Real h = 1;
  Real prev = h * sum;
  Real prev_diff = 0;
  const Real tlimit = Real(tmax) + Real(1) / 2;
  for (int level = 1; level <= max_levels; ++level) {
    h /= 2;
    for (Real t = h; t < tlimit; t += 2 * h) {
      if (node_pair(t, sum) == 0) break;
    }
    Real cur = h * sum;
    Real diff = abs(Real(cur - prev));
    out.value = cur;
    out.error = diff;
    // Integrals that cancel to (nearly) zero are judged against the L1 norm instead.
    if (detail::level_converged<Real>(level, cur, diff, prev_diff, rel_tol, Real(64 * eps * h * l1))) {
      out.converged = true;
      return out;
    }
    prev = cur;
    prev_diff = diff;
  }
  return out;
}

namespace detail {

// Shared driver for the half-line and whole-line rules. node(t, x, w) maps the
// t-axis to an abscissa and weight; it returns false once the abscissa degenerates.
template <class Real, class F, class Node>
Result<Real> de_infinite(F&& f, Node&& node, const Real& rel_tol, int max_levels) {
  using std::abs;
  const Real eps = epsilon<Real>();
  const Real tiny = eps * eps;
  Result<Real> out;
  Real maxterm = 0;
  Real l1 = 0;

  auto term = [&](const Real& t, Real& value) -> bool {
    Real x;
    Real w;
    if (!node(t, x, w)) return false;
    Real fx = f(x);
    ++out.evaluations;
    if (!finite(fx)) fx = 0;
    value = w * fx;
    l1 += abs(value);
    return true;
  };

  // Level 0 with h = 1/2: scan both directions until terms are negligible.
  const Real h0 = Real(1) / 2;
  Real sum = 0;
  Real v;
  if (term(Real(0), v)) {
    sum += v;
    maxterm = abs(v);
  }
  Real tlo = 0;
  Real thi = 0;
  for (int dir = -1; dir <= 1; dir += 2) {
    int small = 0;
    for (int k = 1; k <= 16; ++k) {
      Real t = h0 * k * dir;
      if (!term(t, v)) break;
      sum += v;
      Real av = abs(v);
      if (av > maxterm) maxterm = av;
      if (dir < 0) tlo = t; else thi = t;
      if (av <= tiny * maxterm) {
        if (++small >= 2) break;
      } else {
        small = 0;
      }
    }
  }
  Real h = h0;
  Real prev = h * sum;
  Real prev_diff = 0;
  for (int level = 1; level <= max_levels; ++level) {
    h /= 2;
    for (Real t = tlo + h; t < thi; t += 2 * h) {
      if (term(t, v)) sum += v;
    }
    Real cur = h * sum;
    Real diff = abs(Real(cur - prev));
    out.value = cur;
    out.error = diff;
    // Integrals that cancel to (nearly) zero are judged against the L1 norm instead.
    if (level_converged<Real>(level, cur, diff, prev_diff, rel_tol, Real(64 * eps * h * l1))) {
      out.converged = true;
      return out;
    }
    prev = cur;
    prev_diff = diff;
  }
  return out;
}

}  // namespace detail

// Integral of f over [a, +inf).
template <class Real, class F>
Result<Real> exp_sinh(F&& f, const Real& a, const Real& rel_tol, int max_levels = 0) {
  using std::cosh;
  using std::exp;
  using std::sinh;
  if (max_levels <= 0) max_levels = detail::default_levels<Real>();
  const Real pi_half = pi<Real>() / 2;
  auto node = [&](const Real& t, Real& x, Real& w) -> bool {
    Real e = exp(pi_half * sinh(t));
    if (!detail::finite(e)) return false;
    x = a + e;
    if (x == a || !detail::finite(x)) return false;
    w = pi_half * cosh(t) * e;
    return true;
  };
  return detail::de_infinite<Real>(std::forward<F>(f), node, rel_tol, max_levels);
}

// Integral of f over the whole real line.
template <class Real, class F>
Result<Real> sinh_sinh(F&& f, const Real& rel_tol, int max_levels = 0) {
  using std::cosh;
  using std::sinh;
  if (max_levels <= 0) max_levels = detail::default_levels<Real>();
  const Real pi_half = pi<Real>() / 2;
  auto node = [&](const Real& t, Real& x, Real& w) -> bool {
    Real s = pi_half * sinh(t);
    x = sinh(s);
    if (!detail::finite(x)) return false;
    w = pi_half * cosh(t) * cosh(s);
    return true;
  };
  return detail::de_infinite<Real>(std::forward<F>(f), node, rel_tol, max_levels);
}

}  // namespace stabletp::quad
