#pragma once

#include <boost/multiprecision/mpfr.hpp>

#include <cmath>
#include <complex>
#include <string>
#include <type_traits>

namespace stabletp {

using mp_real = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<0>,
                                              boost::multiprecision::et_off>;
using mp_complex = std::complex<mp_real>;

// Number of significant decimal digits used by high-precision evaluations.
struct Precision {
  int digits = 60;

  Precision() = default;
  explicit Precision(int d);

  Precision raised(int extra) const { return Precision(digits + extra); }
};

// Sets the working precision of freshly created mp_real values for the lifetime of the
// object and restores the previous setting on destruction.
class PrecisionScope {
 public:
  explicit PrecisionScope(Precision p);
  explicit PrecisionScope(int digits) : PrecisionScope(Precision(digits)) {}
  ~PrecisionScope();
  PrecisionScope(const PrecisionScope&) = delete;
  PrecisionScope& operator=(const PrecisionScope&) = delete;

 private:
  unsigned previous_;
};

// Digits currently carried by Real: 15 for double, the scope setting for mp_real.
template <class Real>
int working_digits() {
  if constexpr (std::is_same_v<Real, double>) {
    return 15;
  } else {
    return static_cast<int>(mp_real::default_precision());
  }
}

template <class Real>
Real epsilon() {
  if constexpr (std::is_same_v<Real, double>) {
    return 2.220446049250313e-16;
  } else {
    return boost::multiprecision::pow(mp_real(10), -working_digits<mp_real>());
  }
}

// Converts a double parameter to Real. Values within 1e-13 of a rational with a small
// denominator become that rational exactly (so 1/3 is one third at any precision);
// anything else is taken as its shortest decimal representation.
template <class Real>
Real lift(double v);

// Shortest round-trip decimal string of v.
std::string shortest_decimal(double v);

// Rational snap used by lift: returns true and fills p/q when v is close to p/q, q <= 64.
bool snap_rational(double v, long long& p, long long& q);

// Copy of v carried at the precision in scope. mp_real arithmetic inherits the precision
// of its operands, so inputs created elsewhere must be re-precisioned on entry.
inline double at_scope(double v) { return v; }
inline mp_real at_scope(const mp_real& v) {
  mp_real r(v);
  r.precision(mp_real::default_precision());
  return r;
}

inline double to_double(double v) { return v; }
inline double to_double(const mp_real& v) { return v.convert_to<double>(); }

template <class Real>
Real pi() {
  if constexpr (std::is_same_v<Real, double>) {
    return 3.141592653589793238462643383279502884;
  } else {
    mp_real r;
    mpfr_const_pi(r.backend().data(), GMP_RNDN);
    return r;
  }
}

template <class Real>
Real euler_gamma() {
  if constexpr (std::is_same_v<Real, double>) {
    return 0.577215664901532860606512090082402431;
  } else {
    mp_real r;
    mpfr_const_euler(r.backend().data(), GMP_RNDN);
    return r;
  }
}

// True when v is within 1e-9 (relative) of an integer.
bool near_integer(double v, double rel = 1e-9);

}  // namespace stabletp
