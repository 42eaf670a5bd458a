#pragma once

#include "stabletp/precision.hpp"

#include <complex>

namespace stabletp::specfun {

// log|Gamma(x)| for real x; throws PoleError at non-positive integers.
template <class Real>
Real log_gamma(const Real& x);

// Principal-branch log Gamma for Re z > 0, continued by reflection elsewhere
// (there the imaginary part is only defined modulo 2*pi).
template <class Real>
std::complex<Real> log_gamma(const std::complex<Real>& z);

template <class Real>
Real gamma(const Real& x);

template <class Real>
Real digamma(const Real& x);

// Physicists' Hermite polynomial H_n.
template <class Real>
Real hermite(unsigned n, const Real& z);

// Chebyshev polynomial of the second kind U_n.
template <class Real>
Real chebyshev_u(unsigned n, const Real& x);

struct BetaParams {
  double a;
  double b;
  BetaParams(double a_, double b_);
};

template <class Real>
Real beta_density(const BetaParams& p, const Real& x);

template <class Real>
Real gamma_density(const Real& shape, const Real& x);

// E[B^s] for B ~ Beta(a, b), s > -a.
template <class Real>
Real beta_fractional_moment(const BetaParams& p, const Real& s);

// E[B^{s}] for complex s with Re s > -a.
template <class Real>
std::complex<Real> beta_complex_moment(const Real& a, const Real& b, const std::complex<Real>& s);

}  // namespace stabletp::specfun
