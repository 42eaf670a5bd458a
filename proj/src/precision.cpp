#include "stabletp/precision.hpp"

#include "stabletp/errors.hpp"

#include <array>
#include <charconv>
#include <cmath>

namespace stabletp {

Precision::Precision(int d) : digits(d) {
  if (d < 15 || d > 5000) throw InvalidParams("precision must be between 15 and 5000 digits");
}

PrecisionScope::PrecisionScope(Precision p) : previous_(mp_real::default_precision()) {
  mp_real::default_precision(static_cast<unsigned>(p.digits));
}

PrecisionScope::~PrecisionScope() { mp_real::default_precision(previous_); }

std::string shortest_decimal(double v) {
  std::array<char, 64> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

bool snap_rational(double v, long long& p, long long& q) {
  if (!std::isfinite(v)) return false;
  for (long long d = 1; d <= 64; ++d) {
    double n = std::round(v * static_cast<double>(d));
    if (std::abs(n) > 1e15) return false;
    double approx = n / static_cast<double>(d);
    double scale = std::max(std::abs(v), 1e-300);
    if (std::abs(approx - v) <= 1e-13 * scale || (v == 0.0)) {
      p = static_cast<long long>(n);
      q = d;
      return true;
    }
  }
  return false;
}

bool near_integer(double v, double rel) {
  double r = std::round(v);
  return std::abs(v - r) <= rel * std::max(1.0, std::abs(v));
}

template <>
double lift<double>(double v) {
  return v;
}

template <>
mp_real lift<mp_real>(double v) {
  long long p = 0;
  long long q = 1;
  if (snap_rational(v, p, q)) {
    mp_real r(p);
    if (q != 1) r /= mp_real(q);
    return r;
  }
  return mp_real(shortest_decimal(v));
}

}  // namespace stabletp
