#include "stabletp/asymptotics.hpp"

#include "stabletp/errors.hpp"
#include "stabletp/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace stabletp::asymptotics {

void DeltaSeriesConfig::validate() const {
  if (q_max < 5) throw InvalidParams("DeltaSeriesConfig: q_max must be at least 5");
  if (!(fd_step > 0)) throw InvalidParams("DeltaSeriesConfig: fd_step must be positive");
  if (fd_levels < 2) throw InvalidParams("DeltaSeriesConfig: fd_levels must be at least 2");
}

namespace {

using Matrix = std::vector<std::vector<mp_real>>;

void check_k(int k) {
  if (k < 1 || k > 5) throw InvalidParams("delta_k: k must lie in 1..5");
}

// s (s - 1) ... (s - n + 1)
mp_real falling(const mp_real& s, int n) {
  mp_real r = 1;
  for (int i = 0; i < n; ++i) r *= s - i;
  return r;
}

mp_real binomial(int n, int r) {
  mp_real b = 1;
  for (int i = 1; i <= r; ++i) b = b * (n - r + i) / i;
  return b;
}

// log of |term q| of the tail series of z^j f^{(j)} differentiated i times, in double
double tail_term_log(double alpha, int q, int order, double lz) {
  double s = q * alpha + 1;
  return std::lgamma(1 + q * alpha) - std::lgamma(q + 1.0) - q * alpha * lz + order * std::log(s + order);
}

// Entries from the tail series truncated at q_max terms, at the precision in scope.
Matrix series_matrix(const stable::StableParams& p, int k, const mp_real& z, int q_max) {
  const mp_real a = lift<mp_real>(p.alpha);
  const mp_real r = lift<mp_real>(p.rho);
  const mp_real lz = log(z);
  Matrix m(k, std::vector<mp_real>(k, mp_real(0)));
  for (int q = 1; q <= q_max; ++q) {
    mp_real qa = mp_real(q) * a;
    mp_real sn = sin(pi<mp_real>() * qa * r);
    if (sn == 0) continue;
    mp_real c = exp(specfun::log_gamma<mp_real>(mp_real(1 + qa)) - specfun::log_gamma<mp_real>(mp_real(q + 1))) * sn /
                pi<mp_real>();
    if (q % 2 == 0) c = -c;
    mp_real s = -qa - 1;
    mp_real zs = exp(s * lz);
    std::vector<mp_real> pf(k);
    for (int n = 0; n < k; ++n) pf[n] = falling(s, n);
    for (int i = 0; i < k; ++i) {
      mp_real zi = zs / pow(z, i);
      for (int j = 0; j < k; ++j) m[i][j] += c * pf[i] * pf[j] * zi;
    }
  }
  return m;
}

// Entries by Leibniz' rule from f^{(n)}(z), n <= 2k - 2.
Matrix leibniz_matrix(int k, const mp_real& z, const std::vector<mp_real>& d) {
  Matrix m(k, std::vector<mp_real>(k));
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      mp_real e = 0;
      for (int l = 0; l <= std::min(i, j); ++l) {
        mp_real zp = (j - l == 0) ? mp_real(1) : mp_real(pow(z, j - l));
        e += binomial(i, l) * falling(mp_real(j), l) * zp * d[j + i - l];
      }
      m[i][j] = e;
    }
  }
  return m;
}

int guard_digits(const stable::StableParams& p, int k, double z) {
  // the determinant cancels roughly alpha k(k-1)/2 decades per decade of z beyond 1
  double lz = z > 1 ? std::log10(z) : 0.0;
  return 20 + static_cast<int>(std::ceil(p.alpha * k * (k - 1) / 2.0 * lz));
}

}  // namespace

bool delta_k_uses_series(const stable::StableParams& p, int k, double z, const DeltaSeriesConfig& dcfg,
                         const stable::EvalConfig& cfg) {
  if (!(p.alpha < 1) || !(z > 0)) return false;
  const double lz = std::log(z);
  const int order = 2 * (k - 1);
  double lmax = -HUGE_VAL;
  for (int q = 1; q <= dcfg.q_max; ++q) lmax = std::max(lmax, tail_term_log(p.alpha, q, order, lz));
  double lnext = tail_term_log(p.alpha, dcfg.q_max + 1, order, lz);
  // the largest term may not exceed the first by much either, or the sum cancels badly
  double lfirst = tail_term_log(p.alpha, 1, 0, lz);
  double ln10 = std::log(10.0);
  // truncation below 1e-30 relative (or the working accuracy, if coarser) is ample for the
  // double result and for the sign classification of the determinant
  const double digits = std::min(cfg.precision.digits + 5, 30);
  return lnext < lmax - digits * ln10 && lmax - lfirst < 10 * ln10;
}

DeltaValue delta_k_value(const stable::StableParams& p, int k, double z, const DeltaSeriesConfig& dcfg,
                         const stable::EvalConfig& cfg) {
  check_k(k);
  dcfg.validate();
  cfg.validate();
  if (!(z >= 0) || !std::isfinite(z)) throw DomainError("delta_k needs z >= 0");
  const int work = cfg.precision.digits + guard_digits(p, k, z);
  PrecisionScope scope(work);
  Matrix m;
  if (z == 0) {
    std::vector<mp_real> d(2 * k - 1);
    for (int n = 0; n < 2 * k - 1; ++n) d[n] = stable::derivative_at_zero<mp_real>(p, n + 1);
    m = leibniz_matrix(k, mp_real(0), d);
  } else if (delta_k_uses_series(p, k, z, dcfg, cfg)) {
    m = series_matrix(p, k, mp_real(z), dcfg.q_max);
  } else {
    stable::EvalConfig fine = cfg;
    fine.precision = Precision(work);
    mp_real zm(z);
    std::vector<mp_real> d(2 * k - 1);
    d[0] = at_scope(stable::density<mp_real>(p, zm, fine));
    for (int n = 1; n < 2 * k - 1; ++n) d[n] = at_scope(stable::density_derivative<mp_real>(p, n, zm, fine));
    m = leibniz_matrix(k, zm, d);
  }
  DeltaValue out;
  out.hadamard_scale = 1;
  for (const auto& row : m) {
    mp_real s = 0;
    for (const mp_real& v : row) s += v * v;
    out.hadamard_scale *= sqrt(s);
  }
  mp_real det = tp::determinant(m);
  if ((k * (k - 1) / 2) % 2 == 1) det = -det;
  out.value = det;
  out.classification = tp::classify(out.value, out.hadamard_scale, cfg.precision);
  return out;
}

double delta_k(const stable::StableParams& p, int k, double z, const DeltaSeriesConfig& dcfg,
               const stable::EvalConfig& cfg) {
  return to_double(delta_k_value(p, k, z, dcfg, cfg).value);
}

double delta_k_at_zero(const stable::StableParams& p, int k) {
  check_k(k);
  if (!(p.alpha > 0 && p.alpha < 2)) throw InvalidParams("delta_k_at_zero: alpha must lie in (0, 2)");
  if (!(p.rho > 0 && p.rho < 1)) throw InvalidParams("delta_k_at_zero: rho must lie in (0, 1)");
  PrecisionScope scope(40);
  const mp_real a = lift<mp_real>(p.alpha);
  const mp_real r = lift<mp_real>(p.rho);
  mp_real v = 1;
  for (int j = 1; j <= k; ++j) {
    if (near_integer(j * p.rho, 1e-13)) return 0.0;
    mp_real fact = exp(specfun::log_gamma<mp_real>(mp_real(j)));
    v *= fact * exp(specfun::log_gamma<mp_real>(mp_real(1 + mp_real(j) / a))) * sin(pi<mp_real>() * j * r) /
         (pi<mp_real>() * j);
  }
  return to_double(v);
}

double predicted_tail_exponent(double alpha, int k) { return -k * (k + 1) * (alpha + 1) / 2.0; }

double tail_exponent_fit(const stable::StableParams& p, int k, const std::vector<double>& z_grid,
                         const DeltaSeriesConfig& dcfg, const stable::EvalConfig& cfg) {
  check_k(k);
  if (!(p.alpha < 1)) throw InvalidParams("tail_exponent_fit: alpha must be below 1");
  for (int q = 1; q <= k; ++q) {
    if (near_integer(q * p.rho * p.alpha, 1e-12)) {
      throw InvalidParams("tail_exponent_fit: a leading sine factor vanishes");
    }
  }
  std::vector<double> zs = z_grid;
  if (zs.empty()) {
    for (int i = 0; i <= 20; ++i) zs.push_back(std::pow(10.0, 2.0 + i / 10.0));
  }
  if (zs.size() < 2) throw InvalidParams("tail_exponent_fit: need at least two abscissae");
  std::vector<double> lx;
  std::vector<double> ly;
  for (double z : zs) {
    if (!(z > 0)) throw InvalidParams("tail_exponent_fit: abscissae must be positive");
    DeltaValue d = delta_k_value(p, k, z, dcfg, cfg);
    if (d.value == 0) continue;
    PrecisionScope scope(cfg.precision);
    lx.push_back(std::log(z));
    ly.push_back(to_double(mp_real(log(abs(d.value)))));
  }
  if (lx.size() < 2) throw DegenerateFit("tail_exponent_fit: Delta^k vanishes on the grid");
  double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / lx.size();
  double my = std::accumulate(ly.begin(), ly.end(), 0.0) / ly.size();
  double sxy = 0;
  double sxx = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  if (!(sxx > 0)) throw DegenerateFit("tail_exponent_fit: abscissae coincide");
  return sxy / sxx;
}

namespace {

Identity enumerate_identity(double alpha, int k, bool radial) {
  if (!(alpha > 0 && alpha < 1)) throw InvalidParams("leading identity: alpha must lie in (0, 1)");
  if (k < 1 || k > 4) throw InvalidParams("leading identity: k must lie in 1..4");
  PrecisionScope scope(50);
  const mp_real a = lift<mp_real>(alpha);
  auto lg = [](const mp_real& x) { return specfun::log_gamma<mp_real>(x); };
  std::vector<int> sigma(k);
  std::iota(sigma.begin(), sigma.end(), 1);
  mp_real lhs = 0;
  do {
    Matrix m(k, std::vector<mp_real>(k));
    for (int i = 1; i <= k; ++i) {
      mp_real sa = sigma[i - 1] * a;
      mp_real prod = 1;
      for (int r = 1; r < i; ++r) prod *= r + sa;
      if (radial) prod *= exp(lg(mp_real(1 + sa)));
      for (int j = 1; j <= k; ++j) m[i - 1][j - 1] = exp(lg(mp_real(j + sa))) * prod;
    }
    lhs += tp::determinant(m);
  } while (std::next_permutation(sigma.begin(), sigma.end()));
  mp_real rhs = pow(a, k * (k - 1));
  mp_real inner = 1;
  for (int j = 1; j <= k; ++j) {
    mp_real fact = exp(lg(mp_real(j)));
    mp_real g = exp(lg(mp_real(1 + a * j)));
    inner *= radial ? mp_real(fact * g) : mp_real(fact * fact * g);
  }
  rhs *= radial ? mp_real(inner * inner) : inner;
  return {to_double(lhs), to_double(rhs)};
}

}  // namespace

Identity leading_coefficient_identity(double alpha, int k) { return enumerate_identity(alpha, k, false); }

Identity radial_leading_identity(double alpha, int k) { return enumerate_identity(alpha, k, true); }

mp_real wronskian(const std::vector<SmoothFunction>& fs, const mp_real& z, const DeltaSeriesConfig& dcfg,
                  const Precision& prec) {
  dcfg.validate();
  const int k = static_cast<int>(fs.size());
  if (k < 1) throw InvalidParams("wronskian needs at least one function");
  // each difference quotient of order n loses about n log10(1/h) digits at the finest level
  const double zd = to_double(z);
  const double h0 = dcfg.fd_step * std::max(1.0, std::abs(zd));
  const double finest = h0 / std::pow(2.0, dcfg.fd_levels - 1);
  const int guard = 15 + static_cast<int>(std::ceil((k - 1) * std::max(0.0, -std::log10(finest))));
  PrecisionScope scope(prec.digits + guard);
  const mp_real zz = at_scope(z);
  Matrix m(k, std::vector<mp_real>(k));
  for (int j = 0; j < k; ++j) {
    // all derivative orders of f_j share the function values on the stencils
    for (int n = 0; n < k; ++n) {
      if (n == 0) {
        m[0][j] = at_scope(fs[j](zz));
        continue;
      }
      std::vector<std::vector<mp_real>> table(dcfg.fd_levels);
      mp_real h(h0);
      for (int lev = 0; lev < dcfg.fd_levels; ++lev) {
        mp_real s = 0;
        for (int i = 0; i <= n; ++i) {
          mp_real x = zz + (mp_real(n) / 2 - i) * h;
          mp_real term = binomial(n, i) * at_scope(fs[j](x));
          s += (i % 2 == 0) ? term : mp_real(-term);
        }
        table[lev].resize(lev + 1);
        table[lev][0] = s / pow(h, n);
        mp_real factor = 1;
        for (int r = 1; r <= lev; ++r) {
          factor *= 4;
          table[lev][r] = table[lev][r - 1] + (table[lev][r - 1] - table[lev - 1][r - 1]) / (factor - 1);
        }
        h /= 2;
      }
      m[n][j] = table.back().back();
    }
  }
  mp_real w = tp::determinant(m);
  PrecisionScope back(prec);
  return at_scope(w);
}

std::vector<SmoothFunction> delta_generators(const stable::StableParams& p, int k, const stable::EvalConfig& cfg) {
  check_k(k);
  std::vector<SmoothFunction> out;
  for (int j = 1; j <= k; ++j) {
    out.push_back([p, j, cfg](const mp_real& x) -> mp_real {
      stable::EvalConfig c = cfg;
      c.precision = Precision(working_digits<mp_real>());
      mp_real xx = at_scope(x);
      mp_real f = j == 1 ? stable::density<mp_real>(p, xx, c) : stable::density_derivative<mp_real>(p, j - 1, xx, c);
      mp_real v = at_scope(f) * (j == 1 ? mp_real(1) : mp_real(pow(xx, j - 1)));
      return (j % 2 == 0) ? mp_real(-v) : v;
    });
  }
  return out;
}

}  // namespace stabletp::asymptotics
