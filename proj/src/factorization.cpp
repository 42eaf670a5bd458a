#include "stabletp/factorization.hpp"

#include "stabletp/errors.hpp"
#include "stabletp/specfun.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/digamma.hpp>

#include <algorithm>
#include <cmath>
#include <string>

namespace stabletp::factorization {

namespace {

using cplx = std::complex<double>;

constexpr double kEulerGamma = 0.577215664901532860606512090082402431;

void check_alpha(double alpha, const char* who) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidParams(std::string(who) + ": alpha must lie in (0, 1)");
}

cplx lgamma_c(const cplx& z) { return specfun::log_gamma<double>(z); }

double log_gamma_real(double x) { return specfun::log_gamma<double>(x); }

// Gauss-Legendre sum of (1/pi) Re[cf(s) e^{-isx}] over [0, cutoff] in panels of the given width.
struct PanelRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  std::vector<cplx> values;
};

PanelRule make_rule(const CharacteristicFunction& cf, double cutoff, double width) {
  using GL = boost::math::quadrature::gauss<double, 20>;
  const auto& abs = GL::abscissa();
  const auto& wts = GL::weights();
  PanelRule r;
  const auto panels = static_cast<std::size_t>(std::ceil(cutoff / width));
  const double h = cutoff / static_cast<double>(panels);
  r.nodes.reserve(panels * 2 * abs.size());
  for (std::size_t p = 0; p < panels; ++p) {
    double mid = (static_cast<double>(p) + 0.5) * h;
    for (std::size_t i = 0; i < abs.size(); ++i) {
      for (int sgn : {-1, 1}) {
        r.nodes.push_back(mid + sgn * 0.5 * h * abs[i]);
        r.weights.push_back(0.5 * h * wts[i]);
      }
    }
  }
  r.values.reserve(r.nodes.size());
  for (double s : r.nodes) r.values.push_back(cf(s));
  return r;
}

// Values of (1/pi) sum_k w_k Re[cf(s_k) e^{-i s_k x}] at every x. Equally spaced abscissae use
// the rotation recurrence e^{-is(x+h)} = e^{-isx} e^{-ish} instead of one sincos per pair.
std::vector<double> apply_rule(const PanelRule& r, const std::vector<double>& xs) {
  std::vector<double> out(xs.size(), 0.0);
  const std::size_t m = xs.size();
  const double h = m > 1 ? (xs[m - 1] - xs[0]) / static_cast<double>(m - 1) : 0.0;
  bool uniform = m > 2;
  for (std::size_t j = 1; uniform && j < m; ++j) {
    uniform = std::abs(xs[j] - xs[0] - static_cast<double>(j) * h) <= 1e-12 * (1 + std::abs(xs[j]));
  }
  for (std::size_t i = 0; i < r.nodes.size(); ++i) {
    const double s = r.nodes[i];
    const cplx wv = r.weights[i] * r.values[i];
    if (uniform) {
      // restart the recurrence every 32 steps to bound the accumulated rounding
      const cplx step = std::polar(1.0, -s * h);
      cplx rot;
      for (std::size_t j = 0; j < m; ++j) {
        rot = j % 32 == 0 ? std::polar(1.0, -s * xs[j]) : rot * step;
        out[j] += (wv * rot).real();
      }
    } else {
      for (std::size_t j = 0; j < m; ++j) out[j] += (wv * std::polar(1.0, -s * xs[j])).real();
    }
  }
  for (double& v : out) v /= M_PI;
  return out;
}

void check_decay(const CharacteristicFunction& cf) {
  double r0 = 0;
  for (int i = 0; i <= 10; ++i) {
    double s = std::pow(10.0, 2.0 + i / 10.0);
    double r = std::abs(cf(s)) * std::pow(s, 1.5);
    if (!std::isfinite(r)) throw DomainError("density_from_cf: characteristic function is not finite");
    if (i == 0) {
      r0 = r;
    } else if (r > std::max(1.01 * r0, 1e-30)) {
      throw DomainError("density_from_cf: |cf(s)| decays slower than |s|^-1.5 on [1e2, 1e3]");
    }
  }
}

// Smallest power-of-two cutoff whose tail, bounded through the local power-law decay rate,
// is below tol.
double choose_cutoff(const CharacteristicFunction& cf, double tol, double max_cutoff) {
  for (double cut = 64; cut <= max_cutoff; cut *= 2) {
    double m1 = std::abs(cf(cut / 2));
    double m2 = std::abs(cf(cut));
    if (m2 < 1e-300) return cut;
    double p = std::log2(m1 / m2);
    if (p > 1.2 && m2 * cut / (p - 1) / M_PI <= tol) return cut;
  }
  throw NonConvergence("density_from_cf: no truncation point below the cutoff cap is accurate enough");
}

}  // namespace

BetaProductSpec beta_product_spec(double alpha, int n) {
  check_alpha(alpha, "beta_product_spec");
  if (n < 0) throw InvalidParams("beta_product_spec: n must be nonnegative");
  using boost::math::digamma;
  BetaProductSpec spec{alpha, n, {}, std::exp(kEulerGamma * (alpha - 1))};
  for (int k = 0; k <= n; ++k) {
    double a = 1 + k / alpha;
    double ab = (1 + k) / alpha;
    spec.factors.push_back({a, 1 / alpha - 1, std::exp(digamma(ab) - digamma(a))});
  }
  return spec;
}

cplx h_hat(double alpha, double s) {
  check_alpha(alpha, "h_hat");
  return std::exp(lgamma_c(cplx(1, s)) - lgamma_c(cplx(1, alpha * s)));
}

namespace {

// log of the characteristic function of log X_{alpha,n} with the s-independent parts precomputed.
class BetaProductCf {
 public:
  BetaProductCf(double alpha, int n) {
    BetaProductSpec spec = beta_product_spec(alpha, n);
    drift_ = std::log(spec.global_scale);
    for (const BetaFactor& f : spec.factors) {
      a_.push_back(f.a);
      ab_.push_back(f.a + f.b);
      drift_ += std::log(f.scale);
      constant_ += log_gamma_real(f.a + f.b) - log_gamma_real(f.a);
    }
  }

  cplx operator()(double s) const {
    cplx log_cf(constant_, s * drift_);
    for (std::size_t k = 0; k < a_.size(); ++k) log_cf += lgamma_c(cplx(a_[k], s)) - lgamma_c(cplx(ab_[k], s));
    return std::exp(log_cf);
  }

 private:
  std::vector<double> a_;
  std::vector<double> ab_;
  double drift_ = 0;
  double constant_ = 0;
};

}  // namespace

cplx h_hat_n(double alpha, int n, double s) { return BetaProductCf(alpha, n)(s); }

std::vector<double> density_from_cf(const CharacteristicFunction& cf, const std::vector<double>& xs,
                                    const InversionConfig& cfg) {
  if (!(cfg.abs_tol > 0) || !(cfg.max_cutoff >= 64) || cfg.max_refinements < 1) {
    throw InvalidParams("density_from_cf: invalid inversion settings");
  }
  if (xs.empty()) return {};
  check_decay(cf);
  double cutoff = choose_cutoff(cf, 0.1 * cfg.abs_tol, cfg.max_cutoff);
  double xmax = 0;
  for (double x : xs) {
    if (!std::isfinite(x)) throw DomainError("density_from_cf: x must be finite");
    xmax = std::max(xmax, std::abs(x));
  }
  // half an oscillation period of e^{-isx} per panel to start with
  double width = std::min(1.0, M_PI / (1 + xmax));
  std::vector<double> prev;
  for (int level = 0; level <= cfg.max_refinements; ++level, width /= 2) {
    PanelRule rule = make_rule(cf, cutoff, width);
    std::vector<double> cur = apply_rule(rule, xs);
    if (!prev.empty()) {
      double diff = 0;
      for (std::size_t i = 0; i < xs.size(); ++i) diff = std::max(diff, std::abs(cur[i] - prev[i]));
      if (diff <= cfg.abs_tol) return cur;
    }
    prev = std::move(cur);
  }
  throw NonConvergence("density_from_cf: panel refinement did not settle");
}

double density_from_cf(const CharacteristicFunction& cf, double x, const InversionConfig& cfg) {
  return density_from_cf(cf, std::vector<double>{x}, cfg).front();
}

std::vector<double> sup_distance_grid() {
  std::vector<double> xs(400);
  for (int i = 0; i < 400; ++i) xs[i] = -10.0 + 20.0 * i / 399.0;
  return xs;
}

double sup_distance(double alpha, int n, const InversionConfig& cfg) {
  check_alpha(alpha, "sup_distance");
  if (n < 0) throw InvalidParams("sup_distance: n must be nonnegative");
  std::vector<double> xs = sup_distance_grid();
  std::vector<double> h = density_from_cf([alpha](double s) { return h_hat(alpha, s); }, xs, cfg);
  std::vector<double> hn = density_from_cf(BetaProductCf(alpha, n), xs, cfg);
  double d = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) d = std::max(d, std::abs(h[i] - hn[i]));
  return d;
}

cplx positive_stable_imaginary_moment(double beta, double s) {
  if (!(beta > 0.0 && beta < 1.0)) throw InvalidParams("positive_stable_imaginary_moment: beta must lie in (0, 1)");
  return std::exp(lgamma_c(cplx(1, -s / beta)) - lgamma_c(cplx(1, -s)));
}

cplx levy_exponent_oracle(double beta, double s, double rel_tol) {
  if (!(beta > 0.0 && beta < 1.0)) throw InvalidParams("levy_exponent_oracle: beta must lie in (0, 1)");
  if (!std::isfinite(s)) throw DomainError("levy_exponent_oracle: s must be finite");
  // The exponent is written with u = |x| and evaluated at t = -s.
  const double t = -s;
  const double near_zero = (1 - beta) / beta;
  auto levy_density = [beta](double u) {
    return std::exp(-beta * u) * -std::expm1(-(1 - beta) * u) /
           (u * -std::expm1(-u) * -std::expm1(-beta * u));
  };
  // e^{-itu} - 1 + itu, split into real and imaginary parts without cancellation
  auto part = [&](double u, bool imag) {
    if (u < 1e-6) {
      // removable singularity: k(u) ~ (1 - beta) / (beta u^2)
      return imag ? t * t * t * u * near_zero / 6 : -t * t * near_zero / 2;
    }
    double tu = t * u;
    double k = levy_density(u);
    if (!imag) {
      double h = std::sin(tu / 2);
      return -2 * h * h * k;
    }
    double odd = std::abs(tu) < 1e-3 ? tu * tu * tu / 6 - std::pow(tu, 5) / 120 : tu - std::sin(tu);
    return odd * k;
  };
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  // e^{-beta u} / u < 1e-18 beyond this point
  const double upper = 45.0 / beta;
  std::vector<double> cuts{0.0, 1.0};
  double step = std::min(2.0, M_PI / std::max(1.0, std::abs(t)));
  for (double c = 1.0 + step; c < upper; c += step) cuts.push_back(c);
  cuts.push_back(upper);
  double re = 0;
  double im = 0;
  double err_re = 0;
  double err_im = 0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    double e1 = 0;
    double e2 = 0;
    re += GK::integrate([&](double u) { return part(u, false); }, cuts[i], cuts[i + 1], 10, rel_tol, &e1);
    im += GK::integrate([&](double u) { return part(u, true); }, cuts[i], cuts[i + 1], 10, rel_tol, &e2);
    err_re += e1;
    err_im += e2;
  }
  double scale = std::max(1.0, std::abs(re) + std::abs(im));
  if (err_re + err_im > 1e3 * rel_tol * scale) {
    throw NonConvergence("levy_exponent_oracle: quadrature did not reach the requested accuracy");
  }
  return std::exp(cplx(re, im + kEulerGamma * (1 - 1 / beta) * t));
}

double positive_stable_moment(double beta, double u) {
  if (!(beta > 0.0 && beta <= 1.0)) throw InvalidParams("positive_stable_moment: beta must lie in (0, 1]");
  if (beta == 1.0) return 1.0;
  if (!(u < beta)) throw DomainError("positive_stable_moment: moment of order u >= beta is infinite");
  return std::exp(log_gamma_real(1 - u / beta) - log_gamma_real(1 - u));
}

double beta_fractional_moment(double a, double b, double s) {
  if (!(a > 0) || !(b > 0)) throw InvalidParams("beta_fractional_moment: a and b must be positive");
  if (!(s > -a)) throw DomainError("beta_fractional_moment: s must exceed -a");
  return std::exp(log_gamma_real(a + s) + log_gamma_real(a + b) - log_gamma_real(a) - log_gamma_real(a + b + s));
}

double gamma_fractional_moment(double c, double s) {
  if (!(c > 0)) throw InvalidParams("gamma_fractional_moment: shape must be positive");
  if (!(s > -c)) throw DomainError("gamma_fractional_moment: s must exceed -shape");
  return std::exp(log_gamma_real(c + s) - log_gamma_real(c));
}

MomentPair zolotarev_factorization_check(const stable::StableParams& p, double s) {
  if (p.rho == 0.0) throw InvalidParams("zolotarev_factorization_check: rho must be positive");
  if (!(s > -1.0 && s < p.alpha)) throw DomainError("zolotarev_factorization_check: s outside (-1, alpha)");
  double lhs = stable::fractional_moment_positive_part<double>(p, s);
  double rhs = positive_stable_moment(p.alpha * p.rho, p.rho * s) * positive_stable_moment(p.rho, -p.rho * s);
  return {lhs, rhs};
}

MomentPair duality_check(double alpha, double rho, double s) {
  if (!(alpha > 1.0 && alpha < 2.0)) throw InvalidParams("duality_check: alpha must lie in (1, 2)");
  stable::StableParams p(alpha, rho);
  if (!(s > -1.0 && s < alpha)) throw DomainError("duality_check: s outside (-1, alpha)");
  stable::StableParams dual(1 / alpha, std::min(1.0, alpha * rho));
  return {stable::fractional_moment_positive_part<double>(p, s),
          stable::fractional_moment_positive_part<double>(dual, -s / alpha)};
}

MomentPair chi_square_factorization_check(double alpha, int d, double s) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidParams("chi_square_factorization_check: alpha must lie in (0, 1)");
  if (d < 3 || d % 2 == 0) throw InvalidParams("chi_square_factorization_check: d must be odd and at least 3");
  if (!(s > -0.5 && s < alpha)) throw DomainError("chi_square_factorization_check: s outside (-1/2, alpha)");
  double z = positive_stable_moment(alpha, s);
  double lhs = gamma_fractional_moment(0.5, s) * z;
  double rhs = gamma_fractional_moment(d / 2.0, s) * z * beta_fractional_moment(0.5, (d - 1) / 2.0, s);
  return {lhs, rhs};
}

double MonteCarloMoment::sigmas() const { return std::abs(mean - exact) / standard_error; }

MonteCarloMoment zolotarev_monte_carlo(const stable::StableParams& p, double s, std::uint64_t seed,
                                       std::size_t count) {
  if (count < 2) throw InvalidParams("zolotarev_monte_carlo: need at least two samples");
  if (!(2 * s > -1.0 && 2 * s < p.alpha)) {
    throw DomainError("zolotarev_monte_carlo: the sample variance needs -1 < 2s < alpha");
  }
  double exact = zolotarev_factorization_check(p, s).lhs;
  std::vector<double> num = stable::sample_positive_stable(p.alpha * p.rho, seed, count);
  std::vector<double> den = stable::sample_positive_stable(p.rho, seed ^ 0x9e3779b97f4a7c15ULL, count);
  double mean = 0;
  double m2 = 0;
  for (std::size_t i = 0; i < count; ++i) {
    double y = std::pow(num[i] / den[i], p.rho * s);
    double delta = y - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (y - mean);
  }
  double var = m2 / static_cast<double>(count - 1);
  return {mean, std::sqrt(var / static_cast<double>(count)), exact};
}

}  // namespace stabletp::factorization
