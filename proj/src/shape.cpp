#include "stabletp/shape.hpp"

#include "stabletp/errors.hpp"
#include "stabletp/specfun.hpp"
#include "stabletp/tp.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace stabletp::shape {

namespace {

using stable::StableParams;

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_spaced(double lo, double hi, int i, int n) {
  return lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
}

// Zero of f between a and b, where f changes sign.
template <class F>
double locate_zero(F f, double a, double b) {
  double fa = f(a);
  double fb = f(b);
  if (fa == 0) return a;
  if (fb == 0) return b;
  std::uintmax_t iters = 100;
  auto tol = boost::math::tools::eps_tolerance<double>(40);
  auto r = boost::math::tools::toms748_solve(f, a, b, fa, fb, tol, iters);
  return 0.5 * (r.first + r.second);
}

// Sign of f(x) - f(x/c)/c from the two log densities; 0 when both vanish.
int crossing_sign(double log_a, double log_b) {
  if (log_a == kNegInf && log_b == kNegInf) return 0;
  double d = log_a - log_b;
  if (d > 0) return 1;
  if (d < 0) return -1;
  return 0;
}

void check_c(double c, const char* who) {
  if (!(c > 0) || c == 1.0 || !std::isfinite(c)) {
    throw InvalidParams(std::string(who) + ": c must be positive and different from 1");
  }
}

bool nonincreasing(const std::vector<double>& v, double rel_slack) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[i - 1] + rel_slack * std::max(1.0, std::abs(v[i - 1]))) return false;
  }
  return true;
}

bool nondecreasing(const std::vector<double>& v, double rel_slack) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] < v[i - 1] - rel_slack * std::max(1.0, std::abs(v[i - 1]))) return false;
  }
  return true;
}

void check_slope_alpha(double alpha, const char* who) {
  if (!(alpha > 0.5 && alpha < 1.0)) throw InvalidParams(std::string(who) + ": alpha must lie in (1/2, 1)");
}

}  // namespace

bool BellShapeReport::bell_shaped() const {
  for (std::size_t k = 0; k < counts.size(); ++k) {
    if (counts[k] != static_cast<int>(k)) return false;
  }
  return true;
}

nlohmann::ordered_json BellShapeReport::to_json() const {
  nlohmann::ordered_json j;
  j["alpha_sub"] = alpha_sub;
  j["order"] = order;
  j["counts"] = counts;
  j["zeros"] = zeros;
  j["tangential"] = tangential;
  j["half_widths"] = half_widths;
  j["grid_points"] = grid_points;
  j["bell_shaped"] = bell_shaped();
  return j;
}

BellShapeReport bell_shape_count(double alpha_sub, int order, const stable::EvalConfig& cfg,
                                 const ZeroCountConfig& zcfg) {
  if (!(alpha_sub > 0.0 && alpha_sub < 1.0)) throw InvalidParams("bell_shape_count: alpha_sub must lie in (0, 1)");
  if (order < 0 || order > 4) throw InvalidParams("bell_shape_count: derivative order must lie in 0..4");
  if (zcfg.initial_points < 10 || zcfg.max_refinements < 1 || !(zcfg.x_min > 0) || !(zcfg.decay_tol > 0)) {
    throw InvalidParams("bell_shape_count: invalid grid settings");
  }
  BellShapeReport rep{alpha_sub, order, {}, {}, {}, {}, {}};
  for (int k = 0; k <= order; ++k) {
    auto q = [&](double x) { return stable::symmetric_density<double>(alpha_sub, k, x, cfg); };
    double L = 10;
    while (std::abs(q(L)) >= zcfg.decay_tol) {
      L *= 10;
      if (L > zcfg.max_half_width) {
        throw NonConvergence("bell_shape_count: derivative has not decayed within the grid cap");
      }
    }
    const double parity = k % 2 == 0 ? 1.0 : -1.0;
    // values on (0, L]; the negative half follows from the parity of q^{(k)}
    auto count_on = [&](const std::vector<double>& xs, const std::vector<double>& vs) {
      std::vector<double> all;
      all.reserve(2 * xs.size());
      for (std::size_t i = xs.size(); i-- > 0;) all.push_back(parity * vs[i]);
      all.insert(all.end(), vs.begin(), vs.end());
      double peak = 0;
      for (double v : vs) peak = std::max(peak, std::abs(v));
      return tp::sign_changes(all, 1e-14 * peak);
    };
    int n = zcfg.initial_points;
    std::vector<double> xs(n);
    std::vector<double> vs(n);
    for (int i = 0; i < n; ++i) {
      xs[i] = log_spaced(zcfg.x_min, L, i, n);
      vs[i] = q(xs[i]);
    }
    int count = count_on(xs, vs);
    bool settled = false;
    for (int r = 0; r < zcfg.max_refinements && !settled; ++r) {
      std::vector<double> fx;
      std::vector<double> fv;
      for (std::size_t i = 0; i < xs.size(); ++i) {
        fx.push_back(xs[i]);
        fv.push_back(vs[i]);
        if (i + 1 < xs.size()) {
          double mid = std::sqrt(xs[i] * xs[i + 1]);
          fx.push_back(mid);
          fv.push_back(q(mid));
        }
      }
      int refined = count_on(fx, fv);
      settled = refined == count;
      count = refined;
      xs = std::move(fx);
      vs = std::move(fv);
    }
    if (!settled) throw NonConvergence("bell_shape_count: sign-change count did not settle under refinement");
    double peak = 0;
    for (double v : vs) peak = std::max(peak, std::abs(v));
    std::vector<double> zeros;
    int tangential = 0;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
      if ((vs[i] > 0) != (vs[i + 1] > 0) && vs[i] != 0 && vs[i + 1] != 0) zeros.push_back(locate_zero(q, xs[i], xs[i + 1]));
      if (i > 0) {
        double a = std::abs(vs[i]);
        bool dip = a < std::abs(vs[i - 1]) && a < std::abs(vs[i + 1]) && a < 1e-8 * peak;
        bool same_sign = (vs[i - 1] > 0) == (vs[i] > 0) && (vs[i] > 0) == (vs[i + 1] > 0);
        if (dip && same_sign) ++tangential;
      }
    }
    rep.counts.push_back(count);
    rep.zeros.push_back(zeros);
    rep.tangential.push_back(tangential);
    rep.half_widths.push_back(L);
    rep.grid_points.push_back(static_cast<int>(xs.size()));
  }
  return rep;
}

HermiteZeros hermite_zero_count(int n) {
  if (n < 2) throw InvalidParams("hermite_zero_count: n must be at least 2");
  // every zero of H_n lies below sqrt(2n + 1)
  const double upper = std::sqrt(2.0 * n + 1) + 1;
  auto g = [n](double z) {
    return std::exp(-z * z) * std::pow(z, n - 2) * specfun::hermite<double>(static_cast<unsigned>(n), z);
  };
  const int points = 20000;
  HermiteZeros out{0, (n + 1) / 2, {}};
  double prev_z = upper / points;
  double prev = g(prev_z);
  for (int i = 2; i <= points; ++i) {
    double z = upper * i / points;
    double v = g(z);
    if (v == 0.0) {
      out.zeros.push_back(z);
    } else if (prev != 0.0 && (v > 0) != (prev > 0)) {
      out.zeros.push_back(locate_zero(g, prev_z, z));
    }
    prev = v;
    prev_z = z;
  }
  out.measured = static_cast<int>(out.zeros.size());
  return out;
}

bool mlr_verdict(const StableParams& p) {
  const double tol = 1e-12;
  double gamma = p.gamma_param();
  double delta = p.delta_param();
  if (std::min(gamma, delta) >= 1 - tol) return true;
  if (std::abs(gamma) <= tol && delta >= 1 - tol) return true;
  return std::abs(gamma - 1) <= tol && std::abs(delta) <= tol;
}

nlohmann::ordered_json MlrReport::to_json() const {
  nlohmann::ordered_json j;
  j["c"] = c;
  j["predicate"] = predicate;
  j["monotone"] = monotone;
  j["direction"] = direction;
  j["witness"] = witness ? nlohmann::ordered_json(*witness) : nlohmann::ordered_json(nullptr);
  j["consistent"] = consistent();
  return j;
}

std::vector<double> default_mlr_grid() {
  std::vector<double> g(200);
  for (int i = 0; i < 200; ++i) g[i] = log_spaced(1e-2, 1e2, i, 200);
  return g;
}

MlrReport mlr_empirical(const StableParams& p, double c, const std::vector<double>& grid,
                        const stable::EvalConfig& cfg) {
  check_c(c, "mlr_empirical");
  if (grid.size() < 3) throw InvalidParams("mlr_empirical: grid needs at least three points");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0) || (i > 0 && !(grid[i] > grid[i - 1]))) {
      throw InvalidParams("mlr_empirical: grid must be positive and strictly increasing");
    }
  }
  std::vector<double> r;
  r.reserve(grid.size());
  for (double x : grid) {
    double a = stable::log_density<double>(p, x, cfg);
    double b = stable::log_density<double>(p, c * x, cfg);
    if (!std::isfinite(a) || !std::isfinite(b)) {
      throw NonConvergence("mlr_empirical: density vanishes or overflows on the grid; choose a narrower grid");
    }
    r.push_back(a - b);
  }
  const double slack = 1e-10;
  bool up = nondecreasing(r, slack);
  bool down = nonincreasing(r, slack);
  MlrReport rep{c, mlr_verdict(p), up || down, up && !down ? 1 : (down && !up ? -1 : 0), std::nullopt};
  if (!rep.monotone) {
    // first point where the initial trend reverses
    int trend = 0;
    for (std::size_t i = 1; i < r.size(); ++i) {
      double d = r[i] - r[i - 1];
      double s = slack * std::max(1.0, std::abs(r[i - 1]));
      int sgn = d > s ? 1 : (d < -s ? -1 : 0);
      if (sgn == 0) continue;
      if (trend == 0) {
        trend = sgn;
      } else if (sgn != trend) {
        rep.witness = grid[i - 1];
        break;
      }
    }
  }
  return rep;
}

nlohmann::ordered_json SlopeReport::to_json() const {
  nlohmann::ordered_json j;
  j["alpha"] = alpha;
  j["mode"] = mode;
  j["decreasing_to_mode"] = decreasing_to_mode;
  j["increasing_after_mode"] = increasing_after_mode;
  return j;
}

SlopeReport likelihood_slope(double alpha, const stable::EvalConfig& cfg) {
  check_slope_alpha(alpha, "likelihood_slope");
  StableParams p(alpha, 1.0);
  double m = stable::mode(p, cfg);
  SlopeReport rep{alpha, m, false, false, {}, {}};
  for (int i = 1; i <= 200; ++i) {
    double x = m * i / 200.0;
    rep.xs.push_back(x);
    rep.slopes.push_back(stable::log_derivative<double>(p, x, cfg));
  }
  rep.decreasing_to_mode = nonincreasing(rep.slopes, 1e-10);
  std::vector<double> after;
  for (int i = 0; i <= 50; ++i) after.push_back(stable::log_derivative<double>(p, m * std::pow(100.0, i / 50.0), cfg));
  double lowest = *std::min_element(after.begin(), after.end());
  rep.increasing_after_mode = after.back() > lowest + 1e-10 * std::max(1.0, std::abs(lowest));
  return rep;
}

bool likelihood_slope_monotone(double alpha, const stable::EvalConfig& cfg) {
  return likelihood_slope(alpha, cfg).decreasing_to_mode;
}

bool ratio_nondecreasing_below_mode(double alpha, double c, const stable::EvalConfig& cfg) {
  check_slope_alpha(alpha, "ratio_nondecreasing_below_mode");
  if (!(c > 1)) throw InvalidParams("ratio_nondecreasing_below_mode: c must exceed 1");
  StableParams p(alpha, 1.0);
  double top = stable::mode(p, cfg) / c;
  std::vector<double> r;
  for (int i = 1; i <= 200; ++i) {
    double x = top * i / 200.0;
    double a = stable::log_density<double>(p, x, cfg);
    double b = stable::log_density<double>(p, c * x, cfg);
    // below the double range the ratio is not resolved
    if (!std::isfinite(a)) continue;
    r.push_back(a - b);
  }
  if (r.size() < 100) throw NonConvergence("ratio_nondecreasing_below_mode: density underflows on most of the grid");
  return nondecreasing(r, 1e-10);
}

nlohmann::ordered_json IntersectionReport::to_json() const {
  nlohmann::ordered_json j;
  j["c"] = c;
  j["count"] = count;
  j["crossings"] = crossings;
  j["half_width"] = half_width;
  return j;
}

IntersectionReport intersections(const StableParams& p, double c, const stable::EvalConfig& cfg) {
  check_c(c, "intersection_count");
  const double log_c = std::log(c);
  auto log_f = [&](double x) { return stable::log_density<double>(p, x, cfg); };
  auto log_scaled = [&](double x) { return log_f(x / c) - log_c; };
  auto sign_at = [&](double x) { return crossing_sign(log_f(x), log_scaled(x)); };
  double log_peak = kNegInf;
  for (int i = 0; i <= 80; ++i) {
    double x = log_spaced(1e-3, 1e3, i, 81);
    log_peak = std::max({log_peak, log_f(x), log_f(-x), log_scaled(x), log_scaled(-x)});
  }
  const double cut = log_peak + std::log(1e-14);
  double X = 10;
  while (std::max({log_f(X), log_f(-X), log_scaled(X), log_scaled(-X)}) >= cut) {
    X *= 10;
    if (X > 1e14) throw NonConvergence("intersection_count: densities do not fall below the cutoff");
  }
  auto count_with = [&](int per_decade, std::vector<double>& xs, std::vector<int>& signs) {
    const double lo = 1e-4;
    int n = static_cast<int>(std::ceil(std::log10(X / lo) * per_decade)) + 1;
    std::vector<double> pos(n);
    for (int i = 0; i < n; ++i) pos[i] = log_spaced(lo, X, i, n);
    xs.clear();
    for (int i = n; i-- > 0;) xs.push_back(-pos[i]);
    xs.push_back(0.0);
    xs.insert(xs.end(), pos.begin(), pos.end());
    signs.clear();
    std::vector<double> vals;
    for (double x : xs) {
      signs.push_back(sign_at(x));
      vals.push_back(signs.back());
    }
    // the sign must be settled over the last decade on each side
    for (int side : {-1, 1}) {
      int first = 0;
      for (std::size_t i = 0; i < xs.size(); ++i) {
        if (side * xs[i] < X / 10 || signs[i] == 0) continue;
        if (first == 0) first = signs[i];
        if (signs[i] != first) throw NonConvergence("intersection_count: sign not settled in the last decade");
      }
    }
    return tp::sign_changes(vals, 0.5);
  };
  std::vector<double> xs;
  std::vector<int> signs;
  int coarse = count_with(40, xs, signs);
  int fine = count_with(80, xs, signs);
  if (coarse != fine) throw NonConvergence("intersection_count: count changes under grid refinement");
  IntersectionReport rep{c, fine, {}, X};
  auto diff = [&](double x) { return log_f(x) - log_scaled(x); };
  int last = 0;
  double last_x = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (signs[i] == 0) continue;
    if (last != 0 && signs[i] != last) rep.crossings.push_back(locate_zero(diff, last_x, xs[i]));
    last = signs[i];
    last_x = xs[i];
  }
  return rep;
}

int intersection_count(const StableParams& p, double c, const stable::EvalConfig& cfg) {
  return intersections(p, c, cfg).count;
}

nlohmann::ordered_json ShapeReport::to_json() const {
  nlohmann::ordered_json j;
  j["alpha"] = alpha;
  j["rho"] = rho;
  j["bell_shape"] = bell_shape ? bell_shape->to_json() : nlohmann::ordered_json(nullptr);
  j["mlr_predicate"] = mlr_predicate;
  j["mlr"] = nlohmann::ordered_json::array();
  for (const auto& m : mlr) j["mlr"].push_back(m.to_json());
  j["intersections"] = nlohmann::ordered_json::array();
  for (const auto& r : intersections) j["intersections"].push_back(r.to_json());
  j["slope"] = slope ? slope->to_json() : nlohmann::ordered_json(nullptr);
  return j;
}

ShapeReport shape_report(const StableParams& p, const std::vector<double>& cs, int bell_order,
                         const stable::EvalConfig& cfg) {
  ShapeReport rep{p.alpha, p.rho, std::nullopt, mlr_verdict(p), {}, {}, std::nullopt};
  if (bell_order >= 0 && std::abs(p.rho - 0.5) < 1e-12 && p.alpha < 2.0) {
    rep.bell_shape = bell_shape_count(p.alpha / 2, bell_order, cfg);
  }
  for (double c : cs) {
    rep.mlr.push_back(mlr_empirical(p, c, default_mlr_grid(), cfg));
    rep.intersections.push_back(intersections(p, c, cfg));
  }
  if (p.rho == 1.0 && p.alpha > 0.5 && p.alpha < 1.0) rep.slope = likelihood_slope(p.alpha, cfg);
  return rep;
}

}  // namespace stabletp::shape
