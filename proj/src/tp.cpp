#include "stabletp/tp.hpp"

#include "stabletp/errors.hpp"
#include "stabletp/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace stabletp::tp {

Grid::Grid(std::vector<double> points) : points_(std::move(points)) {
  if (points_.empty()) throw InvalidParams("grid must not be empty");
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!(points_[i] > 0) || !std::isfinite(points_[i])) throw InvalidParams("grid points must be positive");
    if (i > 0 && !(points_[i] > points_[i - 1])) throw InvalidParams("grid must be strictly increasing");
  }
}

std::string to_string(Sign s) {
  switch (s) {
    case Sign::positive:
      return "positive";
    case Sign::negative:
      return "negative";
    default:
      return "zero-indeterminate";
  }
}

std::string to_string(Verdict v) { return v == Verdict::consistent ? "consistent" : "refuted"; }

template <class Real>
Real determinant(std::vector<std::vector<Real>> a) {
  using std::abs;
  const std::size_t n = a.size();
  for (const auto& row : a) {
    if (row.size() != n) throw InvalidParams("determinant needs a square matrix");
  }
  Real det = 1;
  std::vector<std::size_t> col(n);
  for (std::size_t i = 0; i < n; ++i) col[i] = i;
  bool negate = false;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t pr = k;
    std::size_t pc = k;
    Real best = -1;
    for (std::size_t i = k; i < n; ++i) {
      for (std::size_t j = k; j < n; ++j) {
        Real v = abs(a[i][col[j]]);
        if (v > best) {
          best = v;
          pr = i;
          pc = j;
        }
      }
    }
    if (best == 0) return Real(0);
    if (pr != k) {
      std::swap(a[pr], a[k]);
      negate = !negate;
    }
    if (pc != k) {
      std::swap(col[pc], col[k]);
      negate = !negate;
    }
    const Real piv = a[k][col[k]];
    det *= piv;
    for (std::size_t i = k + 1; i < n; ++i) {
      Real factor = a[i][col[k]] / piv;
      if (factor == 0) continue;
      for (std::size_t j = k + 1; j < n; ++j) a[i][col[j]] -= factor * a[k][col[j]];
    }
  }
  return negate ? Real(-det) : det;
}

template double determinant<double>(std::vector<std::vector<double>>);
template mp_real determinant<mp_real>(std::vector<std::vector<mp_real>>);

namespace {

template <class Real>
Real hadamard(const std::vector<std::vector<Real>>& a) {
  using std::sqrt;
  Real h = 1;
  for (const auto& row : a) {
    Real s = 0;
    for (const Real& v : row) s += v * v;
    h *= sqrt(s);
  }
  return h;
}

void check_sizes(const Grid& xs, const Grid& ys) {
  if (xs.size() != ys.size()) throw InvalidParams("minor needs grids of equal size");
}

// determinant / Hadamard scale in double; NaN when the matrix is not usable
double normalized_double(const kernels::Kernel& k, const std::vector<double>& xs, const std::vector<double>& ys) {
  const std::size_t m = xs.size();
  std::vector<std::vector<double>> a(m, std::vector<double>(m));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) a[i][j] = k(xs[i], ys[j]);
  }
  double h = hadamard(a);
  if (!(h > 0) || !std::isfinite(h)) return std::numeric_limits<double>::quiet_NaN();
  return determinant(a) / h;
}

struct Evaluated {
  MinorResult result;
  double normalized;
};

Evaluated evaluate_mp(const kernels::Kernel& k, const std::vector<double>& xs, const std::vector<double>& ys,
                      const Precision& prec) {
  MinorResult r = minor(k, Grid(xs), Grid(ys), prec);
  double nv = r.hadamard_scale > 0 ? to_double(mp_real(r.value / r.hadamard_scale)) : 0.0;
  return {r, nv};
}

// Deterministic uniform on [0, 1) from the top 53 bits.
double unit(std::mt19937_64& gen) { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }

constexpr double kLogLo = -2.0;
constexpr double kLogHi = 2.0;

std::vector<double> sample_grid(std::mt19937_64& gen, int m) {
  std::vector<double> v(m);
  for (;;) {
    for (int i = 0; i < m; ++i) v[i] = std::pow(10.0, kLogLo + (kLogHi - kLogLo) * unit(gen));
    std::sort(v.begin(), v.end());
    if (std::adjacent_find(v.begin(), v.end()) == v.end()) return v;
  }
}

struct Candidate {
  std::vector<double> xs;
  std::vector<double> ys;
  double score;  // -direction * normalised minor; smaller is more extreme
};

// Keeps the `capacity` candidates with the smallest score.
class Shortlist {
 public:
  explicit Shortlist(std::size_t capacity) : capacity_(capacity) {}
  void offer(const Candidate& c) {
    if (list_.size() < capacity_) {
      list_.push_back(c);
    } else if (c.score < list_.back().score) {
      list_.back() = c;
    } else {
      return;
    }
    std::stable_sort(list_.begin(), list_.end(), [](const Candidate& a, const Candidate& b) { return a.score < b.score; });
  }
  const std::vector<Candidate>& items() const { return list_; }

 private:
  std::size_t capacity_;
  std::vector<Candidate> list_;
};

// Derivative-free coordinate descent in log10 coordinates, keeping both grids strictly
// increasing inside the sampling box.
Candidate refine(const kernels::Kernel& k, Candidate c, double direction, int rounds) {
  const std::size_t m = c.xs.size();
  auto score = [&](const std::vector<double>& xs, const std::vector<double>& ys) {
    double v = normalized_double(k, xs, ys);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : -direction * v;
  };
  double step = 0.25;
  for (int round = 0; round < rounds; ++round) {
    bool improved = false;
    for (std::size_t idx = 0; idx < 2 * m; ++idx) {
      auto& vec = idx < m ? c.xs : c.ys;
      std::size_t i = idx % m;
      for (double sgn : {-1.0, 1.0}) {
        double lv = std::log10(vec[i]) + sgn * step;
        if (lv < kLogLo || lv > kLogHi) continue;
        double nv = std::pow(10.0, lv);
        if (i > 0 && !(nv > vec[i - 1])) continue;
        if (i + 1 < m && !(nv < vec[i + 1])) continue;
        double old = vec[i];
        vec[i] = nv;
        double s = score(c.xs, c.ys);
        if (s < c.score) {
          c.score = s;
          improved = true;
          break;
        }
        vec[i] = old;
      }
    }
    if (!improved) step *= 0.5;
  }
  return c;
}

// A minor of the wanted sign at `prec`, re-confirmed at digits + 30.
std::optional<Evaluated> confirm(const kernels::Kernel& k, const Candidate& c, Sign wanted, const Precision& prec) {
  Evaluated first = evaluate_mp(k, c.xs, c.ys, prec);
  if (first.result.classification != wanted) return std::nullopt;
  Evaluated second = evaluate_mp(k, c.xs, c.ys, prec.raised(30));
  if (second.result.classification != wanted) return std::nullopt;
  return second;
}

struct ExtremeSearch {
  std::uint64_t examined = 0;
  double worst = std::numeric_limits<double>::infinity();  // smallest score at working precision
  std::optional<Candidate> witness;
  std::optional<Evaluated> confirmed;
};

// Looks for a minor of sign `direction` (-1 negative, +1 positive). Sampling stops early once a
// witness is confirmed; otherwise the shortlist is refined and checked at working precision.
ExtremeSearch search_extreme(const kernels::Kernel& k, int m, std::uint64_t budget, std::uint64_t seed,
                             const Precision& prec, double direction) {
  const Sign wanted = direction < 0 ? Sign::negative : Sign::positive;
  // a double value this far beyond zero is worth an immediate high-precision look
  const double clear = -1e-9;
  std::mt19937_64 gen(seed);
  Shortlist shortlist(4);
  ExtremeSearch out;
  auto try_confirm = [&](const Candidate& c) {
    auto ev = confirm(k, c, wanted, prec);
    if (ev) {
      out.witness = c;
      out.confirmed = ev;
    }
    return ev.has_value();
  };
  for (std::uint64_t i = 0; i < budget; ++i) {
    Candidate c{sample_grid(gen, m), sample_grid(gen, m), 0.0};
    double v = normalized_double(k, c.xs, c.ys);
    ++out.examined;
    if (std::isnan(v)) continue;
    c.score = -direction * v;
    shortlist.offer(c);
    if (c.score < clear && try_confirm(c)) break;
  }
  if (!out.confirmed) {
    for (const Candidate& c : shortlist.items()) {
      Candidate r = refine(k, c, direction, 50);
      Evaluated ev = evaluate_mp(k, r.xs, r.ys, prec);
      out.worst = std::min(out.worst, -direction * ev.normalized);
      if (ev.result.classification == wanted && try_confirm(r)) break;
    }
  }
  if (out.confirmed) out.worst = std::min(out.worst, -direction * out.confirmed->normalized);
  return out;
}

}  // namespace

Sign classify(const mp_real& value, const mp_real& scale, const Precision& prec) {
  PrecisionScope scope(prec);
  mp_real tol = boost::multiprecision::pow(mp_real(10), 20 - prec.digits);
  mp_real band = tol * at_scope(scale);
  if (value > band) return Sign::positive;
  if (value < -band) return Sign::negative;
  return Sign::zero_indeterminate;
}

MinorResult minor(const kernels::Kernel& k, const Grid& xs, const Grid& ys, const Precision& prec) {
  check_sizes(xs, ys);
  const std::size_t m = xs.size();
  PrecisionScope scope(prec.digits + 10);
  std::vector<std::vector<mp_real>> a(m, std::vector<mp_real>(m));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      a[i][j] = at_scope(k.evaluate(mp_real(xs[i]), mp_real(ys[j]), prec));
    }
  }
  MinorResult r;
  r.hadamard_scale = hadamard(a);
  r.value = determinant(a);
  r.classification = classify(r.value, r.hadamard_scale, prec);
  return r;
}

mp_real cauchy_double_alternant(const Grid& xs, const Grid& ys, const Precision& prec) {
  check_sizes(xs, ys);
  PrecisionScope scope(prec);
  const std::size_t m = xs.size();
  mp_real num = 1;
  mp_real den = 1;
  auto sq = [](double v) {
    mp_real r(v);
    return mp_real(r * r);
  };
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) num *= (sq(xs[i]) - sq(xs[j])) * (sq(ys[i]) - sq(ys[j]));
    for (std::size_t j = 0; j < m; ++j) den *= sq(xs[i]) + sq(ys[j]);
  }
  return num / den;
}

nlohmann::ordered_json TPReport::to_json() const {
  nlohmann::ordered_json j;
  j["kernel"] = kernel;
  j["order"] = order;
  j["budget"] = budget;
  j["seed"] = seed;
  j["digits"] = digits;
  j["worst_minor"] = worst_minor;
  if (counterexample) {
    j["counterexample"] = {{"xs", counterexample->xs}, {"ys", counterexample->ys}, {"value", counterexample->value}};
  } else {
    j["counterexample"] = nullptr;
  }
  j["verdict"] = to_string(verdict);
  return j;
}

namespace {

TPReport run_search(const kernels::Kernel& k, int order, std::uint64_t budget, std::uint64_t seed,
                    const Precision& prec) {
  if (budget < 1) throw InvalidParams("tp_search: budget must be positive");
  TPReport rep;
  rep.kernel = k.name();
  rep.order = order;
  rep.budget = budget;
  rep.seed = seed;
  rep.digits = prec.digits;
  ExtremeSearch s = search_extreme(k, order, budget, seed, prec, -1.0);
  rep.grids_examined = s.examined;
  rep.worst_minor = std::isfinite(s.worst) ? s.worst : 0.0;
  if (s.confirmed) {
    rep.counterexample = Counterexample{s.witness->xs, s.witness->ys, to_double(s.confirmed->result.value)};
    rep.verdict = Verdict::refuted;
  }
  return rep;
}

}  // namespace

TPReport tp_search(const kernels::Kernel& k, int order, std::uint64_t budget, std::uint64_t seed,
                   const Precision& prec) {
  if (order < 2) throw InvalidParams("tp_search: order must be at least 2");
  return run_search(k, order, budget, seed, prec);
}

TPReport positivity_scan(const kernels::Kernel& k, std::uint64_t budget, std::uint64_t seed, const Precision& prec) {
  return run_search(k, 1, budget, seed, prec);
}

nlohmann::ordered_json SignRegularityReport::to_json() const {
  nlohmann::ordered_json j;
  j["kernel"] = kernel;
  j["order"] = order;
  j["signs"] = signs;
  if (refuted_at) {
    j["refuted_at"] = *refuted_at;
  } else {
    j["refuted_at"] = nullptr;
  }
  return j;
}

SignRegularityReport sign_regularity_check(const kernels::Kernel& k, int order, std::uint64_t budget,
                                           std::uint64_t seed, const Precision& prec) {
  if (order < 2) throw InvalidParams("sign_regularity_check: order must be at least 2");
  SignRegularityReport rep;
  rep.kernel = k.name();
  rep.order = order;
  for (int m = 1; m <= order; ++m) {
    std::uint64_t s = seed + static_cast<std::uint64_t>(m);
    bool neg = search_extreme(k, m, budget, s, prec, -1.0).confirmed.has_value();
    bool pos = search_extreme(k, m, budget, s, prec, 1.0).confirmed.has_value();
    rep.signs.push_back(pos && !neg ? 1 : (neg && !pos ? -1 : 0));
    if (pos && neg) {
      rep.refuted_at = m;
      break;
    }
  }
  return rep;
}

int sign_changes(const std::vector<double>& values, double zero_tol) {
  int changes = 0;
  int last = 0;
  for (double v : values) {
    if (std::abs(v) <= zero_tol) continue;
    int s = v > 0 ? 1 : -1;
    if (last != 0 && s != last) ++changes;
    last = s;
  }
  return changes;
}

void PiecewiseConstant::validate() const {
  if (breaks.size() < 2 || values.size() + 1 != breaks.size()) {
    throw InvalidParams("piecewise-constant function needs n + 1 breakpoints for n values");
  }
  for (std::size_t i = 1; i < breaks.size(); ++i) {
    if (!(breaks[i] > breaks[i - 1])) throw InvalidParams("breakpoints must be strictly increasing");
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw InvalidParams("piecewise-constant values must be finite");
  }
}

// values of g below this fraction of max |g| count as zero
constexpr double kZeroTol = 1e-8;

VariationResult variation_diminishing_check(const kernels::Kernel& k, const PiecewiseConstant& h, double rel_tol,
                                            double x_lo, double x_hi) {
  h.validate();
  if (!(x_lo > 0 && x_hi > x_lo)) throw InvalidParams("variation check needs 0 < x_lo < x_hi");
  // pieces are integrated in log y; each contributes its error estimate, which is judged
  // against the overall scale of g at the end rather than against a possibly tiny piece
  double worst_error = 0;
  auto piece = [&](double x, double a, double b) {
    auto f = [&](double s) {
      double y = std::exp(s);
      return k(x, y) * y;
    };
    auto r = quad::tanh_sinh<double>(f, std::log(a), std::log(b), rel_tol);
    worst_error = std::max(worst_error, r.converged ? 0.0 : std::abs(r.error));
    return r.value;
  };
  auto g = [&](double x) {
    double total = 0;
    for (std::size_t i = 0; i < h.values.size(); ++i) {
      if (h.values[i] == 0) continue;
      double a = h.breaks[i];
      double b = h.breaks[i + 1];
      // keep a possible diagonal singularity at an endpoint
      double part = (x > a && x < b) ? piece(x, a, x) + piece(x, x, b) : piece(x, a, b);
      total += h.values[i] * part;
    }
    return total;
  };
  VariationResult out;
  const int n = 161;
  for (int i = 0; i < n; ++i) {
    double x = x_lo * std::pow(x_hi / x_lo, static_cast<double>(i) / (n - 1));
    out.xs.push_back(x);
    out.g.push_back(g(x));
  }
  // refine where g comes close to zero, which is where a pair of sign changes could hide
  for (int pass = 0; pass < 4; ++pass) {
    double scale = 0;
    for (double v : out.g) scale = std::max(scale, std::abs(v));
    std::vector<double> xs{out.xs.front()};
    std::vector<double> gs{out.g.front()};
    for (std::size_t i = 1; i < out.xs.size(); ++i) {
      if (std::min(std::abs(out.g[i - 1]), std::abs(out.g[i])) < 1e-3 * scale) {
        double mid = std::sqrt(out.xs[i - 1] * out.xs[i]);
        xs.push_back(mid);
        gs.push_back(g(mid));
      }
      xs.push_back(out.xs[i]);
      gs.push_back(out.g[i]);
    }
    out.xs = std::move(xs);
    out.g = std::move(gs);
  }
  double scale = 0;
  for (double v : out.g) scale = std::max(scale, std::abs(v));
  if (!(worst_error <= 1e-2 * kZeroTol * scale)) {
    throw NonConvergence("variation check: kernel integral did not converge");
  }
  out.input_changes = sign_changes(h.values, 0.0);
  out.output_changes = sign_changes(out.g, kZeroTol * scale);
  return out;
}

}  // namespace stabletp::tp
