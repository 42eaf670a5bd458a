#pragma once

#include "stabletp/kernels.hpp"
#include "stabletp/precision.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace stabletp::tp {

// Strictly increasing positive abscissae.
class Grid {
 public:
  explicit Grid(std::vector<double> points);
  const std::vector<double>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  double operator[](std::size_t i) const { return points_[i]; }

 private:
  std::vector<double> points_;
};

enum class Sign { positive, negative, zero_indeterminate };
std::string to_string(Sign s);

struct MinorResult {
  mp_real value;
  mp_real hadamard_scale;  // product of the Euclidean row norms
  Sign classification;
};

// Determinant by LU factorisation with full pivoting; the matrix is consumed.
template <class Real>
Real determinant(std::vector<std::vector<Real>> a);

// det[K(x_i, y_j)] at the given precision, classified against 10^(20 - digits) times the
// Hadamard scale.
MinorResult minor(const kernels::Kernel& k, const Grid& xs, const Grid& ys, const Precision& prec);
// Same classification rule for a value and scale computed elsewhere.
Sign classify(const mp_real& value, const mp_real& scale, const Precision& prec);

// det[1 / (x_i^2 + y_j^2)] from Cauchy's double alternant formula.
mp_real cauchy_double_alternant(const Grid& xs, const Grid& ys, const Precision& prec);

enum class Verdict { consistent, refuted };
std::string to_string(Verdict v);

struct Counterexample {
  std::vector<double> xs;
  std::vector<double> ys;
  double value;  // determinant, confirmed at digits + 30
};

struct TPReport {
  std::string kernel;
  int order = 0;
  std::uint64_t budget = 0;
  std::uint64_t seed = 0;
  int digits = 0;
  std::uint64_t grids_examined = 0;
  double worst_minor = 0;  // most negative determinant / Hadamard scale seen
  std::optional<Counterexample> counterexample;
  Verdict verdict = Verdict::consistent;

  nlohmann::ordered_json to_json() const;
};

// Samples `budget` log-uniform grid pairs on [1e-2, 1e2], refines the most negative
// normalised minors by coordinate descent and confirms any negative one at digits + 30.
// The sampling phase stops early once a confirmed negative minor is in hand.
TPReport tp_search(const kernels::Kernel& k, int order, std::uint64_t budget, std::uint64_t seed,
                   const Precision& prec);

// Order-one counterpart of tp_search: the same sampling and refinement applied to single
// kernel values, so the report has order 1.
TPReport positivity_scan(const kernels::Kernel& k, std::uint64_t budget, std::uint64_t seed, const Precision& prec);

struct SignRegularityReport {
  std::string kernel;
  int order = 0;
  // +1 / -1 for the common sign of the m x m minors (m = 1..order), 0 when every sampled
  // minor was indeterminate
  std::vector<int> signs;
  std::optional<int> refuted_at;  // smallest m showing both signs

  nlohmann::ordered_json to_json() const;
};

SignRegularityReport sign_regularity_check(const kernels::Kernel& k, int order, std::uint64_t budget,
                                           std::uint64_t seed, const Precision& prec);

// Number of strict sign alternations after discarding entries with |v| <= zero_tol.
int sign_changes(const std::vector<double>& values, double zero_tol);

// Piecewise-constant h: value[i] on [breaks[i], breaks[i+1]), zero elsewhere.
struct PiecewiseConstant {
  std::vector<double> breaks;
  std::vector<double> values;
  void validate() const;
};

struct VariationResult {
  int input_changes;
  int output_changes;
  std::vector<double> xs;  // abscissae where g was evaluated
  std::vector<double> g;
};

// g(x) = int K(x, y) h(y) dy on an adaptive grid of [x_lo, x_hi].
VariationResult variation_diminishing_check(const kernels::Kernel& k, const PiecewiseConstant& h,
                                            double rel_tol = 1e-10, double x_lo = 1e-2, double x_hi = 1e2);

}  // namespace stabletp::tp
