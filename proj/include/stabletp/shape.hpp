#pragma once

#include "stabletp/stable.hpp"

#include <optional>
#include <vector>

#include "json.hpp"

namespace stabletp::shape {

struct ZeroCountConfig {
  int initial_points = 200;     // log-spaced points on [x_min, L] before refinement
  int max_refinements = 4;      // grid doublings allowed while counts still move
  double x_min = 1e-4;
  double decay_tol = 1e-12;     // L is the first power of ten with |q^{(k)}(L)| below this
  double max_half_width = 1e8;  // cap on L
};

// Sign changes of q^{(k)}, k = 0..order, on the symmetric grid [-L, L].
struct BellShapeReport {
  double alpha_sub;
  int order;
  std::vector<int> counts;                  // sign changes of q^{(k)}
  std::vector<std::vector<double>> zeros;   // located zeros of q^{(k)} on (0, L]
  std::vector<int> tangential;              // near-zero local minima of |q^{(k)}| without sign change
  std::vector<double> half_widths;          // L used for each k
  std::vector<int> grid_points;             // points on (0, L] after refinement
  bool bell_shaped() const;                 // counts[k] == k for every k
  nlohmann::ordered_json to_json() const;
};

// q(x) = (1/pi) int_0^inf cos(tx) exp(-t^{2 alpha_sub}) dt; order <= 4. Throws NonConvergence when
// L reaches the cap before |q^{(k)}| decays or when refinement keeps changing a count.
BellShapeReport bell_shape_count(double alpha_sub, int order, const stable::EvalConfig& cfg = {},
                                 const ZeroCountConfig& zcfg = {});

struct HermiteZeros {
  int measured;  // positive zeros of e^{-z^2} z^{n-2} H_n(z) found numerically
  int stated;    // [(n+1)/2]
  std::vector<double> zeros;
};

HermiteZeros hermite_zero_count(int n);

// Monotone likelihood ratio predicate on gamma = 1/rho - 1, delta = 1/(rho alpha) - 1:
// inf(gamma, delta) >= 1, or gamma = 0 and delta >= 1, or gamma = 1 and delta = 0.
bool mlr_verdict(const stable::StableParams& p);

struct MlrReport {
  double c;
  bool predicate;
  bool monotone;                       // log f(x) - log f(cx) monotone on the grid
  int direction;                       // +1 nondecreasing, -1 nonincreasing, 0 constant or neither
  std::optional<double> witness;       // x where the ratio turns, when not monotone
  bool consistent() const { return monotone || !predicate; }
  nlohmann::ordered_json to_json() const;
};

// 200-point log grid on [1e-2, 1e2].
std::vector<double> default_mlr_grid();

// Checks monotonicity of x -> f(x) / f(cx) on the grid (log scale, relative slack 1e-10).
MlrReport mlr_empirical(const stable::StableParams& p, double c, const std::vector<double>& grid = default_mlr_grid(),
                        const stable::EvalConfig& cfg = {});

struct SlopeReport {
  double alpha;
  double mode;
  bool decreasing_to_mode;        // x f'/f nonincreasing on (0, mode]
  bool increasing_after_mode;     // measured on [mode, 100 mode]; reported only
  std::vector<double> xs;
  std::vector<double> slopes;
  nlohmann::ordered_json to_json() const;
};

// x f'(x)/f(x) on 200 points of (0, mode] for the positive law, alpha in (1/2, 1).
SlopeReport likelihood_slope(double alpha, const stable::EvalConfig& cfg = {});
bool likelihood_slope_monotone(double alpha, const stable::EvalConfig& cfg = {});

// For alpha in (1/2, 1) and c > 1: f(x)/f(cx) nondecreasing on 200 points of (0, mode/c].
bool ratio_nondecreasing_below_mode(double alpha, double c, const stable::EvalConfig& cfg = {});

struct IntersectionReport {
  double c;
  int count;
  std::vector<double> crossings;
  double half_width;  // X*
  nlohmann::ordered_json to_json() const;
};

// Sign changes of f(x) - f(x/c)/c on [-X*, X*], X* the point where both densities fall below
// 1e-14 of the peak. The sign beyond X* is checked constant over the last decade.
IntersectionReport intersections(const stable::StableParams& p, double c, const stable::EvalConfig& cfg = {});
int intersection_count(const stable::StableParams& p, double c, const stable::EvalConfig& cfg = {});

// The analyzers bundled for one parameter set. The bell-shape part applies to symmetric laws
// (rho = 1/2, alpha < 2), whose density is q with alpha_sub = alpha/2; the slope part to positive
// laws with alpha in (1/2, 1).
struct ShapeReport {
  double alpha;
  double rho;
  std::optional<BellShapeReport> bell_shape;
  bool mlr_predicate;
  std::vector<MlrReport> mlr;
  std::vector<IntersectionReport> intersections;
  std::optional<SlopeReport> slope;
  nlohmann::ordered_json to_json() const;
};

ShapeReport shape_report(const stable::StableParams& p, const std::vector<double>& cs, int bell_order,
                         const stable::EvalConfig& cfg = {});

}  // namespace stabletp::shape
