#pragma once

// Fixed-sample-size Neyman-Pearson design for the one-way (YX), interactive
// (XYX) and centralized architectures.
//
// Two optimizers are provided and cross-checked:
//   * grid path: coarse grid over the first-stage thresholds (t_v for YX,
//     t_u and t_v[u] for XYX), the exact Neyman-Pearson fusion rule at X for
//     each candidate (the multiplier is bisected so that pf = alpha), then
//     coordinate refinement of the best candidates;
//   * iteration path: damped fixed-point iteration of the coupled LRT
//     thresholds at a fixed multiplier, wrapped in a bisection on the
//     multiplier.
// The grid path is the arbiter; the iteration path is accepted when it
// converges and matches it.

#include <optional>
#include <string>

#include "tandem/gaussian_model.hpp"
#include "tandem/numerics.hpp"

namespace tandem {

enum class Architecture { YX, XYX };

const char* to_string(Architecture arch);

/// (pf, pd) of a fixed design.
struct Rates {
  double pf = 0.0;
  double pd = 0.0;
};

struct OperatingPoint {
  double pf = 0.0;
  double pd = 0.0;
  double lambda = 0.0;
};

struct SearchConfig {
  std::size_t grid_points = 41;  ///< per threshold, over [-span*sigma, span*sigma + 1]
  double span_sigmas = 3.0;
  bool include_infinite = true;  ///< add +-inf (degenerate rules) as grid candidates
  std::size_t refine_starts = 4;
  int refine_sweeps = 60;
  double refine_tol = 1e-9;      ///< threshold resolution of coordinate refinement
  bool parallel = true;          ///< OpenMP grid kernel; results do not depend on it
};

struct IterConfig {
  double damping = 0.5;  ///< weight kept on the previous iterate
  int max_steps = 500;
  double tolerance = 1e-9;  ///< sup-norm residual |g(t) - t|, threshold units
};

/// Multiplier bisection settings.
struct LambdaConfig {
  double lambda_max = 1e6;
  int max_iter = 64;
  double pf_tolerance = 1e-8;
};

template <class Table>
struct IterResult {
  Table thresholds;
  double residual = kInf;
  int steps = 0;
  bool converged = false;
};

template <class Table>
struct OptimizeResult {
  Table thresholds;
  OperatingPoint point;
  double pd_grid = 0.0;                 ///< grid-path optimum
  std::optional<double> pd_iteration;   ///< iteration-path optimum, when it converged
  bool iteration_converged = false;     ///< iteration converged and matched the grid
  double fixed_point_residual = 0.0;    ///< of the returned table at point.lambda
  std::string status = "ok";
};

// ---------------------------------------------------------------------------
// Evaluation.

Rates evaluate_yx(const GaussianModel& model, const YxThresholds& thr);

/// Throws OrderingViolation for tables outside the ordering convention.
Rates evaluate_xyx(const GaussianModel& model, const XyxThresholds& thr);

/// Lagrangian pd + lambda (alpha - pf).
double lagrangian(const Rates& r, double lambda, double alpha);

// ---------------------------------------------------------------------------
// Optimal fusion at X for fixed first-stage rules and multiplier exp(log_lambda).

YxThresholds yx_fusion_thresholds(const GaussianModel& model, Threshold t_v, double log_lambda);
XyxThresholds xyx_fusion_thresholds(const GaussianModel& model, Threshold t_u,
                                    std::array<Threshold, 2> t_v, double log_lambda);

// ---------------------------------------------------------------------------
// Coupled threshold equations t = g(t) at a fixed multiplier.

/// One undamped application of g. Coordinates whose defining ratio is 0/0
/// (the rule does not affect the objective) keep their current value;
/// vanishing denominators give infinite thresholds.
YxThresholds yx_threshold_map(const GaussianModel& model, double lambda, const YxThresholds& thr);
XyxThresholds xyx_threshold_map(const GaussianModel& model, double lambda,
                                const XyxThresholds& thr);

/// sup |g(t) - t|; 0 for matching infinities.
double fixed_point_residual(const GaussianModel& model, double lambda, const YxThresholds& thr);
double fixed_point_residual(const GaussianModel& model, double lambda, const XyxThresholds& thr);

IterResult<YxThresholds> iterate_yx_thresholds(const GaussianModel& model, double lambda,
                                               const YxThresholds& init,
                                               const IterConfig& iter = {});

/// `init` must satisfy the ordering convention (throws OrderingViolation).
IterResult<XyxThresholds> iterate_xyx_thresholds(const GaussianModel& model, double lambda,
                                                 const XyxThresholds& init,
                                                 const IterConfig& iter = {});

// ---------------------------------------------------------------------------
// Multiplier solve.

template <class Table>
struct LambdaSolution {
  double lambda = 0.0;
  Table thresholds;  ///< the lambda-consistent table
  double pf = 0.0;
  bool converged = false;  ///< inner iteration converged at the final multiplier
};

/// Bisection on lambda in [0, lambda_max] for pf(lambda) = alpha, where
/// pf(lambda) is evaluated at the thresholds the fixed-point iteration
/// reaches from `init`. Throws InvalidArgument when pf never brackets alpha.
LambdaSolution<YxThresholds> solve_lambda_yx(const GaussianModel& model, double alpha,
                                             const YxThresholds& init, const IterConfig& iter = {},
                                             const LambdaConfig& cfg = {});
LambdaSolution<XyxThresholds> solve_lambda_xyx(const GaussianModel& model, double alpha,
                                               const XyxThresholds& init,
                                               const IterConfig& iter = {},
                                               const LambdaConfig& cfg = {});

/// Multiplier for the architecture at level alpha, initialised from the grid
/// optimum.
double solve_lambda(const GaussianModel& model, Architecture arch, double alpha,
                    const SearchConfig& search = {}, const IterConfig& iter = {});

// ---------------------------------------------------------------------------
// Design.

/// Grid path only.
OptimizeResult<YxThresholds> grid_optimize_yx(const GaussianModel& model, double alpha,
                                              const SearchConfig& search = {});
OptimizeResult<XyxThresholds> grid_optimize_xyx(const GaussianModel& model, double alpha,
                                                const SearchConfig& search = {});

OptimizeResult<YxThresholds> optimize_yx(const GaussianModel& model, double alpha,
                                         const SearchConfig& search = {},
                                         const IterConfig& iter = {});
OptimizeResult<XyxThresholds> optimize_xyx(const GaussianModel& model, double alpha,
                                           const SearchConfig& search = {},
                                           const IterConfig& iter = {});

/// Centralized detector on x/sigma_x^2 + y/sigma_y^2:
/// pd = Q(Q^{-1}(alpha) - d), d = sqrt(1/sigma_x^2 + 1/sigma_y^2).
OperatingPoint centralized(const GaussianModel& model, double alpha);

/// Same operating point from one-dimensional integrals over x of the
/// conditional tail of y, with the statistic threshold solved numerically.
OperatingPoint centralized_by_quadrature(const GaussianModel& model, double alpha);

/// Single sensor X at level alpha: Q(Q^{-1}(alpha) - 1/sigma_x).
double single_sensor_pd(double sigma, double alpha);

/// Throws InvalidArgument unless 0 < alpha < 1.
double checked_alpha(double alpha);

}  // namespace tandem
