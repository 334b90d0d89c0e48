#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>

namespace tandem {

/// Thrown for malformed inputs (non-positive noise scales, bad probabilities,
/// shape mismatches). Configuration errors in the CLI map to exit code 2.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when an XYX threshold table breaks the monotone ordering convention.
class OrderingViolation : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

enum class Sensor { X, Y };

/// Selects the mean of the observation: 0 under H0, 1 under H1.
enum class Hypothesis : int { H0 = 0, H1 = 1 };

constexpr double mean_of(Hypothesis h) { return static_cast<int>(h); }

/// Threshold on a scalar observation, decide 1 iff obs > t. May be +inf
/// (never decide 1) or -inf (always decide 1).
using Threshold = double;

/// Unit mean shift in independent Gaussian noise at two sensors:
///   x = s + z1, y = s + z2, z1 ~ N(0, sigma_x^2), z2 ~ N(0, sigma_y^2),
///   H0: s = 0, H1: s = 1.
/// Other shifts reduce to this one by rescaling the noise scales.
class GaussianModel {
 public:
  GaussianModel(double sigma_x, double sigma_y);

  double sigma_x() const { return sigma_x_; }
  double sigma_y() const { return sigma_y_; }
  double sigma(Sensor s) const { return s == Sensor::X ? sigma_x_ : sigma_y_; }

  /// Same problem with the two sensors' roles exchanged.
  GaussianModel swapped() const { return {sigma_y_, sigma_x_}; }

  friend bool operator==(const GaussianModel&, const GaussianModel&) = default;

 private:
  double sigma_x_;
  double sigma_y_;
};

/// Validates a noise scale; throws InvalidArgument naming `what` otherwise.
double checked_sigma(double sigma, const char* what);

// ---------------------------------------------------------------------------
// Standard normal helpers.

/// Q(z) = P(Z > z). Exact 0/1 at +-inf, clamped beyond |z| = 38.
double q_tail(double z);

/// log Q(z), finite for every finite z (asymptotic series far in the tail).
double log_q_tail(double z);

/// Inverse of q_tail: returns z with Q(z) = p. p = 0 gives +inf, p = 1 gives -inf.
double q_inverse(double p);

/// Standard normal density.
double normal_pdf(double z);

// ---------------------------------------------------------------------------
// Model probabilities.

/// P_i(obs > t) = Q((t - i) / sigma) at the chosen sensor.
double tail_prob(const GaussianModel& model, Threshold t, Hypothesis hyp, Sensor sensor);

/// log P_i(lo < obs <= hi); -inf for empty or underflowing intervals. Accurate
/// far in either tail.
double log_interval_prob(const GaussianModel& model, Threshold lo, Threshold hi, Hypothesis hyp,
                         Sensor sensor);

/// log p1(obs) / p0(obs) = (obs - 1/2) / sigma^2.
double llr(const GaussianModel& model, double obs, Sensor sensor);

/// log [P0(obs > t) / P1(obs > t)], using the limits -inf at t = +inf and 0 at t = -inf.
double log_tail_ratio(const GaussianModel& model, Threshold t, Sensor sensor);

/// log [P0(obs <= t) / P1(obs <= t)], using the limits 0 at t = +inf and +inf at t = -inf.
double log_head_ratio(const GaussianModel& model, Threshold t, Sensor sensor);

/// Inverts a likelihood-ratio test at `log_lambda` into a threshold on obs:
/// t = sigma^2 log(lambda) + 1/2.
Threshold lrt_threshold(const GaussianModel& model, double log_lambda, Sensor sensor);

// ---------------------------------------------------------------------------
// Threshold tables shared by the architecture modules.

/// One-way tandem (YX): Y sends v = [y > t_v], X decides w = [x > t_w[v]].
struct YxThresholds {
  Threshold t_v = 0.5;
  std::array<Threshold, 2> t_w{0.5, 0.5};

  friend bool operator==(const YxThresholds&, const YxThresholds&) = default;
};

/// Interactive (XYX): X sends u = [x > t_u], Y replies v = [y > t_v[u]],
/// X decides w = [x > t_w[v][u]] on the region R_u it already knows.
struct XyxThresholds {
  Threshold t_u = 0.5;
  std::array<Threshold, 2> t_v{0.5, 0.5};
  std::array<std::array<Threshold, 2>, 2> t_w{{{0.5, 0.5}, {0.5, 0.5}}};  // [v][u]

  /// The XYX table that ignores u and reproduces a YX rule exactly.
  static XyxThresholds collapse(const YxThresholds& yx, Threshold t_u = 0.5);

  friend bool operator==(const XyxThresholds&, const XyxThresholds&) = default;
};

/// Monotone-likelihood-ratio ordering used for XYX tables:
///   t_w[1][u] <= t_w[0][u],  t_w[v][0] <= t_w[v][1],  t_v[1] <= t_v[0].
/// Returns a diagnostic naming the first violated inequality, or nullopt.
std::optional<std::string> ordering_violation(const XyxThresholds& thr);

/// YX ordering t_w[1] <= t_w[0].
std::optional<std::string> ordering_violation(const YxThresholds& thr);

/// P_i(R_{w|v} ∩ R_u) indexed [w][v][u]. For each v the four (w, u) entries
/// sum to one.
using JointTable = std::array<std::array<std::array<double, 2>, 2>, 2>;

/// Region probabilities of the XYX fusion step. Throws OrderingViolation when
/// the table breaks the ordering convention.
JointTable xyx_joint_probs(const GaussianModel& model, const XyxThresholds& thr, Hypothesis hyp);

namespace detail {
/// Same as xyx_joint_probs without the ordering check; the closed forms hold
/// for any table.
JointTable joint_probs_unchecked(const GaussianModel& model, const XyxThresholds& thr,
                                 Hypothesis hyp);
}  // namespace detail

}  // namespace tandem
