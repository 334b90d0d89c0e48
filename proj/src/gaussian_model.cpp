#include "tandem/gaussian_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/special_functions/erf.hpp>

namespace tandem {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Past this point erfc is subnormal and Q is treated as 0.
constexpr double kTailClamp = 38.0;

// log Q switches to the asymptotic series here; the first omitted term is
// below 5e-14 in relative size.
constexpr double kLogTailSeriesStart = 35.0;

}  // namespace

double checked_sigma(double sigma, const char* what) {
  if (!std::isfinite(sigma) || sigma <= 0.0) {
    std::ostringstream os;
    os << what << " must be positive and finite (got " << sigma << ")";
    throw InvalidArgument(os.str());
  }
  return sigma;
}

GaussianModel::GaussianModel(double sigma_x, double sigma_y)
    : sigma_x_(checked_sigma(sigma_x, "sigma_x")), sigma_y_(checked_sigma(sigma_y, "sigma_y")) {}

double q_tail(double z) {
  if (std::isnan(z)) return z;
  if (z >= kTailClamp) return 0.0;
  if (z <= -kTailClamp) return 1.0;
  return 0.5 * std::erfc(z / std::numbers::sqrt2);
}

double log_q_tail(double z) {
  if (std::isnan(z)) return z;
  if (z == kInf) return -kInf;
  if (z < 0.0) return std::log1p(-q_tail(-z));
  if (z < kLogTailSeriesStart) return std::log(q_tail(z));
  // Q(z) = phi(z)/z * (1 - 1/z^2 + 3/z^4 - 15/z^6 + 105/z^8 - 945/z^10 + ...)
  const double r = 1.0 / (z * z);
  const double series =
      1.0 + r * (-1.0 + r * (3.0 + r * (-15.0 + r * (105.0 + r * (-945.0 + r * 10395.0)))));
  return -0.5 * z * z - std::log(z) - 0.5 * std::log(2.0 * std::numbers::pi) + std::log(series);
}

double normal_pdf(double z) {
  return std::exp(-0.5 * z * z) * std::numbers::inv_sqrtpi / std::numbers::sqrt2;
}


double q_inverse(double p) {
  if (std::isnan(p) || p < 0.0 || p > 1.0) {
    throw InvalidArgument("q_inverse: probability outside [0, 1]");
  }
  if (p == 0.0) return kInf;
  if (p == 1.0) return -kInf;
  // Q(z) = erfc(z / sqrt 2) / 2.
  return std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

double tail_prob(const GaussianModel& model, Threshold t, Hypothesis hyp, Sensor sensor) {
  return q_tail((t - mean_of(hyp)) / model.sigma(sensor));
}

double log_interval_prob(const GaussianModel& model, Threshold lo, Threshold hi, Hypothesis hyp,
                         Sensor sensor) {
  if (!(lo < hi)) return -kInf;
  const double mu = mean_of(hyp);
  const double s = model.sigma(sensor);
  const double a = (lo - mu) / s;
  const double b = (hi - mu) / s;
  if (a >= 0.0) {
    const double la = log_q_tail(a);
    if (la == -kInf) return -kInf;
    return la + std::log1p(-std::exp(log_q_tail(b) - la));
  }
  if (b <= 0.0) {
    // Lower side, P = Phi(b) - Phi(a) = Q(-b) - Q(-a).
    const double lb = log_q_tail(-b);
    if (lb == -kInf) return -kInf;
    return lb + std::log1p(-std::exp(log_q_tail(-a) - lb));
  }
  return std::log(1.0 - q_tail(b) - q_tail(-a));
}

double llr(const GaussianModel& model, double obs, Sensor sensor) {
  const double s = model.sigma(sensor);
  return (obs - 0.5) / (s * s);
}

double log_tail_ratio(const GaussianModel& model, Threshold t, Sensor sensor) {
  if (t == kInf) return -kInf;
  if (t == -kInf) return 0.0;
  const double s = model.sigma(sensor);
  return log_q_tail(t / s) - log_q_tail((t - 1.0) / s);
}

double log_head_ratio(const GaussianModel& model, Threshold t, Sensor sensor) {
  if (t == kInf) return 0.0;
  if (t == -kInf) return kInf;
  const double s = model.sigma(sensor);
  return log_q_tail(-t / s) - log_q_tail((1.0 - t) / s);
}

Threshold lrt_threshold(const GaussianModel& model, double log_lambda, Sensor sensor) {
  if (std::isinf(log_lambda)) return log_lambda;
  const double s = model.sigma(sensor);
  return s * s * log_lambda + 0.5;
}

XyxThresholds XyxThresholds::collapse(const YxThresholds& yx, Threshold t_u) {
  XyxThresholds out;
  out.t_u = t_u;
  out.t_v = {yx.t_v, yx.t_v};
  out.t_w = {{{yx.t_w[0], yx.t_w[0]}, {yx.t_w[1], yx.t_w[1]}}};
  return out;
}

namespace {

std::string describe(const char* lhs, double a, const char* rhs, double b) {
  std::ostringstream os;
  os.precision(17);
  os << "ordering convention violated: " << lhs << " <= " << rhs << " required, got " << a
     << " > " << b;
  return os.str();
}

}  // namespace

std::optional<std::string> ordering_violation(const XyxThresholds& thr) {
  if (std::isnan(thr.t_u)) return "t_u is NaN";
  for (int u = 0; u < 2; ++u) {
    if (thr.t_w[1][u] > thr.t_w[0][u]) {
      return describe(u ? "t_w[1][1]" : "t_w[1][0]", thr.t_w[1][u], u ? "t_w[0][1]" : "t_w[0][0]",
                      thr.t_w[0][u]);
    }
  }
  for (int v = 0; v < 2; ++v) {
    if (thr.t_w[v][0] > thr.t_w[v][1]) {
      return describe(v ? "t_w[1][0]" : "t_w[0][0]", thr.t_w[v][0], v ? "t_w[1][1]" : "t_w[0][1]",
                      thr.t_w[v][1]);
    }
  }
  if (thr.t_v[1] > thr.t_v[0]) return describe("t_v[1]", thr.t_v[1], "t_v[0]", thr.t_v[0]);
  for (double t : {thr.t_v[0], thr.t_v[1], thr.t_w[0][0], thr.t_w[0][1], thr.t_w[1][0],
                   thr.t_w[1][1]}) {
    if (std::isnan(t)) return "threshold table contains NaN";
  }
  return std::nullopt;
}

std::optional<std::string> ordering_violation(const YxThresholds& thr) {
  if (std::isnan(thr.t_v) || std::isnan(thr.t_w[0]) || std::isnan(thr.t_w[1])) {
    return "threshold table contains NaN";
  }
  if (thr.t_w[1] > thr.t_w[0]) return describe("t_w[1]", thr.t_w[1], "t_w[0]", thr.t_w[0]);
  return std::nullopt;
}

namespace detail {

JointTable joint_probs_unchecked(const GaussianModel& model, const XyxThresholds& thr,
                                 Hypothesis hyp) {
  const double mu = mean_of(hyp);
  const double s = model.sigma_x();
  auto q = [&](double t) { return q_tail((t - mu) / s); };

  const double p_u1 = q(thr.t_u);
  JointTable p{};
  for (int v = 0; v < 2; ++v) {
    // u = 1: x > t_u and x > t_w[v][1].
    p[1][v][1] = q(std::max(thr.t_w[v][1], thr.t_u));
    p[0][v][1] = p_u1 - p[1][v][1];
    // u = 0: t_w[v][0] < x <= t_u.
    p[1][v][0] = q(thr.t_w[v][0]) - q(std::max(thr.t_w[v][0], thr.t_u));
    p[0][v][0] = (1.0 - p_u1) - p[1][v][0];
  }
  return p;
}

}  // namespace detail

JointTable xyx_joint_probs(const GaussianModel& model, const XyxThresholds& thr, Hypothesis hyp) {
  if (auto why = ordering_violation(thr)) throw OrderingViolation(*why);
  return detail::joint_probs_unchecked(model, thr, hyp);
}

}  // namespace tandem
