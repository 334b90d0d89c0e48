#pragma once

// KL-distance error exponents of the final decision at X. In the
// Chernoff-Stein regime the type-II error of the best NP test on n samples
// decays as exp(-n K), so designs are compared by K = D(p0(x, v) || p1(x, v)).

#include <array>
#include <vector>

#include "tandem/gaussian_model.hpp"

namespace tandem {

/// D(Bern(alpha) || Bern(beta)) in nats, with 0 log 0 = 0. A mismatched
/// boundary (beta in {0, 1} and alpha != beta) gives +inf. Throws
/// InvalidArgument for arguments outside [0, 1].
double bern_kl(double alpha, double beta);

/// K[x] = D(p0(x) || p1(x)) = 1 / (2 sigma^2) for a unit shift.
double gaussian_kl(double sigma);

struct KlResult {
  double k_total = 0.0;   ///< nats
  double k_x = 0.0;       ///< K[x] term
  Threshold t_star = 0.0; ///< Y threshold
  double alpha_star = 0.0;  ///< P0(y > t_star)
  double beta_star = 0.0;   ///< P1(y > t_star)
};

/// K[x] + f(Q(t / sigma_y), Q((t - 1) / sigma_y)).
KlResult kl_yx(const GaussianModel& model, Threshold t);

/// t - (sigma_y^2 log lambda(t) + 1/2): zero exactly at the stationary points
/// of kl_yx in t. +-inf when lambda(t) is not positive.
double kl_yx_stationarity(const GaussianModel& model, Threshold t);

/// Maximizer of kl_yx (2001-point grid on [-3 sigma_y, 3 sigma_y + 1],
/// golden-section to 1e-8, then the stationarity root).
KlResult maximize_kl_yx(const GaussianModel& model);

/// Every grid-detected local maximum of kl_yx after refinement, best first.
std::vector<KlResult> kl_yx_local_maxima(const GaussianModel& model);

/// Interactive design: u = [x > t_u], v = [y > t_v[u]].
struct XyxKlDesign {
  Threshold t_u = 0.5;
  std::array<Threshold, 2> t_v{0.5, 0.5};
  double alpha1 = 0.0;                 ///< P0(x > t_u)
  std::array<double, 2> alpha2{};      ///< P0(y > t_v[u])
  std::array<double, 2> beta2{};       ///< P1(y > t_v[u])
};

/// Fills in the region probabilities for the given thresholds.
XyxKlDesign make_xyx_kl_design(const GaussianModel& model, Threshold t_u,
                               std::array<Threshold, 2> t_v);

/// K[x] + alpha1 f(alpha2[1], beta2[1]) + (1 - alpha1) f(alpha2[0], beta2[0]).
/// Throws InvalidArgument when the stored probabilities disagree with the
/// thresholds by more than 1e-12.
double kl_xyx(const GaussianModel& model, const XyxKlDesign& design);

struct XyxKlMax {
  XyxKlDesign design;
  double k_total = 0.0;
};

/// Maximizes kl_xyx over (t_u, t_v[0], t_v[1]): coarse 3-D grid with a
/// deterministic tie-break (smallest grid index), then each Y branch is
/// refined to its own one-dimensional optimum.
XyxKlMax maximize_kl_xyx(const GaussianModel& model);

/// Derivative coefficients of K with respect to p(u = 1 | x) on R_u:
///   C_u = -dP0 log[beta_u (1 - alpha_u) / (alpha_u (1 - beta_u))]
///         + dP1 (beta_u - alpha_u) / (beta_u (1 - beta_u)),
/// with dP_i = P_i(v = 1 | u = 1) - P_i(v = 1 | u = 0). R_{u=1} is optimal
/// where the coefficient is positive; both vanish when Y ignores u.
std::array<double, 2> xyx_x_region_coefficients(const XyxKlDesign& design);

struct DirectionSwap {
  double k_final_at_x = 0.0;
  double k_final_at_y = 0.0;
};

/// Best one-way exponent with the final decision at X versus at Y.
DirectionSwap kl_direction_swap(const GaussianModel& model);

}  // namespace tandem
