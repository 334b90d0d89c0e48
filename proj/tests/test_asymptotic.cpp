#include "tandem/asymptotic.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"

namespace {

using tandem::GaussianModel;

constexpr double kInf = oracle::kInf;

double q(double t, double mean, double sigma) { return oracle::upper_tail((t - mean) / sigma); }

// D(p0(x, v) || p1(x, v)) for v = [y > t_v[u(x)]], u = [x > t_u], by
// quadrature over x of the conditional Bernoulli terms.
double xyx_kl_by_quadrature(const GaussianModel& m, double t_u, std::array<double, 2> t_v) {
  const double sx = m.sigma_x(), sy = m.sigma_y();
  return oracle::quad_pieces(
      [&](double x) {
        const int u = x > t_u;
        const double a = q(t_v[u], 0, sy), b = q(t_v[u], 1, sy);
        const double p0 = oracle::pdf(x, 0, sx);
        if (p0 == 0.0) return 0.0;
        // log p0(x)/p1(x), expanded so that it survives underflow of p1.
        const double lx = ((x - 1) * (x - 1) - x * x) / (2 * sx * sx);
        double s = 0.0;
        if (a > 0.0) s += a * (lx + std::log(a / b));
        if (a < 1.0) s += (1 - a) * (lx + std::log((1 - a) / (1 - b)));
        return p0 * s;
      },
      {t_u});
}

TEST(BernKl, ValuesAndBoundaries) {
  EXPECT_NEAR(tandem::bern_kl(0.5, 0.25), 0.5 * std::log(2.0) + 0.5 * std::log(0.5 / 0.75), 1e-15);
  EXPECT_NEAR(tandem::bern_kl(0.5, 0.25), 0.1438410362, 1e-10);
  EXPECT_EQ(tandem::bern_kl(0.0, 0.0), 0.0);
  EXPECT_EQ(tandem::bern_kl(1.0, 1.0), 0.0);
  EXPECT_EQ(tandem::bern_kl(0.3, 0.3), 0.0);
  EXPECT_EQ(tandem::bern_kl(0.5, 0.0), kInf);
  EXPECT_NEAR(tandem::bern_kl(0.0, 0.5), std::log(2.0), 1e-15);
  EXPECT_THROW(tandem::bern_kl(-0.1, 0.5), tandem::InvalidArgument);
  EXPECT_THROW(tandem::bern_kl(0.5, 1.5), tandem::InvalidArgument);
}

TEST(BernKl, JointConvexityOnRandomTuples) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.001, 0.999);
  for (int i = 0; i < 1000; ++i) {
    const double a1 = u(rng), b1 = u(rng), a2 = u(rng), b2 = u(rng), l = u(rng);
    const double lhs = tandem::bern_kl(l * a1 + (1 - l) * a2, l * b1 + (1 - l) * b2);
    const double rhs = l * tandem::bern_kl(a1, b1) + (1 - l) * tandem::bern_kl(a2, b2);
    EXPECT_LE(lhs, rhs + 1e-14);
  }
}

TEST(GaussianKl, MatchesQuadrature) {
  for (double s : {0.5, 1.0, 2.0}) {
    const double ref = oracle::quad(
        [&](double x) { return oracle::pdf(x, 0, s) * std::log(oracle::pdf(x, 0, s) / oracle::pdf(x, 1, s)); },
        -30 * s, 30 * s + 1);
    EXPECT_NEAR(tandem::gaussian_kl(s), ref, 1e-12);
  }
}

TEST(KlYx, UninformativeBitLeavesKx) {
  for (double sx : {0.5, 1.0, 2.0}) {
    const GaussianModel m(sx, 1.0);
    EXPECT_NEAR(tandem::kl_yx(m, kInf).k_total, 1.0 / (2 * sx * sx), 1e-12);
    EXPECT_NEAR(tandem::kl_yx(m, -kInf).k_total, 1.0 / (2 * sx * sx), 1e-12);
  }
}

TEST(KlYx, MidpointValue) {
  const GaussianModel m(1.0, 1.0);
  const double a = oracle::upper_tail(0.5), b = oracle::upper_tail(-0.5);
  const auto r = tandem::kl_yx(m, 0.5);
  EXPECT_NEAR(r.k_total, 0.5 + oracle::bern_kl(a, b), 1e-14);
  EXPECT_NEAR(r.k_total, 0.809007, 1e-6);
  EXPECT_EQ(r.k_x, 0.5);
}

TEST(KlYx, MatchesQuadratureOfJointLaw) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> s(0.5, 2.0), t(-1.5, 2.5);
  for (int i = 0; i < 20; ++i) {
    const GaussianModel m(s(rng), s(rng));
    const double tv = t(rng);
    EXPECT_NEAR(tandem::kl_yx(m, tv).k_total, xyx_kl_by_quadrature(m, 0.0, {tv, tv}), 1e-8);
  }
}

TEST(MaximizeKlYx, BeatsFineGridAndSatisfiesCoupling) {
  for (double sy : {0.5, 1.0, 2.0}) {
    const GaussianModel m(1.0, sy);
    const auto r = tandem::maximize_kl_yx(m);
    double best = -1.0;
    for (double t = -3.0 * sy; t <= 3.0 * sy + 1; t += 1e-3) {
      best = std::max(best, 0.5 + oracle::bern_kl(q(t, 0, sy), q(t, 1, sy)));
    }
    EXPECT_GE(r.k_total, best - 1e-12);
    EXPECT_NEAR(r.k_total, best, 1e-6);

    // Stationarity: t = sy^2 log(lambda) + 1/2 with lambda = -f_a / f_b.
    const double a = q(r.t_star, 0, sy), b = q(r.t_star, 1, sy);
    const double f_a = std::log(a / b) - std::log((1 - a) / (1 - b));
    const double f_b = (b - a) / (b * (1 - b));
    const double lambda = -f_a / f_b;
    EXPECT_LE(std::abs(r.t_star - (sy * sy * std::log(lambda) + 0.5)), 1e-6) << "sy=" << sy;
    EXPECT_LE(std::abs(tandem::kl_yx_stationarity(m, r.t_star)), 1e-6);
    EXPECT_NEAR(r.alpha_star, a, 1e-15);
    EXPECT_NEAR(r.beta_star, b, 1e-15);
  }
}

TEST(MaximizeKlYx, LocalMaximaIncludeGlobal) {
  const GaussianModel m(1.0, 1.0);
  const auto all = tandem::kl_yx_local_maxima(m);
  ASSERT_FALSE(all.empty());
  EXPECT_NEAR(all.front().k_total, tandem::maximize_kl_yx(m).k_total, 1e-12);
}

TEST(KlXyx, FiftyRandomDesignsAgainstQuadrature) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> s(0.5, 2.0), t(-2.0, 3.0);
  for (int i = 0; i < 50; ++i) {
    const GaussianModel m(s(rng), s(rng));
    const double t_u = t(rng);
    const std::array<double, 2> t_v{t(rng), t(rng)};
    const auto d = tandem::make_xyx_kl_design(m, t_u, t_v);
    EXPECT_NEAR(tandem::kl_xyx(m, d), xyx_kl_by_quadrature(m, t_u, t_v), 1e-8) << "design " << i;
  }
}

TEST(KlXyx, InconsistentDesignRejected) {
  const GaussianModel m(1.0, 1.0);
  auto d = tandem::make_xyx_kl_design(m, 0.5, {0.2, 0.7});
  d.alpha1 += 1e-6;
  EXPECT_THROW(tandem::kl_xyx(m, d), tandem::InvalidArgument);
}

TEST(MaximizeKlXyx, InteractionDoesNotHelp) {
  for (double sx : {0.5, 1.0, 2.0}) {
    for (double sy : {0.75, 1.5}) {
      const GaussianModel m(sx, sy);
      const double k_yx = tandem::maximize_kl_yx(m).k_total;
      const auto r = tandem::maximize_kl_xyx(m);
      EXPECT_NEAR(r.k_total, k_yx, 1e-6);
      EXPECT_NEAR(r.k_total, tandem::kl_xyx(m, r.design), 1e-14);
    }
  }
  // No random interactive design beats the one-way optimum.
  const GaussianModel m(1.0, 1.0);
  const double k_yx = tandem::maximize_kl_yx(m).k_total;
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> t(-2.0, 3.0);
  for (int i = 0; i < 200; ++i) {
    const auto d = tandem::make_xyx_kl_design(m, t(rng), {t(rng), t(rng)});
    EXPECT_LE(tandem::kl_xyx(m, d), k_yx + 1e-12);
  }
}

TEST(RegionCoefficients, VanishWhenYIgnoresU) {
  const GaussianModel m(1.0, 1.3);
  const auto d = tandem::make_xyx_kl_design(m, 0.4, {0.6, 0.6});
  const auto c = tandem::xyx_x_region_coefficients(d);
  EXPECT_EQ(c[0], 0.0);
  EXPECT_EQ(c[1], 0.0);
  const auto opt = tandem::maximize_kl_xyx(m);
  const auto c_opt = tandem::xyx_x_region_coefficients(opt.design);
  EXPECT_NEAR(c_opt[0], 0.0, 1e-6);
  EXPECT_NEAR(c_opt[1], 0.0, 1e-6);
}

TEST(DirectionSwap, FinalDecisionBelongsAtTheBetterSensor) {
  const auto eq = tandem::kl_direction_swap(GaussianModel(1.0, 1.0));
  EXPECT_LE(std::abs(eq.k_final_at_x - eq.k_final_at_y), 1e-9);
  const auto sharp_x = tandem::kl_direction_swap(GaussianModel(0.5, 1.0));
  EXPECT_GT(sharp_x.k_final_at_x, sharp_x.k_final_at_y);
  const auto noisy_x = tandem::kl_direction_swap(GaussianModel(2.0, 1.0));
  EXPECT_LT(noisy_x.k_final_at_x, noisy_x.k_final_at_y);
}

}  // namespace
