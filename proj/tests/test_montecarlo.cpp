#include "tandem/montecarlo.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "tandem/asymptotic.hpp"

namespace {

using tandem::Execution;
using tandem::GaussianModel;
using tandem::McStream;
using tandem::McStreamId;

TEST(McStream, DeterministicAndOpenInterval) {
  McStream a(42, McStreamId::H0, 3), b(42, McStreamId::H0, 3), c(42, McStreamId::H1, 3);
  bool differs = false;
  for (int i = 0; i < 1000; ++i) {
    const double u = a.uniform();
    EXPECT_EQ(u, b.uniform());
    EXPECT_GT(u, 0.0);
    EXPECT_LT(u, 1.0);
    differs = differs || u != c.uniform();
  }
  EXPECT_TRUE(differs);
}

TEST(McStream, NormalMoments) {
  McStream s(7, McStreamId::Exponent, 0);
  const int n = 200000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = s.normal();
    sum += z;
    sq += z * z;
  }
  EXPECT_NEAR(sum / n, 0.0, 4.0 / std::sqrt(n));
  EXPECT_NEAR(sq / n, 1.0, 4.0 * std::sqrt(2.0 / n));
}

TEST(Simulate, SerialAndParallelBitIdentical) {
  const GaussianModel m(0.9, 1.1);
  const tandem::XyxThresholds thr{0.5, {0.7, 0.3}, {{{0.6, 1.0}, {0.2, 0.4}}}};
  const auto s = tandem::simulate_fixed(m, thr, 300000, 99, Execution::Serial);
  const auto p = tandem::simulate_fixed(m, thr, 300000, 99, Execution::Parallel);
  EXPECT_EQ(s.pf.value, p.pf.value);
  EXPECT_EQ(s.pd.value, p.pd.value);
  EXPECT_EQ(s.pd.half_width, p.pd.half_width);

  const auto es = tandem::estimate_exponent(m, 0.2, 100, 300, 5, Execution::Serial);
  const auto ep = tandem::estimate_exponent(m, 0.2, 100, 300, 5, Execution::Parallel);
  EXPECT_EQ(es.value, ep.value);
  EXPECT_EQ(es.half_width, ep.half_width);

  const auto d = tandem::mif_design_from_thresholds(5, {{0.5, 0.5}, {0.2, 0.9}}, {{0.1, 0.7}, {-0.4, 0.4}});
  EXPECT_EQ(tandem::estimate_mif_kl(m, d, 100000, 3, Execution::Serial).value,
            tandem::estimate_mif_kl(m, d, 100000, 3, Execution::Parallel).value);
}

TEST(Simulate, SeedMattersAndIsRecorded) {
  const GaussianModel m(1.0, 1.0);
  const tandem::YxThresholds thr{0.2, {1.0, 0.3}};
  const auto a = tandem::simulate_fixed(m, thr, 100000, 1);
  const auto b = tandem::simulate_fixed(m, thr, 100000, 2);
  EXPECT_NE(a.pd.value, b.pd.value);
  EXPECT_EQ(a.pd.seed, 1u);
  EXPECT_EQ(a.pd.trials, 100000u);
  EXPECT_DOUBLE_EQ(a.pd.half_width, 3.0 * std::sqrt(a.pd.value * (1 - a.pd.value) / 100000));
  EXPECT_THROW(tandem::simulate_fixed(m, thr, 0, 1), tandem::InvalidArgument);
}

TEST(Simulate, CoversAnalyticRates) {
  const GaussianModel m(1.0, 1.0);
  const tandem::YxThresholds yx{0.2, {1.0, 0.3}};
  const auto ay = tandem::evaluate_yx(m, yx);
  const auto sy = tandem::simulate_fixed(m, yx, 400000, 11);
  EXPECT_TRUE(sy.pf.covers(ay.pf));
  EXPECT_TRUE(sy.pd.covers(ay.pd));

  const tandem::XyxThresholds xyx{0.5, {0.7, 0.3}, {{{0.6, 1.0}, {0.2, 0.4}}}};
  const auto ax = tandem::evaluate_xyx(m, xyx);
  const auto sx = tandem::simulate_fixed(m, xyx, 400000, 12);
  EXPECT_TRUE(sx.pf.covers(ax.pf));
  EXPECT_TRUE(sx.pd.covers(ax.pd));

  const tandem::MultiSensorModel ms(1.0, {1.0, 1.5});
  const tandem::VecYxThresholds v{{0.3, 0.6}, {1.5, 0.8, 0.7, 0.1}};
  const auto av = tandem::multisensor_evaluate(ms, v);
  const auto sv = tandem::simulate_fixed(ms, v, 400000, 13);
  EXPECT_TRUE(sv.pf.covers(av.pf));
  EXPECT_TRUE(sv.pd.covers(av.pd));
}

TEST(Exponent, CoversOneWayAndInteractiveOptima) {
  const GaussianModel m(1.0, 1.0);
  const auto k = tandem::maximize_kl_yx(m);
  const auto e = tandem::estimate_exponent(m, k.t_star, 2000, 200, 21);
  EXPECT_TRUE(e.covers(k.k_total)) << e.value << " +- " << e.half_width;
  const auto kx = tandem::maximize_kl_xyx(m);
  const auto ex = tandem::estimate_exponent(m, kx.design.t_u, kx.design.t_v, 2000, 200, 22);
  EXPECT_TRUE(ex.covers(kx.k_total)) << ex.value << " +- " << ex.half_width;
  EXPECT_THROW(tandem::estimate_exponent(m, 0.2, 0, 10, 1), tandem::InvalidArgument);
}

TEST(Exponent, MifEstimateCoversAnalytic) {
  const GaussianModel m(1.0, 1.0);
  const auto d = tandem::mif_design_from_thresholds(5, {{0.5, 0.5}, {0.2, 0.9}}, {{0.1, 0.7}, {-0.4, 0.4}});
  const auto e = tandem::estimate_mif_kl(m, d, 400000, 23);
  EXPECT_TRUE(e.covers(tandem::mif_kl(m, d))) << e.value << " +- " << e.half_width;
}

}  // namespace
