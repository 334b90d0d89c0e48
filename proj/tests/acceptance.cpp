// Acceptance gate: one PASS/FAIL line per criterion, tolerances pinned below.
// Exit status is nonzero when any criterion fails.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "tandem/asymptotic.hpp"
#include "tandem/fixed_sample.hpp"
#include "tandem/gaussian_model.hpp"
#include "tandem/mif.hpp"
#include "tandem/montecarlo.hpp"
#include "tandem/multisensor.hpp"

namespace {

using tandem::GaussianModel;
using tandem::Hypothesis;
using tandem::MultiSensorModel;
using tandem::XyxThresholds;
using tandem::YxThresholds;

constexpr double kInf = oracle::kInf;
constexpr std::uint64_t kSeed = 20261016;

// Pinned tolerances.
constexpr double kTolKlEquality = 1e-6;
constexpr double kTolOrdering = 1e-9;
constexpr double kMinGain = 1e-3;
constexpr double kTolPf = 1e-6;
constexpr double kTolSymmetry = 1e-9;
constexpr double kTolAnchor = 1e-12;
constexpr double kTolResidual = 1e-6;
constexpr double kTolNoGain = 1e-6;
constexpr double kTolJoint = 1e-9;
constexpr double kTolKlQuad = 1e-8;
constexpr double kTolGridIter = 1e-4;

int failures = 0;

void report(int id, const char* name, bool pass, const std::string& detail, double seconds) {
  std::printf("%s criterion %d (%s): %s [%.1f s]\n", pass ? "PASS" : "FAIL", id, name,
              detail.c_str(), seconds);
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

double q(double t, double mean, double sigma) { return oracle::upper_tail((t - mean) / sigma); }

XyxThresholds random_ordered_table(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(-2.5, 3.5);
  XyxThresholds thr;
  thr.t_u = d(rng);
  const double a = d(rng), b = d(rng);
  thr.t_v = {std::max(a, b), std::min(a, b)};
  std::array<double, 4> w{d(rng), d(rng), d(rng), d(rng)};
  std::sort(w.begin(), w.end());
  const bool flip = rng() & 1;
  thr.t_w[1][0] = w[0];
  thr.t_w[0][1] = w[3];
  thr.t_w[0][0] = flip ? w[1] : w[2];
  thr.t_w[1][1] = flip ? w[2] : w[1];
  return thr;
}

YxThresholds random_yx_table(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(-1.5, 2.5);
  const double a = d(rng), b = d(rng);
  return {d(rng), {std::max(a, b), std::min(a, b)}};
}

// P_i(w, v, u) by integrating the x-density over pieces where the rules give (u, w).
double joint_by_quadrature(double sigma, const XyxThresholds& thr, double mean, int w, int v,
                           int u) {
  std::vector<double> cuts{-kInf, thr.t_u, thr.t_w[v][0], thr.t_w[v][1], kInf};
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (!(cuts[i] < cuts[i + 1])) continue;
    const double x = oracle::midpoint(cuts[i], cuts[i + 1]);
    const int uu = x > thr.t_u;
    if (uu != u || (x > thr.t_w[v][uu]) != w) continue;
    total += oracle::quad([&](double t) { return oracle::pdf(t, mean, sigma); }, cuts[i], cuts[i + 1]);
  }
  return total;
}

double xyx_kl_by_quadrature(const GaussianModel& m, double t_u, std::array<double, 2> t_v) {
  const double sx = m.sigma_x(), sy = m.sigma_y();
  return oracle::quad_pieces(
      [&](double x) {
        const int u = x > t_u;
        const double a = q(t_v[u], 0, sy), b = q(t_v[u], 1, sy);
        const double p0 = oracle::pdf(x, 0, sx);
        if (p0 == 0.0) return 0.0;
        const double lx = ((x - 1) * (x - 1) - x * x) / (2 * sx * sx);
        double s = 0.0;
        if (a > 0.0) s += a * (lx + std::log(a / b));
        if (a < 1.0) s += (1 - a) * (lx + std::log((1 - a) / (1 - b)));
        return p0 * s;
      },
      {t_u});
}

void criterion1() {
  Timer t;
  const std::array<double, 5> grid{0.5, 0.75, 1.0, 1.5, 2.0};
  double worst = 0.0;
  for (double sx : grid) {
    for (double sy : grid) {
      const GaussianModel m(sx, sy);
      worst = std::max(worst, std::abs(tandem::maximize_kl_yx(m).k_total -
                                       tandem::maximize_kl_xyx(m).k_total));
    }
  }
  report(1, "one-way and interactive exponents coincide", worst <= kTolKlEquality,
         fmt("max |K_yx - K_xyx| = %.3g over 25 models, tol %.0e", worst, kTolKlEquality),
         t.seconds());
}

struct Fig3Point {
  double sigma_x;
  tandem::OptimizeResult<YxThresholds> yx;
  tandem::OptimizeResult<XyxThresholds> xyx;
  double pd_centralized;
};

std::vector<Fig3Point> run_fig3() {
  std::vector<Fig3Point> out;
  for (double sx : tandem::linspace(0.5, 2.0, 16)) {
    const GaussianModel m(sx, 1.0);
    out.push_back({sx, tandem::optimize_yx(m, 0.2), tandem::optimize_xyx(m, 0.2),
                   tandem::centralized(m, 0.2).pd});
  }
  return out;
}

void criterion2(const std::vector<Fig3Point>& pts, double seconds) {
  double worst_order = 0.0, best_gain = -kInf, worst_pf = 0.0;
  for (const auto& p : pts) {
    worst_order = std::max({worst_order, p.yx.point.pd - p.xyx.point.pd,
                            p.xyx.point.pd - p.pd_centralized});
    best_gain = std::max(best_gain, p.xyx.point.pd - p.yx.point.pd);
    worst_pf = std::max({worst_pf, std::abs(p.yx.point.pf - 0.2), std::abs(p.xyx.point.pf - 0.2)});
  }
  const bool pass = worst_order <= kTolOrdering && best_gain >= kMinGain && worst_pf <= kTolPf;
  report(2, "fixed-sample detection curves", pass,
         fmt("max ordering violation %.3g, max gain %.4g, max |pf - 0.2| %.3g", worst_order,
             best_gain, worst_pf),
         seconds);
}

void criterion3() {
  Timer t;
  const auto eq = tandem::kl_direction_swap(GaussianModel(1.0, 1.0));
  const auto sharp = tandem::kl_direction_swap(GaussianModel(0.5, 1.0));
  const auto noisy = tandem::kl_direction_swap(GaussianModel(2.0, 1.0));
  const double sym = std::abs(eq.k_final_at_x - eq.k_final_at_y);
  const bool pass = sym <= kTolSymmetry && sharp.k_final_at_x > sharp.k_final_at_y &&
                    noisy.k_final_at_x < noisy.k_final_at_y;
  report(3, "decision-direction crossing", pass,
         fmt("|dK| at unit noise %.3g; dK(0.5) = %.4g; dK(2) = %.4g", sym,
             sharp.k_final_at_x - sharp.k_final_at_y, noisy.k_final_at_x - noisy.k_final_at_y),
         t.seconds());
}

void criterion4() {
  Timer t;
  double worst = 0.0;
  for (double sx : {0.5, 1.0, 2.0}) {
    const GaussianModel m(sx, 1.0);
    worst = std::max(worst, std::abs(tandem::kl_yx(m, kInf).k_total - 1.0 / (2 * sx * sx)));
  }
  report(4, "observation-only exponent anchor", worst <= kTolAnchor,
         fmt("max |K - 1/(2 sigma_x^2)| = %.3g, tol %.0e", worst, kTolAnchor), t.seconds());
}

void criterion5(const std::vector<Fig3Point>& pts) {
  Timer t;
  double worst_coupling = 0.0;
  for (double sy : {0.5, 1.0, 2.0}) {
    const GaussianModel m(1.0, sy);
    const auto r = tandem::maximize_kl_yx(m);
    const double a = q(r.t_star, 0, sy), b = q(r.t_star, 1, sy);
    const double f_a = std::log(a / b) - std::log((1 - a) / (1 - b));
    const double f_b = (b - a) / (b * (1 - b));
    worst_coupling =
        std::max(worst_coupling, std::abs(r.t_star - (sy * sy * std::log(-f_a / f_b) + 0.5)));
  }
  double worst_fp = 0.0;
  int converged = 0;
  for (const auto& p : pts) {
    if (!p.xyx.iteration_converged) continue;
    ++converged;
    worst_fp = std::max(worst_fp, tandem::fixed_point_residual(GaussianModel(p.sigma_x, 1.0),
                                                               p.xyx.point.lambda, p.xyx.thresholds));
  }
  const bool pass = worst_coupling <= kTolResidual && worst_fp <= kTolResidual && converged > 0;
  report(5, "fixed-point consistency", pass,
         fmt("exponent coupling residual %.3g; interactive threshold residual %.3g on %g "
             "converged points",
             worst_coupling, worst_fp, converged),
         t.seconds());
}

template <class Design, class Model, class Eval>
int mc_misses(const Model& m, const Design& d, Eval&& eval, std::uint64_t seed, int& checks) {
  const tandem::Rates a = eval(m, d);
  const tandem::McRates s = tandem::simulate_fixed(m, d, 1000000, seed);
  checks += 2;
  return !s.pf.covers(a.pf) + !s.pd.covers(a.pd);
}

void criterion6() {
  Timer t;
  std::mt19937_64 rng(kSeed);
  std::uniform_real_distribution<double> sig(0.5, 2.0), th(-1.5, 2.5);
  std::uint64_t seed = kSeed;
  int misses = 0, checks = 0;
  for (int i = 0; i < 5; ++i) {
    const GaussianModel m(sig(rng), sig(rng));
    misses += mc_misses(m, random_yx_table(rng), tandem::evaluate_yx, seed++, checks);
  }
  for (int i = 0; i < 5; ++i) {
    const GaussianModel m(sig(rng), sig(rng));
    misses += mc_misses(
        m, random_ordered_table(rng),
        [](const GaussianModel& mm, const XyxThresholds& d) { return tandem::evaluate_xyx(mm, d); },
        seed++, checks);
  }
  for (int i = 0; i < 5; ++i) {
    const MultiSensorModel m(sig(rng), {sig(rng), sig(rng)});
    tandem::VecYxThresholds d{{th(rng), th(rng)}, {th(rng), th(rng), th(rng), th(rng)}};
    misses += mc_misses(
        m, d,
        [](const MultiSensorModel& mm, const tandem::VecYxThresholds& dd) {
          return tandem::multisensor_evaluate(mm, dd);
        },
        seed++, checks);
  }

  const GaussianModel unit(1.0, 1.0);
  const auto k_yx = tandem::maximize_kl_yx(unit);
  const auto e_yx = tandem::estimate_exponent(unit, k_yx.t_star, 2000, 200, seed++);
  const auto k_xyx = tandem::maximize_kl_xyx(unit);
  const auto e_xyx =
      tandem::estimate_exponent(unit, k_xyx.design.t_u, k_xyx.design.t_v, 2000, 200, seed++);
  const bool exp_ok = e_yx.covers(k_yx.k_total) && e_xyx.covers(k_xyx.k_total);
  const bool pass = misses == 0 && exp_ok;
  char buf[320];
  std::snprintf(buf, sizeof buf,
                "%d/%d rate checks outside 3-sigma; exponent yx %.5f +- %.5f vs %.5f, xyx %.5f "
                "+- %.5f vs %.5f",
                misses, checks, e_yx.value, e_yx.half_width, k_yx.k_total, e_xyx.value,
                e_xyx.half_width, k_xyx.k_total);
  report(6, "Monte-Carlo cross-validation", pass, buf, t.seconds());
}

void criterion7() {
  Timer t;
  const GaussianModel m(1.0, 1.0);
  const double k_yx = tandem::maximize_kl_yx(m).k_total;
  const double k_mif = tandem::mif_kl_max(m, 5).k_max;
  const double gap = k_mif - k_yx;
  report(7, "five-step memoryless exchange gains nothing", std::abs(gap) <= kTolNoGain,
         fmt("K_mif(5) - K_yx = %.3g, tol %.0e", gap, kTolNoGain), t.seconds());
}

void criterion8() {
  Timer t;
  const auto r = tandem::multisensor_kl_max(MultiSensorModel(1.0, {1.0, 1.0}));
  const double gap = std::abs(r.k_xvecyx - r.k_vecyx);

  std::mt19937_64 rng(kSeed + 8);
  std::uniform_real_distribution<double> th(-1.5, 2.5), sig(0.5, 2.0);
  int mismatches = 0;
  for (int i = 0; i < 50; ++i) {
    const GaussianModel g(sig(rng), sig(rng));
    const MultiSensorModel m(g);
    const YxThresholds yx = random_yx_table(rng);
    const auto a = tandem::evaluate_yx(g, yx);
    const auto b =
        tandem::multisensor_evaluate(m, tandem::VecYxThresholds{{yx.t_v}, {yx.t_w[0], yx.t_w[1]}});
    mismatches += a.pf != b.pf || a.pd != b.pd;
    mismatches += tandem::kl_yx(g, yx.t_v).k_total != tandem::multisensor_kl(m, {yx.t_v});

    const XyxThresholds x = random_ordered_table(rng);
    const auto c = tandem::evaluate_xyx(g, x);
    const auto d = tandem::multisensor_evaluate(
        m, tandem::XVecYxThresholds{x.t_u, {x.t_v}, {x.t_w[0], x.t_w[1]}});
    mismatches += c.pf != d.pf || c.pd != d.pd;
    mismatches += tandem::kl_xyx(g, tandem::make_xyx_kl_design(g, x.t_u, x.t_v)) !=
                  tandem::multisensor_kl(m, x.t_u, {x.t_v});
  }
  report(8, "multisensor exchange gains nothing", gap <= kTolNoGain && mismatches == 0,
         fmt("|K_xvecyx - K_vecyx| = %.3g; %g single-sensor reductions not bit-identical", gap,
             mismatches),
         t.seconds());
}

void criterion9(const std::vector<Fig3Point>& pts) {
  Timer t;
  std::mt19937_64 rng(kSeed + 9);
  std::uniform_real_distribution<double> sig(0.4, 2.5);
  double worst_joint = 0.0;
  for (int i = 0; i < 100; ++i) {
    const GaussianModel m(sig(rng), sig(rng));
    const XyxThresholds thr = random_ordered_table(rng);
    for (auto h : {Hypothesis::H0, Hypothesis::H1}) {
      const auto p = tandem::xyx_joint_probs(m, thr, h);
      for (int w = 0; w < 2; ++w) {
        for (int v = 0; v < 2; ++v) {
          for (int u = 0; u < 2; ++u) {
            const double ref = joint_by_quadrature(m.sigma_x(), thr, tandem::mean_of(h), w, v, u);
            worst_joint = std::max(worst_joint, std::abs(p[w][v][u] - ref));
          }
        }
      }
    }
  }

  std::uniform_real_distribution<double> s(0.5, 2.0), th(-2.0, 3.0);
  double worst_kl = 0.0;
  for (int i = 0; i < 50; ++i) {
    const GaussianModel m(s(rng), s(rng));
    const double t_u = th(rng);
    const std::array<double, 2> t_v{th(rng), th(rng)};
    worst_kl = std::max(worst_kl, std::abs(tandem::kl_xyx(m, tandem::make_xyx_kl_design(m, t_u, t_v)) -
                                           xyx_kl_by_quadrature(m, t_u, t_v)));
  }

  double worst_gi = 0.0;
  int converging = 0;
  for (const auto& p : pts) {
    for (const auto& [iter, grid] : {std::pair{p.yx.pd_iteration, p.yx.pd_grid},
                                     std::pair{p.xyx.pd_iteration, p.xyx.pd_grid}}) {
      if (!iter) continue;
      ++converging;
      worst_gi = std::max(worst_gi, std::abs(*iter - grid));
    }
  }
  const bool pass = worst_joint <= kTolJoint && worst_kl <= kTolKlQuad && worst_gi <= kTolGridIter &&
                    converging > 0;
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "joint tables %.3g (tol %.0e); exponent designs %.3g (tol %.0e); grid vs "
                "iteration %.3g on %d converging runs (tol %.0e)",
                worst_joint, kTolJoint, worst_kl, kTolKlQuad, worst_gi, converging, kTolGridIter);
  report(9, "independent oracle agreement", pass, buf, t.seconds());
}

}  // namespace

int main() {
  criterion1();
  Timer fig3_timer;
  const std::vector<Fig3Point> fig3 = run_fig3();
  criterion2(fig3, fig3_timer.seconds());
  criterion3();
  criterion4();
  criterion5(fig3);
  criterion6();
  criterion7();
  criterion8();
  criterion9(fig3);
  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
