#include "tandem/fixed_sample.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

namespace tandem {

namespace {

constexpr Hypothesis kH0 = Hypothesis::H0;
constexpr Hypothesis kH1 = Hypothesis::H1;

// Largest |log lambda| the fusion search will try.
constexpr double kLogLambdaCap = 1e6;

// Accept the iteration path when it is within this of the grid optimum.
constexpr double kPdMatch = 1e-9;

double gap(double a, double b) {
  if (a == b) return 0.0;
  if (std::isinf(a) || std::isinf(b)) return kInf;
  return std::abs(a - b);
}

// Threshold for an LRT at log(lambda) + log(num/den), with num and den given
// as logs. 0/0 keeps `current`; num > 0 = den gives +inf; num = 0 gives -inf.
Threshold ratio_threshold(const GaussianModel& model, double log_lambda, double log_num,
                          double log_den, Threshold current, Sensor sensor) {
  if (log_num == -kInf && log_den == -kInf) return current;
  if (log_lambda == -kInf) return -kInf;
  if (log_den == -kInf) return kInf;
  if (log_num == -kInf) return -kInf;
  return lrt_threshold(model, log_lambda + log_num - log_den, sensor);
}

double log_of(double lambda) {
  if (lambda < 0.0 || std::isnan(lambda)) throw InvalidArgument("lambda must be non-negative");
  return std::log(lambda);
}

Threshold damp(Threshold old_value, Threshold new_value, double damping) {
  if (std::isinf(old_value) || std::isinf(new_value)) return new_value;
  return damping * old_value + (1.0 - damping) * new_value;
}

// Rates of an XYX table without the ordering check.
Rates rates_unchecked(const GaussianModel& model, const XyxThresholds& thr) {
  Rates r;
  for (Hypothesis h : {kH0, kH1}) {
    const JointTable p = detail::joint_probs_unchecked(model, thr, h);
    double total = 0.0;
    for (int u = 0; u < 2; ++u) {
      const double v1 = tail_prob(model, thr.t_v[u], h, Sensor::Y);
      total += v1 * p[1][1][u] + (1.0 - v1) * p[1][0][u];
    }
    (h == kH0 ? r.pf : r.pd) = total;
  }
  return r;
}

void check_yx(const YxThresholds& thr) {
  if (auto why = ordering_violation(thr)) throw OrderingViolation(*why);
}

void check_xyx(const XyxThresholds& thr) {
  if (auto why = ordering_violation(thr)) throw OrderingViolation(*why);
}

// ---------------------------------------------------------------------------
// Exact NP fusion for fixed first-stage rules: bisect log lambda so that
// pf = alpha. pf is continuous and nonincreasing in log lambda.

template <class Build, class Eval>
double fusion_log_lambda(double alpha, Build&& build, Eval&& eval) {
  auto excess = [&](double ll) { return eval(build(ll)).pf - alpha; };
  double lo = -1.0;
  double hi = 1.0;
  while (excess(lo) < 0.0 && lo > -kLogLambdaCap) lo *= 2.0;
  while (excess(hi) > 0.0 && hi < kLogLambdaCap) hi *= 2.0;
  return bisect_root(excess, lo, hi, 120);
}

struct YxCandidate {
  YxThresholds thr;
  Rates rates;
  double log_lambda = 0.0;
};

YxCandidate yx_np(const GaussianModel& model, Threshold t_v, double alpha) {
  auto build = [&](double ll) { return yx_fusion_thresholds(model, t_v, ll); };
  auto eval = [&](const YxThresholds& t) { return evaluate_yx(model, t); };
  const double ll = fusion_log_lambda(alpha, build, eval);
  YxCandidate c{build(ll), {}, ll};
  c.rates = eval(c.thr);
  return c;
}

struct XyxCandidate {
  XyxThresholds thr;
  Rates rates;
  double log_lambda = 0.0;
};

XyxCandidate xyx_np(const GaussianModel& model, Threshold t_u, std::array<Threshold, 2> t_v,
                    double alpha) {
  auto build = [&](double ll) { return xyx_fusion_thresholds(model, t_u, t_v, ll); };
  auto eval = [&](const XyxThresholds& t) { return rates_unchecked(model, t); };
  const double ll = fusion_log_lambda(alpha, build, eval);
  XyxCandidate c{build(ll), {}, ll};
  c.rates = eval(c.thr);
  return c;
}

std::vector<double> candidates(const GaussianModel& model, Sensor sensor,
                               const SearchConfig& search) {
  const double s = model.sigma(sensor);
  std::vector<double> grid =
      linspace(-search.span_sigmas * s, search.span_sigmas * s + 1.0, search.grid_points);
  if (search.include_infinite) {
    grid.insert(grid.begin(), -kInf);
    grid.push_back(kInf);
  }
  return grid;
}

double grid_step(const GaussianModel& model, Sensor sensor, const SearchConfig& search) {
  const double s = model.sigma(sensor);
  const double n = static_cast<double>(std::max<std::size_t>(search.grid_points, 2) - 1);
  return (2.0 * search.span_sigmas * s + 1.0) / n;
}

template <class F>
std::vector<double> scores(std::size_t n, bool parallel, F&& f) {
  return parallel ? grid_scores_parallel(n, f) : grid_scores_serial(n, f);
}

}  // namespace

const char* to_string(Architecture arch) { return arch == Architecture::YX ? "yx" : "xyx"; }

double checked_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    std::ostringstream os;
    os << "alpha must lie in (0, 1) (got " << alpha << ")";
    throw InvalidArgument(os.str());
  }
  return alpha;
}

// ---------------------------------------------------------------------------
// Evaluation.

Rates evaluate_yx(const GaussianModel& model, const YxThresholds& thr) {
  Rates r;
  for (Hypothesis h : {kH0, kH1}) {
    const double v1 = tail_prob(model, thr.t_v, h, Sensor::Y);
    const double total = v1 * tail_prob(model, thr.t_w[1], h, Sensor::X) +
                         (1.0 - v1) * tail_prob(model, thr.t_w[0], h, Sensor::X);
    (h == kH0 ? r.pf : r.pd) = total;
  }
  return r;
}

Rates evaluate_xyx(const GaussianModel& model, const XyxThresholds& thr) {
  check_xyx(thr);
  return rates_unchecked(model, thr);
}

double lagrangian(const Rates& r, double lambda, double alpha) {
  return r.pd + lambda * (alpha - r.pf);
}

// ---------------------------------------------------------------------------
// Fusion rules.

YxThresholds yx_fusion_thresholds(const GaussianModel& model, Threshold t_v, double log_lambda) {
  YxThresholds out;
  out.t_v = t_v;
  out.t_w[1] = lrt_threshold(model, log_lambda + log_tail_ratio(model, t_v, Sensor::Y), Sensor::X);
  out.t_w[0] = lrt_threshold(model, log_lambda + log_head_ratio(model, t_v, Sensor::Y), Sensor::X);
  return out;
}

XyxThresholds xyx_fusion_thresholds(const GaussianModel& model, Threshold t_u,
                                    std::array<Threshold, 2> t_v, double log_lambda) {
  XyxThresholds out;
  out.t_u = t_u;
  out.t_v = t_v;
  for (int u = 0; u < 2; ++u) {
    out.t_w[1][u] =
        lrt_threshold(model, log_lambda + log_tail_ratio(model, t_v[u], Sensor::Y), Sensor::X);
    out.t_w[0][u] =
        lrt_threshold(model, log_lambda + log_head_ratio(model, t_v[u], Sensor::Y), Sensor::X);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Threshold maps.

YxThresholds yx_threshold_map(const GaussianModel& model, double lambda, const YxThresholds& thr) {
  const double ll = log_of(lambda);
  YxThresholds g = thr;
  for (int v = 0; v < 2; ++v) {
    const double lo = v ? thr.t_v : -kInf;
    const double hi = v ? kInf : thr.t_v;
    g.t_w[v] = ratio_threshold(model, ll, log_interval_prob(model, lo, hi, kH0, Sensor::Y),
                               log_interval_prob(model, lo, hi, kH1, Sensor::Y), thr.t_w[v],
                               Sensor::X);
  }
  // v only matters on t_w[1] < x <= t_w[0].
  g.t_v = ratio_threshold(model, ll,
                          log_interval_prob(model, thr.t_w[1], thr.t_w[0], kH0, Sensor::X),
                          log_interval_prob(model, thr.t_w[1], thr.t_w[0], kH1, Sensor::X),
                          thr.t_v, Sensor::Y);
  return g;
}

XyxThresholds xyx_threshold_map(const GaussianModel& model, double lambda,
                                const XyxThresholds& thr) {
  const double ll = log_of(lambda);
  XyxThresholds g = thr;
  const auto& w = thr.t_w;
  for (int u = 0; u < 2; ++u) {
    for (int v = 0; v < 2; ++v) {
      const double lo = v ? thr.t_v[u] : -kInf;
      const double hi = v ? kInf : thr.t_v[u];
      g.t_w[v][u] = ratio_threshold(model, ll, log_interval_prob(model, lo, hi, kH0, Sensor::Y),
                                    log_interval_prob(model, lo, hi, kH1, Sensor::Y), w[v][u],
                                    Sensor::X);
    }
    // Band of x inside R_u on which the fusion decision depends on v.
    const double lo = u ? std::max(w[1][1], thr.t_u) : w[1][0];
    const double hi = u ? std::max(w[0][1], thr.t_u) : std::min(w[0][0], thr.t_u);
    g.t_v[u] = ratio_threshold(model, ll, log_interval_prob(model, lo, hi, kH0, Sensor::X),
                               log_interval_prob(model, lo, hi, kH1, Sensor::X), thr.t_v[u],
                               Sensor::Y);
  }
  // P_i(v = 1 | u = 1) - P_i(v = 1 | u = 0) = P_i(t_v[1] < y <= t_v[0]).
  g.t_u = ratio_threshold(model, ll,
                          log_interval_prob(model, thr.t_v[1], thr.t_v[0], kH0, Sensor::Y),
                          log_interval_prob(model, thr.t_v[1], thr.t_v[0], kH1, Sensor::Y),
                          thr.t_u, Sensor::X);
  return g;
}

double fixed_point_residual(const GaussianModel& model, double lambda, const YxThresholds& thr) {
  const YxThresholds g = yx_threshold_map(model, lambda, thr);
  return std::max({gap(g.t_v, thr.t_v), gap(g.t_w[0], thr.t_w[0]), gap(g.t_w[1], thr.t_w[1])});
}

double fixed_point_residual(const GaussianModel& model, double lambda, const XyxThresholds& thr) {
  const XyxThresholds g = xyx_threshold_map(model, lambda, thr);
  double r = gap(g.t_u, thr.t_u);
  for (int u = 0; u < 2; ++u) {
    r = std::max(r, gap(g.t_v[u], thr.t_v[u]));
    for (int v = 0; v < 2; ++v) r = std::max(r, gap(g.t_w[v][u], thr.t_w[v][u]));
  }
  return r;
}

IterResult<YxThresholds> iterate_yx_thresholds(const GaussianModel& model, double lambda,
                                               const YxThresholds& init, const IterConfig& iter) {
  check_yx(init);
  IterResult<YxThresholds> res{init, kInf, 0, false};
  YxThresholds& t = res.thresholds;
  for (res.steps = 0; res.steps < iter.max_steps; ++res.steps) {
    const YxThresholds g = yx_threshold_map(model, lambda, t);
    res.residual =
        std::max({gap(g.t_v, t.t_v), gap(g.t_w[0], t.t_w[0]), gap(g.t_w[1], t.t_w[1])});
    if (res.residual <= iter.tolerance) {
      res.converged = true;
      break;
    }
    t.t_v = damp(t.t_v, g.t_v, iter.damping);
    for (int v = 0; v < 2; ++v) t.t_w[v] = damp(t.t_w[v], g.t_w[v], iter.damping);
  }
  return res;
}

IterResult<XyxThresholds> iterate_xyx_thresholds(const GaussianModel& model, double lambda,
                                                 const XyxThresholds& init,
                                                 const IterConfig& iter) {
  check_xyx(init);
  IterResult<XyxThresholds> res{init, kInf, 0, false};
  XyxThresholds& t = res.thresholds;
  for (res.steps = 0; res.steps < iter.max_steps; ++res.steps) {
    const XyxThresholds g = xyx_threshold_map(model, lambda, t);
    double r = gap(g.t_u, t.t_u);
    for (int u = 0; u < 2; ++u) {
      r = std::max(r, gap(g.t_v[u], t.t_v[u]));
      for (int v = 0; v < 2; ++v) r = std::max(r, gap(g.t_w[v][u], t.t_w[v][u]));
    }
    res.residual = r;
    if (r <= iter.tolerance) {
      res.converged = !ordering_violation(t).has_value();
      break;
    }
    t.t_u = damp(t.t_u, g.t_u, iter.damping);
    for (int u = 0; u < 2; ++u) {
      t.t_v[u] = damp(t.t_v[u], g.t_v[u], iter.damping);
      for (int v = 0; v < 2; ++v) t.t_w[v][u] = damp(t.t_w[v][u], g.t_w[v][u], iter.damping);
    }
  }
  return res;
}

// ---------------------------------------------------------------------------
// Multiplier solve.

namespace {

template <class Table, class Iterate, class Eval>
LambdaSolution<Table> bisect_lambda(double alpha, const LambdaConfig& cfg,
                                    Iterate&& iterate, Eval&& eval) {
  checked_alpha(alpha);
  auto solve_at = [&](double lambda) {
    auto it = iterate(lambda);
    return LambdaSolution<Table>{lambda, it.thresholds, eval(it.thresholds), it.converged};
  };
  double lo = 0.0;
  double hi = cfg.lambda_max;
  LambdaSolution<Table> at_lo = solve_at(lo);
  LambdaSolution<Table> at_hi = solve_at(hi);
  if (at_lo.pf < alpha || at_hi.pf > alpha) {
    std::ostringstream os;
    os << "multiplier bisection: pf(0) = " << at_lo.pf << ", pf(" << hi << ") = " << at_hi.pf
       << " do not bracket alpha = " << alpha;
    throw InvalidArgument(os.str());
  }
  for (int i = 0; i < cfg.max_iter; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    LambdaSolution<Table> at_mid = solve_at(mid);
    if (at_mid.pf == alpha) return at_mid;
    if (at_mid.pf > alpha) {
      lo = mid;
      at_lo = std::move(at_mid);
    } else {
      hi = mid;
      at_hi = std::move(at_mid);
    }
  }
  return std::abs(at_lo.pf - alpha) <= std::abs(at_hi.pf - alpha) ? at_lo : at_hi;
}

}  // namespace

LambdaSolution<YxThresholds> solve_lambda_yx(const GaussianModel& model, double alpha,
                                             const YxThresholds& init, const IterConfig& iter,
                                             const LambdaConfig& cfg) {
  check_yx(init);
  return bisect_lambda<YxThresholds>(
      alpha, cfg,
      [&](double lambda) { return iterate_yx_thresholds(model, lambda, init, iter); },
      [&](const YxThresholds& t) { return evaluate_yx(model, t).pf; });
}

LambdaSolution<XyxThresholds> solve_lambda_xyx(const GaussianModel& model, double alpha,
                                               const XyxThresholds& init, const IterConfig& iter,
                                               const LambdaConfig& cfg) {
  check_xyx(init);
  return bisect_lambda<XyxThresholds>(
      alpha, cfg,
      [&](double lambda) { return iterate_xyx_thresholds(model, lambda, init, iter); },
      [&](const XyxThresholds& t) { return rates_unchecked(model, t).pf; });
}

double solve_lambda(const GaussianModel& model, Architecture arch, double alpha,
                    const SearchConfig& search, const IterConfig& iter) {
  if (arch == Architecture::YX) {
    return solve_lambda_yx(model, alpha, grid_optimize_yx(model, alpha, search).thresholds, iter)
        .lambda;
  }
  return solve_lambda_xyx(model, alpha, grid_optimize_xyx(model, alpha, search).thresholds, iter)
      .lambda;
}

// ---------------------------------------------------------------------------
// Grid path.

OptimizeResult<YxThresholds> grid_optimize_yx(const GaussianModel& model, double alpha,
                                              const SearchConfig& search) {
  checked_alpha(alpha);
  const std::vector<double> tv = candidates(model, Sensor::Y, search);
  const std::vector<double> pd = scores(tv.size(), search.parallel, [&](std::size_t i) {
    return yx_np(model, tv[i], alpha).rates.pd;
  });

  YxCandidate best = yx_np(model, tv[detail::reduce_scores(pd).index], alpha);
  const double step = grid_step(model, Sensor::Y, search);
  for (std::size_t start : top_indices(pd, search.refine_starts)) {
    double t_v = tv[start];
    YxCandidate cur;
    coordinate_ascent(
        {&t_v}, step, search.refine_sweeps, search.refine_tol,
        [&] {
          cur = yx_np(model, t_v, alpha);
          return cur.rates.pd;
        },
        [](std::size_t) { return -kInf; }, [](std::size_t) { return kInf; });
    if (cur.rates.pd > best.rates.pd) best = cur;
  }

  OptimizeResult<YxThresholds> out;
  out.thresholds = best.thr;
  out.point = {best.rates.pf, best.rates.pd, std::exp(best.log_lambda)};
  out.pd_grid = best.rates.pd;
  out.fixed_point_residual = fixed_point_residual(model, out.point.lambda, out.thresholds);
  return out;
}

OptimizeResult<XyxThresholds> grid_optimize_xyx(const GaussianModel& model, double alpha,
                                                const SearchConfig& search) {
  checked_alpha(alpha);
  const std::vector<double> tu = candidates(model, Sensor::X, search);
  const std::vector<double> tv = candidates(model, Sensor::Y, search);

  // (t_v[1], t_v[0]) pairs with t_v[1] <= t_v[0].
  std::vector<std::array<std::size_t, 2>> pairs;
  for (std::size_t a = 0; a < tv.size(); ++a) {
    for (std::size_t b = a; b < tv.size(); ++b) pairs.push_back({b, a});  // {t_v[0], t_v[1]}
  }
  const std::size_t n = tu.size() * pairs.size();
  auto outer = [&](std::size_t i) {
    const auto& pr = pairs[i % pairs.size()];
    return std::pair<Threshold, std::array<Threshold, 2>>{tu[i / pairs.size()],
                                                          {tv[pr[0]], tv[pr[1]]}};
  };
  const std::vector<double> pd = scores(n, search.parallel, [&](std::size_t i) {
    const auto [t_u, t_v] = outer(i);
    return xyx_np(model, t_u, t_v, alpha).rates.pd;
  });

  std::vector<std::pair<Threshold, std::array<Threshold, 2>>> starts;
  for (std::size_t i : top_indices(pd, search.refine_starts)) starts.push_back(outer(i));
  // The one-way optimum embedded as an XYX rule, so XYX never loses to YX.
  const YxThresholds yx = grid_optimize_yx(model, alpha, search).thresholds;
  starts.push_back({0.5, {yx.t_v, yx.t_v}});

  const auto [u0, v0] = starts.front();
  XyxCandidate best = xyx_np(model, u0, v0, alpha);
  const double step = std::max(grid_step(model, Sensor::X, search),
                               grid_step(model, Sensor::Y, search));
  for (auto [t_u, t_v] : starts) {
    XyxCandidate cur;
    coordinate_ascent(
        {&t_u, &t_v[0], &t_v[1]}, step, search.refine_sweeps, search.refine_tol,
        [&] {
          cur = xyx_np(model, t_u, t_v, alpha);
          return cur.rates.pd;
        },
        [&](std::size_t i) { return i == 1 ? t_v[1] : -kInf; },
        [&](std::size_t i) { return i == 2 ? t_v[0] : kInf; });
    if (cur.rates.pd > best.rates.pd) best = cur;
  }

  OptimizeResult<XyxThresholds> out;
  out.thresholds = best.thr;
  out.point = {best.rates.pf, best.rates.pd, std::exp(best.log_lambda)};
  out.pd_grid = best.rates.pd;
  out.fixed_point_residual = fixed_point_residual(model, out.point.lambda, out.thresholds);
  return out;
}

// ---------------------------------------------------------------------------
// Combined optimizers.

namespace {

template <class Table, class Solve, class Eval>
OptimizeResult<Table> polish(const GaussianModel& model, double alpha, OptimizeResult<Table> grid,
                             Solve&& solve, Eval&& eval) {
  LambdaSolution<Table> sol;
  try {
    sol = solve(grid.thresholds);
  } catch (const InvalidArgument&) {
    grid.status = "iteration-unbracketed";
    return grid;
  }
  const Rates r = eval(sol.thresholds);
  if (!sol.converged) {
    grid.status = "iteration-not-converged";
    return grid;
  }
  grid.pd_iteration = r.pd;
  if (std::abs(r.pf - alpha) > 1e-6 || r.pd < grid.pd_grid - kPdMatch) {
    grid.status = "iteration-suboptimal";
    return grid;
  }
  OptimizeResult<Table> out = grid;
  out.thresholds = sol.thresholds;
  out.point = {r.pf, r.pd, sol.lambda};
  out.iteration_converged = true;
  out.fixed_point_residual = fixed_point_residual(model, sol.lambda, sol.thresholds);
  out.status = "ok";
  return out;
}

}  // namespace

OptimizeResult<YxThresholds> optimize_yx(const GaussianModel& model, double alpha,
                                         const SearchConfig& search, const IterConfig& iter) {
  return polish(
      model, alpha, grid_optimize_yx(model, alpha, search),
      [&](const YxThresholds& init) { return solve_lambda_yx(model, alpha, init, iter); },
      [&](const YxThresholds& t) { return evaluate_yx(model, t); });
}

OptimizeResult<XyxThresholds> optimize_xyx(const GaussianModel& model, double alpha,
                                           const SearchConfig& search, const IterConfig& iter) {
  return polish(
      model, alpha, grid_optimize_xyx(model, alpha, search),
      [&](const XyxThresholds& init) { return solve_lambda_xyx(model, alpha, init, iter); },
      [&](const XyxThresholds& t) { return rates_unchecked(model, t); });
}

// ---------------------------------------------------------------------------
// Centralized and single-sensor references.

OperatingPoint centralized(const GaussianModel& model, double alpha) {
  checked_alpha(alpha);
  const double sx = model.sigma_x();
  const double sy = model.sigma_y();
  const double d = std::sqrt(1.0 / (sx * sx) + 1.0 / (sy * sy));
  const double z = q_inverse(alpha);
  // Statistic x/sx^2 + y/sy^2 ~ N(0, d^2) under H0, N(d^2, d^2) under H1;
  // its LLR is statistic - d^2/2.
  return {alpha, q_tail(z - d), std::exp(d * z - 0.5 * d * d)};
}

OperatingPoint centralized_by_quadrature(const GaussianModel& model, double alpha) {
  checked_alpha(alpha);
  const double sx = model.sigma_x();
  const double sy = model.sigma_y();
  auto tail = [&](double t, double mean) {
    return integrate(
        [&](double x) {
          const double arg = sy * t - sy * x / (sx * sx) - mean / sy;
          return q_tail(arg) * normal_pdf((x - mean) / sx) / sx;
        },
        -kInf, kInf, 1e-13);
  };
  const double d = std::sqrt(1.0 / (sx * sx) + 1.0 / (sy * sy));
  const double center = d * q_inverse(alpha);
  const double t = bisect_root([&](double tt) { return tail(tt, 0.0) - alpha; },
                               center - 10.0 * d, center + 10.0 * d, 200);
  return {tail(t, 0.0), tail(t, 1.0), std::exp(t - 0.5 * d * d)};
}

double single_sensor_pd(double sigma, double alpha) {
  checked_alpha(alpha);
  checked_sigma(sigma, "sigma");
  return q_tail(q_inverse(alpha) - 1.0 / sigma);
}

}  // namespace tandem
