#include "tandem/asymptotic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tandem/numerics.hpp"

namespace tandem {

namespace {

constexpr std::size_t kYxGridPoints = 2001;
constexpr double kGoldenTol = 1e-8;
constexpr std::size_t kXyxGridU = 41;
constexpr std::size_t kXyxGridV = 81;

void check_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) {
    std::ostringstream os;
    os << what << " must lie in [0, 1] (got " << p << ")";
    throw InvalidArgument(os.str());
  }
}

// a log(a / b) with the 0 log 0 convention.
double xlogy_ratio(double a, double b) {
  if (a == 0.0) return 0.0;
  if (b == 0.0) return kInf;
  return a * std::log(a / b);
}

// Bit part f(Q(t/s), Q((t-1)/s)) of the one-way exponent.
double bit_kl(double sigma_y, Threshold t) {
  return bern_kl(q_tail(t / sigma_y), q_tail((t - 1.0) / sigma_y));
}

std::vector<double> y_grid(double sigma_y, std::size_t n) {
  return linspace(-3.0 * sigma_y, 3.0 * sigma_y + 1.0, n);
}

// Golden-section on [lo, hi], then the stationarity root near the result
// when it does at least as well.
double refine_bit_threshold(const GaussianModel& model, double lo, double hi) {
  const double sy = model.sigma_y();
  auto g = [&](double t) { return bit_kl(sy, t); };
  const Maximum m = golden_section_max(g, lo, hi, kGoldenTol);
  auto h = [&](double t) { return kl_yx_stationarity(model, t); };
  for (double w : {1e-6, 1e-4, 0.5 * (hi - lo)}) {
    const double a = std::max(lo, m.x - w);
    const double b = std::min(hi, m.x + w);
    const double ha = h(a);
    const double hb = h(b);
    if (!(std::isfinite(ha) && std::isfinite(hb)) || (ha < 0.0) == (hb < 0.0)) continue;
    const double root = bisect_root(h, a, b, 200);
    if (g(root) >= m.value - 1e-15) return root;
    break;
  }
  return m.x;
}

}  // namespace

double bern_kl(double alpha, double beta) {
  check_probability(alpha, "alpha");
  check_probability(beta, "beta");
  return xlogy_ratio(alpha, beta) + xlogy_ratio(1.0 - alpha, 1.0 - beta);
}

double gaussian_kl(double sigma) {
  checked_sigma(sigma, "sigma");
  return 0.5 / (sigma * sigma);
}

KlResult kl_yx(const GaussianModel& model, Threshold t) {
  KlResult r;
  r.k_x = gaussian_kl(model.sigma_x());
  r.t_star = t;
  r.alpha_star = tail_prob(model, t, Hypothesis::H0, Sensor::Y);
  r.beta_star = tail_prob(model, t, Hypothesis::H1, Sensor::Y);
  r.k_total = r.k_x + bern_kl(r.alpha_star, r.beta_star);
  return r;
}

double kl_yx_stationarity(const GaussianModel& model, Threshold t) {
  if (!std::isfinite(t)) return t;
  const double s = model.sigma_y();
  // alpha = Q(t/s), beta = Q((t-1)/s), all in logs.
  const double la = log_q_tail(t / s);
  const double l1a = log_q_tail(-t / s);
  const double lb = log_q_tail((t - 1.0) / s);
  const double l1b = log_q_tail((1.0 - t) / s);
  const double num = (lb - la) + (l1a - l1b);
  const double log_diff = log_interval_prob(model, t - 1.0, t, Hypothesis::H0, Sensor::Y);
  if (!(num > 0.0) || log_diff == -kInf) return kInf;
  const double log_lambda = std::log(num) - (log_diff - lb - l1b);
  return t - lrt_threshold(model, log_lambda, Sensor::Y);
}

std::vector<KlResult> kl_yx_local_maxima(const GaussianModel& model) {
  const double sy = model.sigma_y();
  const std::vector<double> grid = y_grid(sy, kYxGridPoints);
  std::vector<double> g(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) g[i] = bit_kl(sy, grid[i]);

  std::vector<KlResult> out;
  const std::size_t last = grid.size() - 1;
  for (std::size_t i = 0; i <= last; ++i) {
    const bool left_ok = i == 0 || g[i] > g[i - 1];
    const bool right_ok = i == last || g[i] >= g[i + 1];
    if (!(left_ok && right_ok)) continue;
    const double lo = grid[i == 0 ? 0 : i - 1];
    const double hi = grid[i == last ? last : i + 1];
    out.push_back(kl_yx(model, refine_bit_threshold(model, lo, hi)));
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const KlResult& a, const KlResult& b) { return a.k_total > b.k_total; });
  return out;
}

KlResult maximize_kl_yx(const GaussianModel& model) {
  return kl_yx_local_maxima(model).front();
}

XyxKlDesign make_xyx_kl_design(const GaussianModel& model, Threshold t_u,
                               std::array<Threshold, 2> t_v) {
  XyxKlDesign d;
  d.t_u = t_u;
  d.t_v = t_v;
  d.alpha1 = tail_prob(model, t_u, Hypothesis::H0, Sensor::X);
  for (int u = 0; u < 2; ++u) {
    d.alpha2[u] = tail_prob(model, t_v[u], Hypothesis::H0, Sensor::Y);
    d.beta2[u] = tail_prob(model, t_v[u], Hypothesis::H1, Sensor::Y);
  }
  return d;
}

double kl_xyx(const GaussianModel& model, const XyxKlDesign& design) {
  const XyxKlDesign ref = make_xyx_kl_design(model, design.t_u, design.t_v);
  auto off = [](double a, double b) { return !(std::abs(a - b) <= 1e-12); };
  if (off(ref.alpha1, design.alpha1) || off(ref.alpha2[0], design.alpha2[0]) ||
      off(ref.alpha2[1], design.alpha2[1]) || off(ref.beta2[0], design.beta2[0]) ||
      off(ref.beta2[1], design.beta2[1])) {
    throw InvalidArgument("kl_xyx: region probabilities do not match the design thresholds");
  }
  return gaussian_kl(model.sigma_x()) +
         design.alpha1 * bern_kl(design.alpha2[1], design.beta2[1]) +
         (1.0 - design.alpha1) * bern_kl(design.alpha2[0], design.beta2[0]);
}

XyxKlMax maximize_kl_xyx(const GaussianModel& model) {
  const double sx = model.sigma_x();
  const double sy = model.sigma_y();

  std::vector<double> tu = linspace(-3.0 * sx, 3.0 * sx + 1.0, kXyxGridU);
  tu.insert(tu.begin(), -kInf);
  tu.push_back(kInf);
  std::vector<double> tv = y_grid(sy, kXyxGridV);
  tv.insert(tv.begin(), -kInf);
  tv.push_back(kInf);

  std::vector<double> a1(tu.size());
  for (std::size_t i = 0; i < tu.size(); ++i) a1[i] = q_tail(tu[i] / sx);
  std::vector<double> f(tv.size());
  for (std::size_t j = 0; j < tv.size(); ++j) f[j] = bit_kl(sy, tv[j]);

  // Index order (t_u, t_v[0], t_v[1]) is the lexicographic tie-break.
  const std::size_t nv = tv.size();
  const GridBest best = grid_argmax_parallel(tu.size() * nv * nv, [&](std::size_t k) {
    const std::size_t i = k / (nv * nv);
    const std::size_t j0 = (k / nv) % nv;
    const std::size_t j1 = k % nv;
    return a1[i] * f[j1] + (1.0 - a1[i]) * f[j0];
  });
  const std::size_t i = best.index / (nv * nv);
  const std::size_t j[2] = {(best.index / nv) % nv, best.index % nv};

  // Each branch is a one-dimensional bit-KL problem; a branch with zero
  // weight (or an infinite grid winner) takes the global one-dimensional
  // optimum so the design stays well defined.
  const double global = maximize_kl_yx(model).t_star;
  std::array<Threshold, 2> t_v{};
  for (int u = 0; u < 2; ++u) {
    const std::size_t idx = j[u];
    if (idx == 0 || idx + 1 == nv) {
      t_v[u] = global;
      continue;
    }
    t_v[u] = refine_bit_threshold(model, tv[std::max<std::size_t>(idx - 1, 1)],
                                  tv[std::min(idx + 1, nv - 2)]);
  }

  XyxKlMax out;
  out.design = make_xyx_kl_design(model, tu[i], t_v);
  out.k_total = kl_xyx(model, out.design);
  return out;
}

std::array<double, 2> xyx_x_region_coefficients(const XyxKlDesign& design) {
  const double dp0 = design.alpha2[1] - design.alpha2[0];
  const double dp1 = design.beta2[1] - design.beta2[0];
  std::array<double, 2> c{};
  for (int u = 0; u < 2; ++u) {
    const double a = design.alpha2[u];
    const double b = design.beta2[u];
    if (dp0 == 0.0 && dp1 == 0.0) {
      c[u] = 0.0;
      continue;
    }
    const double log_term = std::log(b) - std::log(a) + std::log1p(-a) - std::log1p(-b);
    c[u] = -dp0 * log_term + dp1 * (b - a) / (b * (1.0 - b));
  }
  return c;
}

DirectionSwap kl_direction_swap(const GaussianModel& model) {
  return {maximize_kl_yx(model).k_total, maximize_kl_yx(model.swapped()).k_total};
}

}  // namespace tandem
