#include "tandem/multisensor.hpp"

#include <cmath>
#include <sstream>

#include "tandem/asymptotic.hpp"
#include "tandem/numerics.hpp"

namespace tandem {

namespace {

void check_size(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    std::ostringstream os;
    os << what << ": expected " << want << " entries, got " << got;
    throw InvalidArgument(os.str());
  }
}

// P_i(code) for independent bits with P_i(v_k = 1) = p[k].
double code_prob(const std::vector<double>& p, std::size_t code) {
  double prob = 1.0;
  for (std::size_t k = 0; k < p.size(); ++k) prob *= ((code >> k) & 1U) ? p[k] : 1.0 - p[k];
  return prob;
}

// p0 log(p0 / p1) with 0 log 0 = 0.
double kl_term(double p0, double p1) {
  if (p0 == 0.0) return 0.0;
  if (p1 == 0.0) return kInf;
  return p0 * std::log(p0 / p1);
}

double code_kl(const std::vector<double>& a, const std::vector<double>& b, std::size_t codes) {
  double total = 0.0;
  for (std::size_t code = 0; code < codes; ++code) total += kl_term(code_prob(a, code), code_prob(b, code));
  return total;
}

std::vector<double> bit_probs(const MultiSensorModel& model, const std::vector<Threshold>& t,
                              Hypothesis h) {
  std::vector<double> p(t.size());
  const double mu = mean_of(h);
  for (std::size_t k = 0; k < t.size(); ++k) p[k] = q_tail((t[k] - mu) / model.sigma_ys()[k]);
  return p;
}

}  // namespace

MultiSensorModel::MultiSensorModel(double sigma_x, std::vector<double> sigma_ys)
    : sigma_x_(checked_sigma(sigma_x, "sigma_x")), sigma_ys_(std::move(sigma_ys)) {
  if (sigma_ys_.empty() || sigma_ys_.size() > kMaxPeripheralSensors) {
    std::ostringstream os;
    os << "number of peripheral sensors must be in [1, " << kMaxPeripheralSensors << "] (got "
       << sigma_ys_.size() << ")";
    throw InvalidArgument(os.str());
  }
  for (double s : sigma_ys_) checked_sigma(s, "sigma_y");
}

MultiSensorModel::MultiSensorModel(const GaussianModel& model)
    : MultiSensorModel(model.sigma_x(), {model.sigma_y()}) {}

Rates multisensor_evaluate(const MultiSensorModel& model, const VecYxThresholds& thr) {
  check_size(thr.t_v.size(), model.sensors(), "t_v");
  check_size(thr.t_w.size(), model.codes(), "t_w");
  const double sx = model.sigma_x();
  Rates r;
  for (Hypothesis h : {Hypothesis::H0, Hypothesis::H1}) {
    const std::vector<double> p = bit_probs(model, thr.t_v, h);
    const double mu = mean_of(h);
    double total = 0.0;
    // Highest code first, matching the v = 1, v = 0 order of the one-sensor case.
    for (std::size_t code = model.codes(); code-- > 0;) {
      total += code_prob(p, code) * q_tail((thr.t_w[code] - mu) / sx);
    }
    (h == Hypothesis::H0 ? r.pf : r.pd) = total;
  }
  return r;
}

Rates multisensor_evaluate(const MultiSensorModel& model, const XVecYxThresholds& thr) {
  check_size(thr.t_v.size(), model.sensors(), "t_v");
  check_size(thr.t_w.size(), model.codes(), "t_w");
  const double sx = model.sigma_x();
  Rates r;
  for (Hypothesis h : {Hypothesis::H0, Hypothesis::H1}) {
    const double mu = mean_of(h);
    auto q = [&](double t) { return q_tail((t - mu) / sx); };
    double total = 0.0;
    for (int u = 0; u < 2; ++u) {
      std::vector<Threshold> t(model.sensors());
      for (std::size_t k = 0; k < t.size(); ++k) t[k] = thr.t_v[k][u];
      const std::vector<double> p = bit_probs(model, t, h);
      double inner = 0.0;
      for (std::size_t code = model.codes(); code-- > 0;) {
        const double tw = thr.t_w[code][u];
        // P_i(w = 1, x in R_u | code), as in the two-sensor joint table.
        const double region = u ? q(std::max(tw, thr.t_u)) : q(tw) - q(std::max(tw, thr.t_u));
        inner += code_prob(p, code) * region;
      }
      total += inner;
    }
    (h == Hypothesis::H0 ? r.pf : r.pd) = total;
  }
  return r;
}

unsigned vec_code(const std::vector<Threshold>& t_v, const std::vector<double>& y) {
  unsigned code = 0;
  for (std::size_t k = 0; k < t_v.size(); ++k) {
    if (y[k] > t_v[k]) code |= 1U << k;
  }
  return code;
}

double multisensor_kl(const MultiSensorModel& model, const std::vector<Threshold>& t_v) {
  check_size(t_v.size(), model.sensors(), "t_v");
  return gaussian_kl(model.sigma_x()) +
         code_kl(bit_probs(model, t_v, Hypothesis::H0), bit_probs(model, t_v, Hypothesis::H1),
                 model.codes());
}

double multisensor_kl(const MultiSensorModel& model, Threshold t_u,
                      const std::vector<std::array<Threshold, 2>>& t_v) {
  check_size(t_v.size(), model.sensors(), "t_v");
  const double a1 = q_tail(t_u / model.sigma_x());
  double total = gaussian_kl(model.sigma_x());
  // u = 1 first, matching the two-sensor summation order.
  for (int u = 1; u >= 0; --u) {
    const double w = u ? a1 : 1.0 - a1;
    if (w == 0.0) continue;
    std::vector<Threshold> t(model.sensors());
    for (std::size_t k = 0; k < t.size(); ++k) t[k] = t_v[k][u];
    total += w * code_kl(bit_probs(model, t, Hypothesis::H0), bit_probs(model, t, Hypothesis::H1),
                         model.codes());
  }
  return total;
}

MultiSensorKlMax multisensor_kl_max(const MultiSensorModel& model) {
  MultiSensorKlMax out;
  const std::size_t n = model.sensors();

  out.k_vecyx = gaussian_kl(model.sigma_x());
  for (std::size_t k = 0; k < n; ++k) {
    const KlResult best = maximize_kl_yx(model.pair(k));
    out.t_vecyx.push_back(best.t_star);
    out.k_vecyx += best.k_total - best.k_x;
  }

  // Joint grid over (t_u, t_v[0][0], t_v[0][1], t_v[1][0], ...).
  const double sx = model.sigma_x();
  std::vector<double> tu = linspace(-2.0 * sx, 2.0 * sx + 1.0, 9);
  tu.insert(tu.begin(), -kInf);
  tu.push_back(kInf);
  const std::size_t g = n == 1 ? 41 : (n == 2 ? 17 : 7);
  std::vector<std::vector<double>> tv(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double s = model.sigma_ys()[k];
    tv[k] = linspace(-3.0 * s, 3.0 * s + 1.0, g);
  }
  const std::size_t dims = 2 * n;
  std::size_t per_u = 1;
  for (std::size_t d = 0; d < dims; ++d) per_u *= g;

  auto decode = [&](std::size_t idx, Threshold& t_u, std::vector<std::array<Threshold, 2>>& t_v) {
    t_u = tu[idx / per_u];
    std::size_t rest = idx % per_u;
    t_v.assign(n, {0.0, 0.0});
    for (std::size_t d = dims; d-- > 0;) {
      t_v[d / 2][d % 2] = tv[d / 2][rest % g];
      rest /= g;
    }
  };
  const std::vector<double> scores = grid_scores_parallel(tu.size() * per_u, [&](std::size_t idx) {
    Threshold t_u;
    std::vector<std::array<Threshold, 2>> t_v;
    decode(idx, t_u, t_v);
    return multisensor_kl(model, t_u, t_v);
  });

  const double step = 7.0 * *std::max_element(model.sigma_ys().begin(), model.sigma_ys().end()) /
                      static_cast<double>(g - 1);
  out.k_xvecyx = -kInf;
  for (std::size_t idx : top_indices(scores, 4)) {
    Threshold t_u;
    std::vector<std::array<Threshold, 2>> t_v;
    decode(idx, t_u, t_v);
    std::vector<double*> coords{&t_u};
    for (auto& row : t_v) {
      coords.push_back(&row[0]);
      coords.push_back(&row[1]);
    }
    const double v = coordinate_ascent(
        coords, step, 60, 1e-10, [&] { return multisensor_kl(model, t_u, t_v); },
        [](std::size_t) { return -kInf; }, [](std::size_t) { return kInf; });
    if (v > out.k_xvecyx) {
      out.k_xvecyx = v;
      out.t_u = t_u;
      out.t_xvecyx = t_v;
    }
  }
  return out;
}

}  // namespace tandem
