#include "tandem/montecarlo.hpp"

#include <cmath>
#include <vector>

namespace tandem {

namespace {

std::uint32_t lo32(std::uint64_t v) { return static_cast<std::uint32_t>(v); }
std::uint32_t hi32(std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); }

std::uint64_t block_count(std::uint64_t trials) { return (trials + kMcBlock - 1) / kMcBlock; }

template <class F>
void for_each_block(std::uint64_t blocks, Execution exec, F&& f) {
  const auto n = static_cast<std::int64_t>(blocks);
  if (exec == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t b = 0; b < n; ++b) f(static_cast<std::uint64_t>(b));
  } else {
    for (std::int64_t b = 0; b < n; ++b) f(static_cast<std::uint64_t>(b));
  }
}

// Number of trials whose `decide(stream, mean)` returns true.
template <class Decide>
std::uint64_t count_decisions(std::uint64_t trials, std::uint64_t seed, McStreamId id,
                              Execution exec, Decide&& decide) {
  const std::uint64_t blocks = block_count(trials);
  const double mean = id == McStreamId::H1 ? 1.0 : 0.0;
  std::vector<std::uint64_t> counts(blocks, 0);
  for_each_block(blocks, exec, [&](std::uint64_t b) {
    McStream rng(seed, id, b);
    const std::uint64_t end = std::min(trials, (b + 1) * kMcBlock);
    std::uint64_t c = 0;
    for (std::uint64_t i = b * kMcBlock; i < end; ++i) c += decide(rng, mean) ? 1 : 0;
    counts[b] = c;
  });
  std::uint64_t total = 0;
  for (std::uint64_t c : counts) total += c;
  return total;
}

McEstimate rate_estimate(std::uint64_t count, std::uint64_t trials, std::uint64_t seed) {
  const double v = static_cast<double>(count) / static_cast<double>(trials);
  return {v, trials, seed, 3.0 * std::sqrt(v * (1.0 - v) / static_cast<double>(trials))};
}

template <class Decide>
McRates simulate_rates(std::uint64_t trials, std::uint64_t seed, Execution exec, Decide&& decide) {
  if (trials == 0) throw InvalidArgument("trials must be at least 1");
  return {rate_estimate(count_decisions(trials, seed, McStreamId::H0, exec, decide), trials, seed),
          rate_estimate(count_decisions(trials, seed, McStreamId::H1, exec, decide), trials, seed)};
}

// Per-trial values filled block by block, then a serial two-pass mean and
// variance in trial order.
template <class Trial>
McEstimate mean_estimate(std::uint64_t trials, std::uint64_t seed, McStreamId id, Execution exec,
                         Trial&& trial) {
  if (trials == 0) throw InvalidArgument("trials must be at least 1");
  std::vector<double> values(trials);
  for_each_block(block_count(trials), exec, [&](std::uint64_t b) {
    McStream rng(seed, id, b);
    const std::uint64_t end = std::min(trials, (b + 1) * kMcBlock);
    for (std::uint64_t i = b * kMcBlock; i < end; ++i) values[i] = trial(rng);
  });
  double sum = 0.0;
  for (double v : values) sum += v;
  const double n = static_cast<double>(trials);
  const double mean = sum / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = trials > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  return {mean, trials, seed, 3.0 * sd / std::sqrt(n)};
}

double log_bit_ratio(const GaussianModel& model, Threshold t, bool bit) {
  return bit ? log_tail_ratio(model, t, Sensor::Y) : log_head_ratio(model, t, Sensor::Y);
}

}  // namespace

McStream::McStream(std::uint64_t seed, McStreamId stream, std::uint64_t block) {
  std::seed_seq seq{lo32(seed), hi32(seed), static_cast<std::uint32_t>(stream), lo32(block),
                    hi32(block)};
  engine_.seed(seq);
}

double McStream::uniform() {
  constexpr double kScale = 1.0 / 9007199254740992.0;  // 2^-53
  return (static_cast<double>(engine_() >> 11) + 0.5) * kScale;
}

double McStream::normal() { return q_inverse(uniform()); }

bool McEstimate::covers(double reference) const {
  return std::abs(value - reference) <= half_width;
}

McRates simulate_fixed(const GaussianModel& model, const YxThresholds& thr, std::uint64_t trials,
                       std::uint64_t seed, Execution exec) {
  const double sx = model.sigma_x();
  const double sy = model.sigma_y();
  return simulate_rates(trials, seed, exec, [&](McStream& rng, double mean) {
    const double x = mean + sx * rng.normal();
    const double y = mean + sy * rng.normal();
    const int v = y > thr.t_v ? 1 : 0;
    return x > thr.t_w[v];
  });
}

McRates simulate_fixed(const GaussianModel& model, const XyxThresholds& thr, std::uint64_t trials,
                       std::uint64_t seed, Execution exec) {
  const double sx = model.sigma_x();
  const double sy = model.sigma_y();
  return simulate_rates(trials, seed, exec, [&](McStream& rng, double mean) {
    const double x = mean + sx * rng.normal();
    const double y = mean + sy * rng.normal();
    const int u = x > thr.t_u ? 1 : 0;
    const int v = y > thr.t_v[u] ? 1 : 0;
    return x > thr.t_w[v][u];
  });
}

McRates simulate_fixed(const MultiSensorModel& model, const VecYxThresholds& thr,
                       std::uint64_t trials, std::uint64_t seed, Execution exec) {
  multisensor_evaluate(model, thr);  // shape check
  return simulate_rates(trials, seed, exec, [&](McStream& rng, double mean) {
    const double x = mean + model.sigma_x() * rng.normal();
    std::vector<double> y(model.sensors());
    for (std::size_t k = 0; k < y.size(); ++k) y[k] = mean + model.sigma_ys()[k] * rng.normal();
    return x > thr.t_w[vec_code(thr.t_v, y)];
  });
}

McRates simulate_fixed(const MultiSensorModel& model, const XVecYxThresholds& thr,
                       std::uint64_t trials, std::uint64_t seed, Execution exec) {
  multisensor_evaluate(model, thr);
  return simulate_rates(trials, seed, exec, [&](McStream& rng, double mean) {
    const double x = mean + model.sigma_x() * rng.normal();
    const int u = x > thr.t_u ? 1 : 0;
    unsigned code = 0;
    for (std::size_t k = 0; k < model.sensors(); ++k) {
      const double y = mean + model.sigma_ys()[k] * rng.normal();
      if (y > thr.t_v[k][u]) code |= 1U << k;
    }
    return x > thr.t_w[code][u];
  });
}

McRates simulate_fixed(const GaussianModel& model, const MifDesign& design, std::uint64_t trials,
                       std::uint64_t seed, Execution exec) {
  validate_mif_design(design);
  const double sx = model.sigma_x();
  const double sy = model.sigma_y();
  return simulate_rates(trials, seed, exec, [&](McStream& rng, double mean) {
    const double x = mean + sx * rng.normal();
    const double y = mean + sy * rng.normal();
    return x > design.final_t[mif_last_bit(design, x, y)];
  });
}

McEstimate estimate_exponent(const GaussianModel& model, Threshold t_v, std::uint64_t n,
                             std::uint64_t trials, std::uint64_t seed, Execution exec) {
  return estimate_exponent(model, 0.5, {t_v, t_v}, n, trials, seed, exec);
}

McEstimate estimate_exponent(const GaussianModel& model, Threshold t_u,
                             std::array<Threshold, 2> t_v, std::uint64_t n, std::uint64_t trials,
                             std::uint64_t seed, Execution exec) {
  if (n == 0) throw InvalidArgument("n must be at least 1");
  const double sx = model.sigma_x();
  const double sy = model.sigma_y();
  return mean_estimate(trials, seed, McStreamId::Exponent, exec, [&](McStream& rng) {
    double total = 0.0;
    for (std::uint64_t j = 0; j < n; ++j) {
      const double x = sx * rng.normal();
      const double y = sy * rng.normal();
      const int u = x > t_u ? 1 : 0;
      const bool v = y > t_v[u];
      total += -llr(model, x, Sensor::X) + log_bit_ratio(model, t_v[u], v);
    }
    return total / static_cast<double>(n);
  });
}

McEstimate estimate_mif_kl(const GaussianModel& model, const MifDesign& design,
                           std::uint64_t trials, std::uint64_t seed, Execution exec) {
  validate_mif_design(design);
  const std::array<std::vector<double>, 2> p0{mif_last_bit_probs(model, design, Hypothesis::H0, 0),
                                              mif_last_bit_probs(model, design, Hypothesis::H0, 1)};
  const std::array<std::vector<double>, 2> p1{mif_last_bit_probs(model, design, Hypothesis::H1, 0),
                                              mif_last_bit_probs(model, design, Hypothesis::H1, 1)};
  const double sx = model.sigma_x();
  const double sy = model.sigma_y();
  return mean_estimate(trials, seed, McStreamId::MifKl, exec, [&](McStream& rng) {
    const double x = sx * rng.normal();
    const double y = sy * rng.normal();
    const std::size_t c = mif_cell(design, x);
    const auto u = static_cast<std::size_t>(mif_last_bit(design, x, y));
    const double a = p0[u][c];
    const double b = p1[u][c];
    return -llr(model, x, Sensor::X) + std::log(a / b);
  });
}

}  // namespace tandem
