#include "tandem/commands.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <stdexcept>

#include "tandem/asymptotic.hpp"
#include "tandem/fixed_sample.hpp"
#include "tandem/mif.hpp"
#include "tandem/montecarlo.hpp"
#include "tandem/multisensor.hpp"

namespace tandem {

namespace {

class Csv {
 public:
  explicit Csv(std::initializer_list<const char*> header) {
    bool first = true;
    for (const char* h : header) {
      text_ += first ? "" : ",";
      text_ += h;
      first = false;
    }
    text_ += "\n";
  }

  Csv& cell(const std::string& s) {
    text_ += open_ ? "," : "";
    text_ += s;
    open_ = true;
    return *this;
  }
  Csv& cell(double v) { return cell(format_double(v)); }
  Csv& cell(long long v) { return cell(std::to_string(v)); }
  void end_row() {
    text_ += "\n";
    open_ = false;
  }
  const std::string& text() const { return text_; }

 private:
  std::string text_;
  bool open_ = false;
};

std::string join_status(const std::string& yx, const std::string& xyx) {
  if (yx == "ok" && xyx == "ok") return "ok";
  return "yx=" + yx + ";xyx=" + xyx;
}

// Fusion at X that adds the log-likelihood ratios of the received bits:
// w = [x > sigma_x^2 (sum_k log P0(v_k)/P1(v_k)) + 1/2].
std::vector<Threshold> fusion_by_code(const MultiSensorModel& m, const std::vector<Threshold>& t_v) {
  std::vector<Threshold> t_w(m.codes());
  for (std::size_t code = 0; code < m.codes(); ++code) {
    double log_ratio = 0.0;
    for (std::size_t k = 0; k < m.sensors(); ++k) {
      const GaussianModel pair = m.pair(k);
      log_ratio += ((code >> k) & 1U) ? log_tail_ratio(pair, t_v[k], Sensor::Y)
                                      : log_head_ratio(pair, t_v[k], Sensor::Y);
    }
    t_w[code] = lrt_threshold(m.pair(0), log_ratio, Sensor::X);
  }
  return t_w;
}

}  // namespace

CommandOutput cmd_fig3(const ExperimentConfig& config) {
  Csv csv({"sigma_x", "pd_yx", "pd_xyx", "pd_centralized", "pf_residual_yx", "pf_residual_xyx",
           "status"});
  for (double sx : config.sweep.values()) {
    const GaussianModel model(sx, config.sigma_y);
    const auto yx = optimize_yx(model, config.alpha, config.search, config.iter);
    const auto xyx = optimize_xyx(model, config.alpha, config.search, config.iter);
    const OperatingPoint cen = centralized(model, config.alpha);
    csv.cell(sx)
        .cell(yx.point.pd)
        .cell(xyx.point.pd)
        .cell(cen.pd)
        .cell(std::abs(yx.point.pf - config.alpha))
        .cell(std::abs(xyx.point.pf - config.alpha))
        .cell(join_status(yx.status, xyx.status))
        .end_row();
  }
  return {csv.text(), 0};
}

CommandOutput cmd_fig4(const ExperimentConfig& config) {
  Csv csv({"sigma_x", "k_yx", "k_xyx", "k_xy", "k_yxy"});
  for (double sx : config.sweep.values()) {
    const GaussianModel model(sx, config.sigma_y);
    const GaussianModel swapped = model.swapped();
    csv.cell(sx)
        .cell(maximize_kl_yx(model).k_total)
        .cell(maximize_kl_xyx(model).k_total)
        .cell(maximize_kl_yx(swapped).k_total)
        .cell(maximize_kl_xyx(swapped).k_total)
        .end_row();
  }
  return {csv.text(), 0};
}

CommandOutput cmd_validate(const ExperimentConfig& config) {
  Csv csv({"check_name", "analytic", "mc_value", "half_width", "pass"});
  bool all_pass = true;
  std::uint64_t seed = config.seed;
  auto check = [&](const std::string& name, double analytic, const McEstimate& mc) {
    const bool pass = mc.covers(analytic);
    all_pass = all_pass && pass;
    csv.cell(name).cell(analytic).cell(mc.value).cell(mc.half_width).cell(pass ? "true" : "false");
    csv.end_row();
  };
  auto rates = [&](const std::string& name, const Rates& analytic, const McRates& mc) {
    check(name + "_pf", analytic.pf, mc.pf);
    check(name + "_pd", analytic.pd, mc.pd);
  };

  const GaussianModel model(config.sigma_x, config.sigma_y);
  const std::uint64_t n = config.trials;

  const auto yx = optimize_yx(model, config.alpha, config.search, config.iter);
  rates("yx", evaluate_yx(model, yx.thresholds), simulate_fixed(model, yx.thresholds, n, seed++));
  const auto xyx = optimize_xyx(model, config.alpha, config.search, config.iter);
  rates("xyx", evaluate_xyx(model, xyx.thresholds),
        simulate_fixed(model, xyx.thresholds, n, seed++));

  const MultiSensorModel multi(config.sigma_x, config.sigma_ys);
  const MultiSensorKlMax kl_multi = multisensor_kl_max(multi);
  const VecYxThresholds vec{kl_multi.t_vecyx, fusion_by_code(multi, kl_multi.t_vecyx)};
  rates("vecyx", multisensor_evaluate(multi, vec), simulate_fixed(multi, vec, n, seed++));
  XVecYxThresholds xvec;
  xvec.t_u = 0.5;
  std::vector<Threshold> shifted(multi.sensors());
  for (std::size_t k = 0; k < multi.sensors(); ++k) {
    xvec.t_v.push_back({kl_multi.t_vecyx[k] + 0.25, kl_multi.t_vecyx[k] - 0.25});
  }
  for (int u = 0; u < 2; ++u) {
    for (std::size_t k = 0; k < multi.sensors(); ++k) shifted[k] = xvec.t_v[k][u];
    const std::vector<Threshold> t_w = fusion_by_code(multi, shifted);
    xvec.t_w.resize(multi.codes());
    for (std::size_t code = 0; code < multi.codes(); ++code) xvec.t_w[code][u] = t_w[code];
  }
  rates("xvecyx", multisensor_evaluate(multi, xvec), simulate_fixed(multi, xvec, n, seed++));

  const MifDesign mif = mif_design_from_thresholds(5, {{{0.5, 0.5}}, {{0.2, 0.9}}},
                                                   {{{0.1, 0.7}}, {{-0.4, 0.4}}}, {0.9, 0.1});
  rates("mif5", mif_evaluate(model, mif), simulate_fixed(model, mif, n, seed++));
  check("mif5_kl", mif_kl(model, mif), estimate_mif_kl(model, mif, n, seed++));

  const KlResult k_yx = maximize_kl_yx(model);
  check("exponent_yx", k_yx.k_total,
        estimate_exponent(model, k_yx.t_star, config.exponent_n, config.exponent_trials, seed++));
  const XyxKlMax k_xyx = maximize_kl_xyx(model);
  check("exponent_xyx", k_xyx.k_total,
        estimate_exponent(model, k_xyx.design.t_u, k_xyx.design.t_v, config.exponent_n,
                          config.exponent_trials, seed++));

  return {csv.text(), all_pass ? 0 : 1};
}

CommandOutput cmd_mif(const ExperimentConfig& config) {
  Csv csv({"n_steps", "k_mif_max", "k_yx_max", "gap"});
  const GaussianModel model(config.sigma_x, config.sigma_y);
  const double k_yx = maximize_kl_yx(model).k_total;
  for (int n : config.n_steps) {
    MifSearchConfig search;
    search.parallel = config.search.parallel;
    const double k = mif_kl_max(model, n, search).k_max;
    csv.cell(static_cast<long long>(n)).cell(k).cell(k_yx).cell(k - k_yx).end_row();
  }
  return {csv.text(), 0};
}

CommandOutput cmd_multisensor(const ExperimentConfig& config) {
  Csv csv({"k", "sigma_x", "sigma_ys", "k_vecyx", "k_xvecyx", "gap"});
  const MultiSensorModel model(config.sigma_x, config.sigma_ys);
  const MultiSensorKlMax r = multisensor_kl_max(model);
  std::string ys;
  for (std::size_t k = 0; k < config.sigma_ys.size(); ++k) {
    ys += (k ? ";" : "") + format_double(config.sigma_ys[k]);
  }
  csv.cell(static_cast<long long>(model.sensors()))
      .cell(config.sigma_x)
      .cell(ys)
      .cell(r.k_vecyx)
      .cell(r.k_xvecyx)
      .cell(r.k_xvecyx - r.k_vecyx)
      .end_row();
  return {csv.text(), 0};
}

CommandOutput cmd_eval(const ExperimentConfig& config) {
  Csv csv({"arch", "sigma_x", "sigma_y", "alpha", "pf", "pd", "lambda", "k_max"});
  const GaussianModel model(config.sigma_x, config.sigma_y);
  auto row = [&](const char* arch, const OperatingPoint& p, double k) {
    csv.cell(arch)
        .cell(config.sigma_x)
        .cell(config.sigma_y)
        .cell(config.alpha)
        .cell(p.pf)
        .cell(p.pd)
        .cell(p.lambda)
        .cell(k)
        .end_row();
  };
  row("yx", optimize_yx(model, config.alpha, config.search, config.iter).point,
      maximize_kl_yx(model).k_total);
  row("xyx", optimize_xyx(model, config.alpha, config.search, config.iter).point,
      maximize_kl_xyx(model).k_total);
  row("centralized", centralized(model, config.alpha),
      gaussian_kl(config.sigma_x) + gaussian_kl(config.sigma_y));
  return {csv.text(), 0};
}

CommandOutput run_command(const ExperimentConfig& config) {
  config.validate();
  switch (config.command) {
    case Command::Fig3:
      return cmd_fig3(config);
    case Command::Fig4:
      return cmd_fig4(config);
    case Command::Validate:
      return cmd_validate(config);
    case Command::Mif:
      return cmd_mif(config);
    case Command::Multisensor:
      return cmd_multisensor(config);
    case Command::Eval:
      return cmd_eval(config);
  }
  throw InvalidArgument("unknown command");
}

void write_output(const ExperimentConfig& config, const std::string& text) {
  if (config.out.empty()) {
    std::cout << text << std::flush;
    return;
  }
  std::ofstream out(config.out, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file '" + config.out + "'");
  out << text;
  out.flush();
  if (!out) throw std::runtime_error("failed writing output file '" + config.out + "'");
}

}  // namespace tandem
