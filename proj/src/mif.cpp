#include "tandem/mif.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tandem/asymptotic.hpp"
#include "tandem/numerics.hpp"

namespace tandem {

namespace {

int half_steps(int n_steps) { return (n_steps - 1) / 2; }

void check_steps(int n_steps) {
  if (n_steps < 3 || n_steps > kMifMaxSteps || n_steps % 2 == 0) {
    std::ostringstream os;
    os << "n_steps must be odd and in [3, " << kMifMaxSteps << "] (got " << n_steps << ")";
    throw InvalidArgument(os.str());
  }
}

// Outcome of obs > t for every obs in an interval whose lower end is `lo`.
bool above(Threshold t, double lo) { return t <= lo; }

double cell_lo(const MifDesign& d, std::size_t c) { return c == 0 ? -kInf : d.cuts[c - 1]; }
double cell_hi(const MifDesign& d, std::size_t c) { return c == d.cuts.size() ? kInf : d.cuts[c]; }

// Runs steps 1..N-1 for x in cell `c` and y in the interval with lower end `y_lo`.
int run_chain(const MifDesign& d, std::size_t c, double y_lo) {
  int b = d.x_steps[0].bits[0][c];
  for (int r = 0; r < half_steps(d.n_steps); ++r) {
    if (r > 0) b = d.x_steps[static_cast<std::size_t>(r)].bits[b][c];
    b = above(d.y_steps[static_cast<std::size_t>(r)][b], y_lo) ? 1 : 0;
  }
  return b;
}

std::vector<double> y_breaks(const MifDesign& d) {
  std::vector<double> br;
  for (const auto& s : d.y_steps) {
    for (double t : s) {
      if (std::isfinite(t)) br.push_back(t);
    }
  }
  std::sort(br.begin(), br.end());
  br.erase(std::unique(br.begin(), br.end()), br.end());
  return br;
}

double interval_prob(double lo, double hi, double mean, double sigma) {
  if (!(lo < hi)) return 0.0;
  return q_tail((lo - mean) / sigma) - q_tail((hi - mean) / sigma);
}

struct CellTable {
  std::vector<double> weight0;  // P0(x in c)
  std::array<std::vector<double>, 2> p0;  // P0(u = b | c), indexed [b][c]
  std::array<std::vector<double>, 2> p1;
};

// P_i(u = b | c) for both b, each summed over its own y pieces so that a
// probability near one never leaves a rounded-off complement.
std::array<std::vector<double>, 2> last_bit_split(const GaussianModel& model, const MifDesign& d,
                                                  Hypothesis hyp) {
  const std::vector<double> br = y_breaks(d);
  const double mu = mean_of(hyp);
  const double sy = model.sigma_y();
  std::array<std::vector<double>, 2> out{std::vector<double>(d.cells(), 0.0),
                                         std::vector<double>(d.cells(), 0.0)};
  for (std::size_t c = 0; c < d.cells(); ++c) {
    for (std::size_t k = 0; k <= br.size(); ++k) {
      const double lo = k == 0 ? -kInf : br[k - 1];
      const double hi = k == br.size() ? kInf : br[k];
      out[static_cast<std::size_t>(run_chain(d, c, lo))][c] += interval_prob(lo, hi, mu, sy);
    }
  }
  return out;
}

double plogp_ratio(double a, double b) {
  if (a == 0.0) return 0.0;
  if (b == 0.0) return kInf;
  return a * std::log(a / b);
}

// D(u | c) under the two hypotheses.
double cell_bit_kl(const CellTable& t, std::size_t c) {
  return plogp_ratio(t.p0[1][c], t.p1[1][c]) + plogp_ratio(t.p0[0][c], t.p1[0][c]);
}

CellTable cell_table(const GaussianModel& model, const MifDesign& d) {
  CellTable t;
  const double sx = model.sigma_x();
  const std::size_t n = d.cells();
  t.weight0.resize(n);
  for (std::size_t c = 0; c < n; ++c) t.weight0[c] = interval_prob(cell_lo(d, c), cell_hi(d, c), 0.0, sx);
  t.p0 = last_bit_split(model, d, Hypothesis::H0);
  t.p1 = last_bit_split(model, d, Hypothesis::H1);
  return t;
}

}  // namespace

void validate_mif_design(const MifDesign& d) {
  check_steps(d.n_steps);
  const auto h = static_cast<std::size_t>(half_steps(d.n_steps));
  if (d.x_steps.size() != h || d.y_steps.size() != h) {
    throw InvalidArgument("MIF design: expected (n_steps - 1) / 2 X and Y steps");
  }
  for (std::size_t i = 0; i < d.cuts.size(); ++i) {
    if (!std::isfinite(d.cuts[i]) || (i > 0 && !(d.cuts[i - 1] < d.cuts[i]))) {
      throw InvalidArgument("MIF design: cuts must be finite and strictly increasing");
    }
  }
  for (const auto& s : d.x_steps) {
    for (const auto& row : s.bits) {
      if (row.size() != d.cells()) throw InvalidArgument("MIF design: X pattern size != cells");
      for (auto bit : row) {
        if (bit > 1) throw InvalidArgument("MIF design: X pattern entries must be 0 or 1");
      }
    }
  }
  for (const auto& s : d.y_steps) {
    if (std::isnan(s[0]) || std::isnan(s[1])) throw InvalidArgument("MIF design: NaN threshold");
  }
}

MifDesign mif_design_from_thresholds(int n_steps,
                                     const std::vector<std::array<Threshold, 2>>& x_thresholds,
                                     const std::vector<std::array<Threshold, 2>>& y_thresholds,
                                     std::array<Threshold, 2> final_t) {
  check_steps(n_steps);
  const auto h = static_cast<std::size_t>(half_steps(n_steps));
  if (x_thresholds.size() != h || y_thresholds.size() != h) {
    throw InvalidArgument("MIF design: expected (n_steps - 1) / 2 rows of X and Y thresholds");
  }
  MifDesign d;
  d.n_steps = n_steps;
  d.y_steps = y_thresholds;
  d.final_t = final_t;
  for (std::size_t r = 0; r < h; ++r) {
    for (int b = 0; b < (r == 0 ? 1 : 2); ++b) {
      if (std::isfinite(x_thresholds[r][b])) d.cuts.push_back(x_thresholds[r][b]);
    }
  }
  std::sort(d.cuts.begin(), d.cuts.end());
  d.cuts.erase(std::unique(d.cuts.begin(), d.cuts.end()), d.cuts.end());
  for (std::size_t r = 0; r < h; ++r) {
    MifXStep step;
    for (int b = 0; b < 2; ++b) {
      const Threshold t = x_thresholds[r][r == 0 ? 0 : b];
      for (std::size_t c = 0; c < d.cells(); ++c) {
        step.bits[b].push_back(above(t, cell_lo(d, c)) ? 1 : 0);
      }
    }
    d.x_steps.push_back(std::move(step));
  }
  validate_mif_design(d);
  return d;
}

std::size_t mif_cell(const MifDesign& d, double x) {
  return static_cast<std::size_t>(std::lower_bound(d.cuts.begin(), d.cuts.end(), x) -
                                  d.cuts.begin());
}

int mif_last_bit(const MifDesign& d, double x, double y) {
  const std::size_t c = mif_cell(d, x);
  int b = d.x_steps[0].bits[0][c];
  for (int r = 0; r < half_steps(d.n_steps); ++r) {
    if (r > 0) b = d.x_steps[static_cast<std::size_t>(r)].bits[b][c];
    b = y > d.y_steps[static_cast<std::size_t>(r)][b] ? 1 : 0;
  }
  return b;
}

std::vector<double> mif_last_bit_probs(const GaussianModel& model, const MifDesign& d,
                                       Hypothesis hyp, int bit) {
  if (bit != 0 && bit != 1) throw InvalidArgument("MIF: bit must be 0 or 1");
  return last_bit_split(model, d, hyp)[static_cast<std::size_t>(bit)];
}

double mif_kl(const GaussianModel& model, const MifDesign& design) {
  validate_mif_design(design);
  const CellTable t = cell_table(model, design);
  const double sx = model.sigma_x();
  double total = 0.0;
  for (std::size_t c = 0; c < design.cells(); ++c) {
    const double bits = cell_bit_kl(t, c);
    if (std::isinf(bits)) {
      if (t.weight0[c] > 0.0) return kInf;
      continue;
    }
    total += integrate(
        [&](double x) {
          const double log_ratio = (1.0 - 2.0 * x) / (2.0 * sx * sx);  // log p0(x)/p1(x)
          return normal_pdf(x / sx) / sx * (log_ratio + bits);
        },
        cell_lo(design, c), cell_hi(design, c), 1e-12);
  }
  return total;
}

double mif_kl_analytic(const GaussianModel& model, const MifDesign& design) {
  const CellTable t = cell_table(model, design);
  double total = gaussian_kl(model.sigma_x());
  for (std::size_t c = 0; c < design.cells(); ++c) {
    if (t.weight0[c] > 0.0) total += t.weight0[c] * cell_bit_kl(t, c);
  }
  return total;
}

Rates mif_evaluate(const GaussianModel& model, const MifDesign& design) {
  validate_mif_design(design);
  const double sx = model.sigma_x();
  Rates r;
  for (Hypothesis h : {Hypothesis::H0, Hypothesis::H1}) {
    const std::vector<double> p = mif_last_bit_probs(model, design, h);
    const double mu = mean_of(h);
    double total = 0.0;
    for (std::size_t c = 0; c < design.cells(); ++c) {
      const double lo = cell_lo(design, c);
      const double hi = cell_hi(design, c);
      for (int b = 0; b < 2; ++b) {
        const double pb = b ? p[c] : 1.0 - p[c];
        total += pb * interval_prob(std::max(lo, design.final_t[b]), hi, mu, sx);
      }
    }
    (h == Hypothesis::H0 ? r.pf : r.pd) = total;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Search.

namespace {

struct Combo {
  std::vector<double> cuts;
  std::vector<MifXStep> x_steps;
};

std::vector<Combo> enumerate_combos(const GaussianModel& model, int n_steps,
                                    const MifSearchConfig& search) {
  std::vector<std::vector<double>> partitions{{}};
  const double sx = model.sigma_x();
  for (double c : linspace(-2.0 * sx, 2.0 * sx + 1.0, search.cut_positions)) partitions.push_back({c});

  const auto h = static_cast<std::size_t>(half_steps(n_steps));
  std::vector<Combo> out;
  for (const auto& cuts : partitions) {
    const std::size_t cells = cuts.size() + 1;
    const std::size_t first = std::size_t{1} << cells;
    const std::size_t later = search.freeze_x_steps ? 1 : std::size_t{1} << (2 * cells);
    std::size_t total = first;
    for (std::size_t r = 1; r < h; ++r) total *= later;
    for (std::size_t code = 0; code < total; ++code) {
      Combo combo{cuts, {}};
      std::size_t rest = code;
      for (std::size_t r = 0; r < h; ++r) {
        MifXStep step;
        const std::size_t base = r == 0 ? first : later;
        const std::size_t pattern = rest % base;
        rest /= base;
        for (int b = 0; b < 2; ++b) {
          for (std::size_t c = 0; c < cells; ++c) {
            std::uint8_t bit;
            if (r == 0) {
              bit = static_cast<std::uint8_t>((pattern >> c) & 1U);
            } else if (search.freeze_x_steps) {
              bit = static_cast<std::uint8_t>(b);  // pass u through
            } else {
              bit = static_cast<std::uint8_t>((pattern >> (static_cast<std::size_t>(b) * cells + c)) & 1U);
            }
            step.bits[b].push_back(bit);
          }
        }
        combo.x_steps.push_back(std::move(step));
      }
      out.push_back(std::move(combo));
    }
  }
  return out;
}

struct Candidate {
  double value = -kInf;
  std::vector<Threshold> y;  // flattened y_steps
};

MifDesign assemble(int n_steps, const Combo& combo, const std::vector<Threshold>& y) {
  MifDesign d;
  d.n_steps = n_steps;
  d.cuts = combo.cuts;
  d.x_steps = combo.x_steps;
  for (std::size_t r = 0; r < y.size() / 2; ++r) d.y_steps.push_back({y[2 * r], y[2 * r + 1]});
  return d;
}

// Discrete coordinate ascent on the Y grid from a few common starting values.
Candidate coarse_search(const GaussianModel& model, int n_steps, const Combo& combo,
                        const std::vector<double>& starts, const std::vector<double>& grid,
                        int sweeps) {
  const auto ny = static_cast<std::size_t>(n_steps - 1);
  Candidate best;
  for (double s : starts) {
    std::vector<Threshold> y(ny, s);
    MifDesign d = assemble(n_steps, combo, y);
    auto value = [&] {
      for (std::size_t r = 0; r < ny / 2; ++r) d.y_steps[r] = {y[2 * r], y[2 * r + 1]};
      return mif_kl_analytic(model, d);
    };
    double cur = value();
    for (int sweep = 0; sweep < sweeps; ++sweep) {
      bool moved = false;
      for (std::size_t i = 0; i < ny; ++i) {
        const double keep = y[i];
        double best_t = keep;
        for (double t : grid) {
          y[i] = t;
          const double v = value();
          if (v > cur) {
            cur = v;
            best_t = t;
            moved = true;
          }
        }
        y[i] = best_t;
      }
      if (!moved) break;
    }
    if (cur > best.value) best = {cur, y};
  }
  return best;
}

}  // namespace

MifMaxResult mif_kl_max(const GaussianModel& model, int n_steps, const MifSearchConfig& search) {
  check_steps(n_steps);
  const double sy = model.sigma_y();
  const std::vector<Combo> combos = enumerate_combos(model, n_steps, search);

  std::vector<double> grid = linspace(-3.0 * sy, 3.0 * sy + 1.0, search.y_grid_points);
  grid.insert(grid.begin(), -kInf);
  grid.push_back(kInf);
  std::vector<double> starts = linspace(-3.0 * sy, 3.0 * sy + 1.0, search.coarse_starts);
  // The step-ignoring design: every Y step uses the one-way optimal threshold.
  starts.push_back(maximize_kl_yx(model).t_star);

  std::vector<Candidate> coarse(combos.size());
  auto score = [&](std::size_t i) {
    coarse[i] = coarse_search(model, n_steps, combos[i], starts, grid, search.coarse_sweeps);
    return coarse[i].value;
  };
  const std::vector<double> values = search.parallel ? grid_scores_parallel(combos.size(), score)
                                                     : grid_scores_serial(combos.size(), score);

  MifMaxResult out;
  out.designs_searched = combos.size();
  const double step = grid[2] - grid[1];
  for (std::size_t i : top_indices(values, search.refine_starts)) {
    std::vector<Threshold> y = coarse[i].y;
    MifDesign d = assemble(n_steps, combos[i], y);
    std::vector<double*> coords;
    for (auto& t : y) coords.push_back(&t);
    const double v = coordinate_ascent(
        coords, step, search.refine_sweeps, search.refine_tol,
        [&] {
          for (std::size_t r = 0; r < y.size() / 2; ++r) d.y_steps[r] = {y[2 * r], y[2 * r + 1]};
          return mif_kl_analytic(model, d);
        },
        [](std::size_t) { return -kInf; }, [](std::size_t) { return kInf; });
    if (v > out.k_max) {
      out.k_max = v;
      out.design = d;
    }
  }
  return out;
}

}  // namespace tandem
