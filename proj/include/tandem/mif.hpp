#pragma once

// Multi-step memoryless interactive fusion (MIF): the schedule
// x, y, x, ..., y, x of odd length N. Step k emits bit u_k from its own
// observation and u_{k-1} only; the last step is the decision at X.
//
// Every X rule is described on a fixed partition of the x-line into cells
// (cuts c_0 < c_1 < ...; cell j is (c_{j-1}, c_j]) by one output bit per
// (input bit, cell). Y rules are thresholds indexed by the input bit. Given
// the cell of x, u_{N-1} is a deterministic function of y that is constant
// between consecutive Y thresholds, so all region probabilities are finite
// sums of Gaussian interval probabilities.

#include <array>
#include <cstdint>
#include <vector>

#include "tandem/fixed_sample.hpp"
#include "tandem/gaussian_model.hpp"

namespace tandem {

inline constexpr int kMifMaxSteps = 7;

struct MifXStep {
  std::array<std::vector<std::uint8_t>, 2> bits;  ///< [input bit][cell]; step 1 reads [0]
};

struct MifDesign {
  int n_steps = 3;
  std::vector<double> cuts;                        ///< strictly increasing, finite
  std::vector<MifXStep> x_steps;                   ///< steps 1, 3, ..., N-2
  std::vector<std::array<Threshold, 2>> y_steps;   ///< steps 2, 4, ..., N-1, by input bit
  std::array<Threshold, 2> final_t{0.5, 0.5};      ///< step N: w = [x > final_t[u_{N-1}]]

  std::size_t cells() const { return cuts.size() + 1; }
};

/// Builds a design whose X steps are thresholds u_k = [x > t[u_{k-1}]]; the
/// cuts are the distinct finite thresholds. `x_thresholds` has (N-1)/2 rows
/// (row 0 is step 1 and uses entry 0), `y_thresholds` has (N-1)/2 rows.
MifDesign mif_design_from_thresholds(int n_steps,
                                     const std::vector<std::array<Threshold, 2>>& x_thresholds,
                                     const std::vector<std::array<Threshold, 2>>& y_thresholds,
                                     std::array<Threshold, 2> final_t = {0.5, 0.5});

/// Throws InvalidArgument for N even, N < 3, N > 7 or inconsistent shapes.
void validate_mif_design(const MifDesign& design);

/// Cell index of x.
std::size_t mif_cell(const MifDesign& design, double x);

/// u_{N-1} for observations (x, y), by running the bit exchange literally.
int mif_last_bit(const MifDesign& design, double x, double y);

/// P_i(u_{N-1} = bit | x in cell c) for every cell. Each bit value is summed
/// over its own y pieces, so neither is a rounded complement of the other.
std::vector<double> mif_last_bit_probs(const GaussianModel& model, const MifDesign& design,
                                       Hypothesis hyp, int bit = 1);

/// K[x, u_{N-1}] = D(p0(x, u_{N-1}) || p1(x, u_{N-1})) by adaptive
/// Gauss-Kronrod over each cell of the full integrand.
double mif_kl(const GaussianModel& model, const MifDesign& design);

/// Same quantity in closed form: K[x] + sum_c P0(c) f(P0(u=1|c), P1(u=1|c)).
double mif_kl_analytic(const GaussianModel& model, const MifDesign& design);

/// (pf, pd) of the final decision with thresholds final_t.
Rates mif_evaluate(const GaussianModel& model, const MifDesign& design);

struct MifSearchConfig {
  std::size_t cut_positions = 5;    ///< single-cut partitions tried, over [-2 sigma_x, 2 sigma_x + 1]
  std::size_t y_grid_points = 17;   ///< per-coordinate grid of the coarse stage
  std::size_t coarse_starts = 5;    ///< common starting value for all Y thresholds
  int coarse_sweeps = 4;
  std::size_t refine_starts = 8;    ///< best coarse designs refined by golden-section
  int refine_sweeps = 40;
  double refine_tol = 1e-10;
  bool freeze_x_steps = false;      ///< intermediate X steps pass the bit through
  bool parallel = true;
};

struct MifMaxResult {
  double k_max = 0.0;
  MifDesign design;
  std::size_t designs_searched = 0;  ///< (partition, pattern) combinations
};

/// Structured search over X patterns and Y thresholds. Throws InvalidArgument
/// for n_steps outside {3, 5, 7}.
MifMaxResult mif_kl_max(const GaussianModel& model, int n_steps, const MifSearchConfig& search = {});

}  // namespace tandem
