#pragma once

// Monte-Carlo simulation of the literal bit-exchange processes.
//
// Randomness is addressed by (seed, stream, block): trials are cut into
// blocks of kMcBlock, and every block owns a generator seeded from that
// triple. Serial and OpenMP runners therefore draw identical numbers and,
// because per-block partial results are combined in block order, return
// bit-identical estimates.

#include <array>
#include <cstdint>
#include <random>

#include "tandem/fixed_sample.hpp"
#include "tandem/gaussian_model.hpp"
#include "tandem/mif.hpp"
#include "tandem/multisensor.hpp"

namespace tandem {

inline constexpr std::uint64_t kMcBlock = std::uint64_t{1} << 16;

/// Stream ids; H0 and H1 rates are simulated from independent streams.
enum class McStreamId : std::uint32_t { H0 = 0, H1 = 1, Exponent = 2, MifKl = 3 };

enum class Execution { Serial, Parallel };

/// Generator for one block.
class McStream {
 public:
  McStream(std::uint64_t seed, McStreamId stream, std::uint64_t block);

  /// Uniform on (0, 1), 53-bit resolution, never 0 or 1.
  double uniform();
  /// Standard normal by inversion through q_inverse.
  double normal();

 private:
  std::mt19937_64 engine_;
};

struct McEstimate {
  double value = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  double half_width = 0.0;  ///< 3 sigma: binomial for rates, CLT for means

  /// |value - reference| <= half_width.
  bool covers(double reference) const;
};

struct McRates {
  McEstimate pf;
  McEstimate pd;
};

McRates simulate_fixed(const GaussianModel& model, const YxThresholds& thr, std::uint64_t trials,
                       std::uint64_t seed, Execution exec = Execution::Parallel);
McRates simulate_fixed(const GaussianModel& model, const XyxThresholds& thr, std::uint64_t trials,
                       std::uint64_t seed, Execution exec = Execution::Parallel);
McRates simulate_fixed(const MultiSensorModel& model, const VecYxThresholds& thr,
                       std::uint64_t trials, std::uint64_t seed,
                       Execution exec = Execution::Parallel);
McRates simulate_fixed(const MultiSensorModel& model, const XVecYxThresholds& thr,
                       std::uint64_t trials, std::uint64_t seed,
                       Execution exec = Execution::Parallel);
McRates simulate_fixed(const GaussianModel& model, const MifDesign& design, std::uint64_t trials,
                       std::uint64_t seed, Execution exec = Execution::Parallel);

/// Mean over trials of (1/n) sum_j log p0(x_j, v_j) / p1(x_j, v_j) for n
/// i.i.d. H0 samples of the one-way process v = [y > t_v], using the
/// analytic per-sample densities. Samples of a trial are drawn x then y.
McEstimate estimate_exponent(const GaussianModel& model, Threshold t_v, std::uint64_t n,
                             std::uint64_t trials, std::uint64_t seed,
                             Execution exec = Execution::Parallel);

/// Interactive process u = [x > t_u], v = [y > t_v[u]].
McEstimate estimate_exponent(const GaussianModel& model, Threshold t_u,
                             std::array<Threshold, 2> t_v, std::uint64_t n, std::uint64_t trials,
                             std::uint64_t seed, Execution exec = Execution::Parallel);

/// Mean of log p0(x, u_{N-1}) / p1(x, u_{N-1}) over H0 draws of (x, y)
/// pushed through the MIF exchange.
McEstimate estimate_mif_kl(const GaussianModel& model, const MifDesign& design,
                           std::uint64_t trials, std::uint64_t seed,
                           Execution exec = Execution::Parallel);

}  // namespace tandem
