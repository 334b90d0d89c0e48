#pragma once

// K peripheral sensors Y_1..Y_K (K <= 3) reporting one bit each to X.
//   vecYX:  v_k = [y_k > t_v[k]],        w = [x > t_w[code(v)]]
//   XvecYX: u = [x > t_u], v_k = [y_k > t_v[k][u]], w = [x > t_w[code(v)][u]]
// with code(v) = sum_k v_k 2^k. With K = 1 both reduce to YX / XYX and the
// evaluators reproduce fixed_sample bit for bit.

#include <array>
#include <vector>

#include "tandem/fixed_sample.hpp"
#include "tandem/gaussian_model.hpp"

namespace tandem {

inline constexpr std::size_t kMaxPeripheralSensors = 3;

class MultiSensorModel {
 public:
  MultiSensorModel(double sigma_x, std::vector<double> sigma_ys);
  explicit MultiSensorModel(const GaussianModel& model);

  double sigma_x() const { return sigma_x_; }
  const std::vector<double>& sigma_ys() const { return sigma_ys_; }
  std::size_t sensors() const { return sigma_ys_.size(); }
  std::size_t codes() const { return std::size_t{1} << sigma_ys_.size(); }

  /// The two-sensor model (X, Y_k).
  GaussianModel pair(std::size_t k) const { return {sigma_x_, sigma_ys_.at(k)}; }

 private:
  double sigma_x_;
  std::vector<double> sigma_ys_;
};

struct VecYxThresholds {
  std::vector<Threshold> t_v;  ///< [k]
  std::vector<Threshold> t_w;  ///< [code]
};

struct XVecYxThresholds {
  Threshold t_u = 0.5;
  std::vector<std::array<Threshold, 2>> t_v;  ///< [k][u]
  std::vector<std::array<Threshold, 2>> t_w;  ///< [code][u]
};

enum class MultiArchitecture { VecYX, XVecYX };

/// Throw InvalidArgument when table sizes do not match the model.
Rates multisensor_evaluate(const MultiSensorModel& model, const VecYxThresholds& thr);
Rates multisensor_evaluate(const MultiSensorModel& model, const XVecYxThresholds& thr);

/// Bit codes sent by the peripheral sensors, literally.
unsigned vec_code(const std::vector<Threshold>& t_v, const std::vector<double>& y);

/// D(p0(x, v) || p1(x, v)) by enumerating the 2^K codes.
double multisensor_kl(const MultiSensorModel& model, const std::vector<Threshold>& t_v);
double multisensor_kl(const MultiSensorModel& model, Threshold t_u,
                      const std::vector<std::array<Threshold, 2>>& t_v);

struct MultiSensorKlMax {
  double k_vecyx = 0.0;
  double k_xvecyx = 0.0;
  std::vector<Threshold> t_vecyx;                 ///< per-sensor optimal thresholds
  Threshold t_u = 0.5;                            ///< XvecYX design found by the search
  std::vector<std::array<Threshold, 2>> t_xvecyx;
};

/// k_vecyx from independent one-dimensional maximizations (the vecYX
/// exponent separates over sensors); k_xvecyx from a joint grid over
/// (t_u, t_v[k][u]) followed by coordinate refinement.
MultiSensorKlMax multisensor_kl_max(const MultiSensorModel& model);

}  // namespace tandem
