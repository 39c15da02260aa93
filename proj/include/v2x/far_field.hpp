#pragma once

#include <span>
#include <vector>

#include "v2x/config.hpp"
#include "v2x/geometry.hpp"

namespace v2x {

/// Interference from transmitters outside the simulation disk, folded into
/// each SIR draw through its exact Laplace exponent.
///
/// For a serving link with threshold theta the coverage event factors into
///   {H_0 > theta d^a I_in / p}  and  {E > Lambda(theta)},  E ~ Exp(1),
/// where Lambda is minus the log-Laplace transform of the outside interference
/// given the lines crossing the window. The sampled SIR is the largest theta
/// satisfying both, so it has exactly the law of the untruncated SIR.
class FarField {
 public:
  FarField(const NetworkConfig& cfg, double window_radius);

  /// Lambda for normalised thresholds s_b (base stations beyond the window)
  /// and s_v (vehicles beyond the window, on crossing and non-crossing lines).
  double exponent(double s_b, double s_v, std::span<const Line> crossing) const;

  /// Largest theta <= sir_inside with exponent(k_b theta, k_v theta) <= target.
  double clip_sir(double sir_inside, double target, double k_b, double k_v,
                  std::span<const Line> crossing) const;

  double base_station_exponent(double s) const;
  double outer_lines_exponent(double s) const;
  double crossing_line_exponent(double s, const Line& line) const;

 private:
  struct LogTable {
    double log_lo = 0.0;
    double step = 0.0;
    std::vector<double> log_values;
    double slope_at_zero = 0.0;  // d Lambda / ds at s = 0

    double operator()(double s) const;
  };

  double mean_slope(double k_b, double k_v, std::span<const Line> crossing) const;

  NetworkConfig cfg_;
  double window_radius_;
  LogTable base_stations_;
  LogTable outer_lines_;
};

}  // namespace v2x
