#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "v2x/config.hpp"
#include "v2x/far_field.hpp"
#include "v2x/geometry.hpp"
#include "v2x/rng.hpp"

namespace v2x {

enum class Association { Sidelink, Downlink };
enum class Link { SL, DL, Total };

struct SirSample {
  Association association = Association::Downlink;
  double serving_distance = 0.0;
  double sir = 0.0;  // +inf when nothing interferes
};

struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::uint64_t n_samples = 0;
  std::uint64_t seed = 0;
};

struct SimPlan {
  double window_radius = 0.0;
  std::uint64_t n_samples = 0;
  std::uint64_t seed = 0;
  std::string guard_note;
  /// Fold out-of-window interference into each SIR draw (see FarField).
  bool far_field = true;
  /// Vehicles are observed at this time after being placed at t = 0.
  double time = 0.0;
  /// Hit-or-miss probes per zero cell for the area estimators.
  int probes_per_cell = 10000;
  /// 0 = hardware concurrency.
  unsigned threads = 0;
};

/// max(10 rho, 10/sqrt(pi lambda_b), 10/sqrt(lambda_l mu)), dropping the
/// vehicle term when there are no vehicles.
double default_window_radius(const NetworkConfig& cfg);
SimPlan default_plan(const NetworkConfig& cfg, std::uint64_t n_samples, std::uint64_t seed);

/// Throws std::invalid_argument when the window is smaller than 10 rho or
/// 10/sqrt(pi lambda_b), or n_samples is zero.
void validate_plan(const NetworkConfig& cfg, const SimPlan& plan);

/// Lines, vehicles (observed at `time`) and base stations on the disk.
Realization sample_realization(const NetworkConfig& cfg, double window_radius, double time,
                               RngStream& rng);

/// One typical-user draw at the origin. Fades are independent unit-mean
/// exponentials per transmitter. Throws DegenerateRealization when there is
/// neither a base station nor a vehicle within rho.
SirSample sample_sir(const Realization& real, const NetworkConfig& cfg, RngStream& rng,
                     const FarField* far_field = nullptr);

struct SirRun {
  std::vector<SirSample> samples;  // replication order
  std::uint64_t degenerate = 0;    // resampled for lack of a base station
  double window_radius = 0.0;
  std::uint64_t seed = 0;
};

SirRun simulate_sir(const NetworkConfig& cfg, const SimPlan& plan);

struct AssociationEstimate {
  Estimate sidelink;
  Estimate downlink;
};

AssociationEstimate estimate_association(const NetworkConfig& cfg, const SimPlan& plan);

struct CoveragePoint {
  double tau = 0.0;
  Estimate sidelink;
  Estimate downlink;
  Estimate total;
};

struct CoverageCurve {
  std::vector<CoveragePoint> points;
  AssociationEstimate association;  // from the same samples
};

/// Joint coverage P(SIR > tau, link) on one common sample set for all taus.
CoverageCurve coverage_curve(const SirRun& run, const std::vector<double>& taus);
CoverageCurve estimate_coverage_curve(const NetworkConfig& cfg, const std::vector<double>& taus,
                                      const SimPlan& plan);
Estimate estimate_coverage(const NetworkConfig& cfg, double tau, Link link, const SimPlan& plan);

struct RateSummary {
  Estimate mean_dl_rate;  // E[log2(1+SIR) 1{DL}]
  std::uint64_t cap_hits = 0;
};

/// log2(1 + SIR) is capped here.
inline constexpr double kRateCapBits = 60.0;

RateSummary mean_dl_rate(const SirRun& run);

/// Users of an independent PPP(lambda_u) that sit in the zero cell (nearest
/// base station = the one closest to the origin) and outside the vehicle region.
Estimate estimate_zero_cell_load(const NetworkConfig& cfg, const SimPlan& plan);

struct ZeroCellAreaEstimate {
  Estimate in_region;
  Estimate outside;
};

/// Hit-or-miss areas of V_Z intersect D and V_Z \ D.
ZeroCellAreaEstimate estimate_zero_cell_areas(const NetworkConfig& cfg, const SimPlan& plan);

struct EffectiveRateEstimate {
  Estimate rate;
  Estimate numerator;
  Estimate load;
  std::uint64_t cap_hits = 0;
};

EffectiveRateEstimate estimate_effective_rate(const NetworkConfig& cfg, const SimPlan& plan);

/// E[|V_0|^2] of the typical Poisson-Voronoi cell (nucleus added at the
/// origin), from exact cell polygons.
Estimate estimate_voronoi_area_moment(double lambda_b, const SimPlan& plan);

}  // namespace v2x
