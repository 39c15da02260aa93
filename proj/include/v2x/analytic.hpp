#pragma once

#include "v2x/config.hpp"
#include "v2x/quadrature.hpp"

namespace v2x::analytic {

/// A numerically evaluated quantity and its quadrature error ledger.
struct CoverageResult {
  double value = 0.0;
  double est_abs_error = 0.0;
};

/// Probability that the typical user lies inside the vehicle association
/// region: 1 - exp(-2 lambda_l int_0^rho 1 - exp(-2 mu sqrt(rho^2-u^2)) du).
CoverageResult p_assoc_sl(double lambda_l, double mu, double rho, const QuadratureSpec& spec = {});
CoverageResult p_assoc_dl(double lambda_l, double mu, double rho, const QuadratureSpec& spec = {});

/// Joint probability P(SIR > tau, user served by its nearest base station).
CoverageResult dl_coverage(const NetworkConfig& cfg, double tau, const QuadratureSpec& spec = {});

/// Joint probability P(SIR > tau, user served by its nearest vehicle within rho).
CoverageResult sl_coverage(const NetworkConfig& cfg, double tau, const QuadratureSpec& spec = {});

/// dl_coverage + sl_coverage.
CoverageResult total_coverage(const NetworkConfig& cfg, double tau, const QuadratureSpec& spec = {});

/// Normalised second moment of the typical Poisson-Voronoi cell area,
/// E[A^2] lambda^2 (literature value).
constexpr double nu() { return 1.280; }

struct ZeroCellAreas {
  double in_region = 0.0;   // E[|V_Z intersect D|], km^2
  double outside = 0.0;     // E[|V_Z \ D|], km^2
};

ZeroCellAreas mean_zero_cell_areas(const NetworkConfig& cfg, const QuadratureSpec& spec = {});

/// Downlink effective rate per user, bits/s/Hz:
/// lambda_b int_0^inf P(SIR > 2^x - 1, DL) dx / (nu lambda_u P(DL)).
CoverageResult effective_rate(const NetworkConfig& cfg, const QuadratureSpec& spec = {});

/// Mean downlink Shannon rate on the DL event, E[log2(1+SIR) 1{DL}]
/// (the numerator of effective_rate without the lambda_b factor).
CoverageResult mean_dl_rate(const NetworkConfig& cfg, const QuadratureSpec& spec = {});

/// w_s P(SIR > 2^eps - 1, SL) + w_d T.
CoverageResult network_utility(const NetworkConfig& cfg, double w_s, double w_d,
                               const QuadratureSpec& spec = {});

/// eps P(SIR > 2^eps - 1, SL) + T.
CoverageResult total_rate(const NetworkConfig& cfg, const QuadratureSpec& spec = {});

}  // namespace v2x::analytic
