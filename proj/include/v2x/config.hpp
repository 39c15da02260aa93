#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "v2x/error.hpp"

namespace v2x {

/// Model parameters shared by the simulator and the analytic evaluators.
/// Lengths in km, line/linear intensities per km, planar intensities per km^2,
/// powers in linear units.
struct NetworkConfig {
  double lambda_l = 0.0;  // road lines per km
  double mu = 0.0;        // vehicles per km of road
  double lambda_b = 0.0;  // base stations per km^2
  double lambda_u = 0.0;  // users per km^2
  double rho = 0.0;       // sidelink association radius, km
  double alpha = 0.0;     // path-loss exponent
  double p_b = 1.0;
  double p_v = 1.0;
  double speed = 0.0;     // km per unit time
  double epsilon = 0.0;   // sidelink encoding rate, bits/s/Hz
  double w_s = 0.0;
  double w_d = 0.0;

  bool operator==(const NetworkConfig&) const = default;
};

struct DerivedQuantities {
  double eta = 0.0;                   // p_v / p_b
  double vehicle_area_density = 0.0;  // lambda_l * mu / pi
};

/// Returns `raw` unchanged when every invariant holds; otherwise throws
/// ValidationError naming the first violated one.
NetworkConfig validate(const NetworkConfig& raw);

DerivedQuantities derive(const NetworkConfig& cfg);

/// Field names in file/CSV order.
const std::vector<std::string>& config_field_names();

/// Mutable access by field name; throws ValidationError for unknown names.
double& config_field(NetworkConfig& cfg, std::string_view name);
double config_field(const NetworkConfig& cfg, std::string_view name);

/// Parses a flat JSON object with exactly the NetworkConfig field names.
/// `speed` may be omitted (defaults to 0); unknown keys are rejected.
NetworkConfig parse_config(std::string_view json_text);
NetworkConfig load_config(const std::filesystem::path& path);

std::string to_json(const NetworkConfig& cfg);

}  // namespace v2x
