#include "v2x/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

namespace v2x {

namespace {

struct FieldEntry {
  const char* name;
  double NetworkConfig::*member;
};

constexpr FieldEntry kFields[] = {
    {"lambda_l", &NetworkConfig::lambda_l}, {"mu", &NetworkConfig::mu},
    {"lambda_b", &NetworkConfig::lambda_b}, {"lambda_u", &NetworkConfig::lambda_u},
    {"rho", &NetworkConfig::rho},           {"alpha", &NetworkConfig::alpha},
    {"p_b", &NetworkConfig::p_b},           {"p_v", &NetworkConfig::p_v},
    {"speed", &NetworkConfig::speed},       {"epsilon", &NetworkConfig::epsilon},
    {"w_s", &NetworkConfig::w_s},           {"w_d", &NetworkConfig::w_d},
};

void require(bool ok, const char* message) {
  if (!ok) throw ValidationError(message);
}

}  // namespace

NetworkConfig validate(const NetworkConfig& raw) {
  for (const auto& f : kFields) {
    if (!std::isfinite(raw.*f.member)) {
      throw ValidationError(std::string(f.name) + " must be finite");
    }
  }
  require(raw.lambda_l >= 0.0, "lambda_l must be nonnegative");
  require(raw.mu >= 0.0, "mu must be nonnegative");
  require(raw.lambda_b > 0.0, "lambda_b must be positive");
  require(raw.lambda_u > 0.0, "lambda_u must be positive");
  require(raw.rho >= 0.0, "rho must be nonnegative");
  require(raw.alpha > 2.0, "alpha must exceed 2");
  require(raw.p_b > 0.0, "p_b must be positive");
  require(raw.p_v > 0.0, "p_v must be positive");
  require(raw.speed >= 0.0, "speed must be nonnegative");
  require(raw.epsilon >= 0.0, "epsilon must be nonnegative");
  require(raw.w_s >= 0.0, "w_s must be nonnegative");
  require(raw.w_d >= 0.0, "w_d must be nonnegative");
  require(raw.lambda_u > raw.lambda_b, "lambda_u must exceed lambda_b");
  return raw;
}

DerivedQuantities derive(const NetworkConfig& cfg) {
  return {cfg.p_v / cfg.p_b, cfg.lambda_l * cfg.mu / std::numbers::pi};
}

const std::vector<std::string>& config_field_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& f : kFields) out.emplace_back(f.name);
    return out;
  }();
  return names;
}

double& config_field(NetworkConfig& cfg, std::string_view name) {
  for (const auto& f : kFields) {
    if (name == f.name) return cfg.*f.member;
  }
  throw ValidationError("unknown config field '" + std::string(name) + "'");
}

double config_field(const NetworkConfig& cfg, std::string_view name) {
  return config_field(const_cast<NetworkConfig&>(cfg), name);
}

NetworkConfig parse_config(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ValidationError("config must be a flat JSON object");

  NetworkConfig cfg;
  for (const auto& [key, value] : doc.items()) {
    double& slot = config_field(cfg, key);
    if (!value.is_number()) {
      throw ValidationError("config field '" + key + "' must be a number");
    }
    slot = value.get<double>();
  }
  for (const auto& f : kFields) {
    if (std::string_view(f.name) == "speed") continue;
    if (!doc.contains(f.name)) {
      throw ValidationError(std::string("config field '") + f.name + "' is missing");
    }
  }
  return validate(cfg);
}

NetworkConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string to_json(const NetworkConfig& cfg) {
  nlohmann::ordered_json doc;
  for (const auto& f : kFields) doc[f.name] = cfg.*f.member;
  return doc.dump(2);
}

}  // namespace v2x
