#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <utility>

#include "v2x/config.hpp"

using namespace v2x;

namespace {

NetworkConfig baseline() { return NetworkConfig{5, 5, 5, 200, 0.05, 3, 1, 1, 0, 1, 0.5, 0.5}; }

std::string error_of(const NetworkConfig& c) {
  try {
    validate(c);
  } catch (const ValidationError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("figure parameter set validates unchanged") {
  const NetworkConfig c = baseline();
  CHECK(validate(c) == c);
  CHECK(validate(validate(c)) == validate(c));
}

TEST_CASE("validate names the violated invariant") {
  NetworkConfig c = baseline();
  c.alpha = 2.0;
  CHECK(error_of(c) == "alpha must exceed 2");

  c = baseline();
  c.lambda_u = 1;
  c.lambda_b = 5;
  CHECK(error_of(c) == "lambda_u must exceed lambda_b");

  c = baseline();
  c.mu = -1;
  c.alpha = 1;
  CHECK(error_of(c).find("mu") != std::string::npos);  // first in field order

  c = baseline();
  c.rho = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(validate(c), ValidationError);

  c = baseline();
  c.p_v = 0;
  CHECK_THROWS_AS(validate(c), ValidationError);

  c = baseline();
  c.w_s = -0.1;
  CHECK_THROWS_AS(validate(c), ValidationError);
}

TEST_CASE("roadless configurations are accepted") {
  NetworkConfig c = baseline();
  c.lambda_l = 0;
  CHECK_NOTHROW(validate(c));
}

TEST_CASE("derived quantities") {
  NetworkConfig c = baseline();
  CHECK(derive(c).eta == 1.0);
  c.p_v = 0.1;
  CHECK(derive(c).eta == doctest::Approx(0.1).epsilon(1e-15));
  c.lambda_l = std::numbers::pi;
  c.mu = 1;
  CHECK(derive(c).vehicle_area_density == doctest::Approx(1.0).epsilon(1e-15));
  c = baseline();
  CHECK(derive(c).vehicle_area_density == c.lambda_l * c.mu / std::numbers::pi);
}

TEST_CASE("config documents") {
  const std::string text =
      R"({"lambda_l":5,"mu":5,"lambda_b":5,"lambda_u":200,"rho":0.05,"alpha":3,)"
      R"("p_b":1,"p_v":1,"epsilon":1,"w_s":0.5,"w_d":0.5})";
  const NetworkConfig c = parse_config(text);
  CHECK(c == baseline());
  CHECK(c.speed == 0.0);
  CHECK(parse_config(to_json(c)) == c);

  CHECK_THROWS_AS(parse_config(R"({"lambda_l":5,"mu":5,"lambda_b":5,"lambda_u":200,"rho":0.05,"alpha":3,)"
                               R"("p_b":1,"p_v":1,"epsilon":1,"w_s":0.5,"w_d":0.5,"lamda_b":5})"),
                  ValidationError);
  CHECK_THROWS_AS(parse_config(R"({"lambda_l":5})"), ValidationError);
  CHECK_THROWS_AS(parse_config(R"({"lambda_l":"5","mu":5,"lambda_b":5,"lambda_u":200,"rho":0.05,"alpha":3,)"
                               R"("p_b":1,"p_v":1,"epsilon":1,"w_s":0.5,"w_d":0.5})"),
                  ValidationError);
  CHECK_THROWS_AS(parse_config("not json"), ValidationError);
}

TEST_CASE("field access by name") {
  NetworkConfig c = baseline();
  CHECK(config_field_names().size() == 12);
  config_field(c, "rho") = 0.2;
  CHECK(c.rho == 0.2);
  CHECK(config_field(std::as_const(c), "lambda_u") == 200);
  CHECK_THROWS_AS(config_field(c, "eta"), ValidationError);
}
