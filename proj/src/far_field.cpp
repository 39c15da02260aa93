#include "v2x/far_field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "v2x/quadrature.hpp"

namespace v2x {

namespace {

constexpr double kLogSMin = -12.0 * std::numbers::ln10;
constexpr double kLogSMax = 12.0 * std::numbers::ln10;
constexpr int kPointsPerDecade = 40;

double saturate(double z) { return z < 1e300 ? z / (1.0 + z) : 1.0; }

}  // namespace

double FarField::LogTable::operator()(double s) const {
  if (s <= 0.0) return 0.0;
  const double ls = std::log(s);
  if (ls <= log_lo) return slope_at_zero * s;
  const double pos = (ls - log_lo) / step;
  const auto last = log_values.size() - 1;
  std::size_t i = static_cast<std::size_t>(pos);
  if (i >= last) i = last - 1;
  const double t = pos - static_cast<double>(i);
  return std::exp(log_values[i] + t * (log_values[i + 1] - log_values[i]));
}

FarField::FarField(const NetworkConfig& cfg, double window_radius)
    : cfg_(cfg), window_radius_(window_radius) {
  const double alpha = cfg.alpha;
  const double radius = window_radius;
  QuadratureSpec spec;
  spec.rel_tol = 1e-9;
  spec.abs_tol = 1e-300;

  auto line_integral = [&](double s, double r, double from, const QuadratureSpec& q) {
    const Integrand f = [=](double u) {
      return saturate(s * std::pow(r * r + u * u, -0.5 * alpha));
    };
    return integrate_tail(f, from, std::max({radius, r, std::pow(s, 1.0 / alpha)}), q).value;
  };

  auto build = [&](auto&& lambda_of_s) {
    LogTable table;
    table.step = std::numbers::ln10 / kPointsPerDecade;
    table.log_lo = kLogSMin;
    const int n = static_cast<int>(std::round((kLogSMax - kLogSMin) / table.step)) + 1;
    table.log_values.reserve(n);
    for (int i = 0; i < n; ++i) {
      const double s = std::exp(kLogSMin + i * table.step);
      const double v = lambda_of_s(s);
      table.log_values.push_back(v > 0.0 ? std::log(v) : -745.0);
    }
    table.slope_at_zero = std::exp(table.log_values.front()) / std::exp(kLogSMin);
    return table;
  };

  // 2 pi lambda_b int_R^inf y g(s y^{-alpha}) dy
  base_stations_ = build([&](double s) {
    const Integrand f = [=](double y) { return y * saturate(s * std::pow(y, -alpha)); };
    const double scale = std::max(radius, std::pow(s, 1.0 / alpha));
    return 2.0 * std::numbers::pi * cfg.lambda_b * integrate_tail(f, radius, scale, spec).value;
  });

  // 2 lambda_l int_R^inf 1 - exp(-2 mu int_0^inf g(s (r^2+u^2)^{-alpha/2}) du) dr
  if (cfg.lambda_l > 0.0 && cfg.mu > 0.0) {
    QuadratureSpec inner = spec;
    inner.rel_tol = 1e-10;
    outer_lines_ = build([&](double s) {
      const Integrand f = [&](double r) {
        return -std::expm1(-2.0 * cfg.mu * line_integral(s, r, 0.0, inner));
      };
      const double scale = std::max(radius, std::pow(s, 1.0 / alpha));
      return 2.0 * cfg.lambda_l * integrate_tail(f, radius, scale, spec).value;
    });
  } else {
    outer_lines_ = build([](double) { return 0.0; });
    outer_lines_.slope_at_zero = 0.0;
  }
}

double FarField::base_station_exponent(double s) const { return base_stations_(s); }

double FarField::outer_lines_exponent(double s) const {
  if (cfg_.lambda_l <= 0.0 || cfg_.mu <= 0.0) return 0.0;
  return outer_lines_(s);
}

double FarField::crossing_line_exponent(double s, const Line& line) const {
  if (s <= 0.0 || cfg_.mu <= 0.0) return 0.0;
  const double r = line.r;
  const double from = chord_half_length(std::clamp(r, -window_radius_, window_radius_), window_radius_);
  const double alpha = cfg_.alpha;
  const double scale = std::max(window_radius_, std::pow(s, 1.0 / alpha));
  // u = from + scale (1 - v) / v maps v in (0, 1] onto [from, inf).
  auto f = [&](double v) {
    const double u = from + scale * (1.0 - v) / v;
    const double jac = scale / (v * v);
    return saturate(s * std::pow(r * r + u * u, -0.5 * alpha)) * jac;
  };
  const double integral = boost::math::quadrature::gauss<double, 30>::integrate(f, 0.0, 1.0);
  return 2.0 * cfg_.mu * integral;
}

double FarField::exponent(double s_b, double s_v, std::span<const Line> crossing) const {
  double total = base_station_exponent(s_b) + outer_lines_exponent(s_v);
  for (const auto& line : crossing) total += crossing_line_exponent(s_v, line);
  return total;
}

double FarField::mean_slope(double k_b, double k_v, std::span<const Line> crossing) const {
  double slope = k_b * base_stations_.slope_at_zero;
  if (cfg_.lambda_l > 0.0 && cfg_.mu > 0.0) slope += k_v * outer_lines_.slope_at_zero;
  const double tiny = std::exp(kLogSMin);
  for (const auto& line : crossing) slope += k_v * crossing_line_exponent(tiny, line) / tiny;
  return slope;
}

double FarField::clip_sir(double sir_inside, double target, double k_b, double k_v,
                          std::span<const Line> crossing) const {
  auto lambda = [&](double theta) { return exponent(k_b * theta, k_v * theta, crossing); };
  if (std::isfinite(sir_inside) && lambda(sir_inside) <= target) return sir_inside;

  // Lambda is concave with Lambda(0) = 0, so target / Lambda'(0) undershoots the root.
  const double slope = mean_slope(k_b, k_v, crossing);
  double lo = target / slope;
  while (lo > 0.0 && lambda(lo) > target) lo *= 0.5;  // table interpolation is only nearly concave
  double hi = std::isfinite(sir_inside) ? sir_inside : 2.0 * lo;
  while (lambda(hi) < target) {
    lo = hi;
    hi *= 2.0;
  }
  if (lo >= hi) return hi;
  std::uintmax_t max_iter = 200;
  const auto bracket = boost::math::tools::toms748_solve(
      [&](double theta) { return lambda(theta) - target; }, lo, hi,
      boost::math::tools::eps_tolerance<double>(40), max_iter);
  return 0.5 * (bracket.first + bracket.second);
}

}  // namespace v2x
