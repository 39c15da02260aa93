#include "v2x/analytic.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "v2x/error.hpp"

namespace v2x::analytic {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kHalfPi = 0.5 * std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

// z / (1 + z), saturating at 1 for z = inf.
double saturate(double z) { return z < 1e300 ? z / (1.0 + z) : 1.0; }

QuadratureSpec inner_spec(const QuadratureSpec& spec) {
  QuadratureSpec inner = spec;
  inner.rel_tol = spec.rel_tol * 1e-2;
  inner.abs_tol = spec.abs_tol * 1e-3;
  return inner;
}

void require_tau(double tau) {
  if (!(tau > 0.0) || std::isnan(tau)) throw std::invalid_argument("tau must be positive");
}

// Shot-noise Laplace exponent of one side pair of a line at distance r from the
// user, over vehicles whose along-line coordinate exceeds `from` in magnitude
// (per unit of 2 mu): int_from^inf g(s (r^2+u^2)^{-alpha/2}) du.
double line_exponent(double s, double r, double from, double alpha, const QuadratureSpec& spec) {
  if (s <= 0.0) return 0.0;
  const double half_alpha = 0.5 * alpha;
  const double r2 = r * r;
  const Integrand f = [=](double u) {
    const double d2 = r2 + u * u;
    if (d2 <= 0.0) return 1.0;
    return saturate(s * std::pow(d2, -half_alpha));
  };
  const double scale = std::max({std::hypot(r, from), std::pow(s, 1.0 / alpha), 1e-12});
  return integrate_tail(f, from, scale, spec).value;
}

// int_1^inf w g(tau w^{-alpha}) dw: base-station interference beyond the
// serving distance, after rescaling r = x w.
double bs_excess_exponent(double tau, double alpha, const QuadratureSpec& spec) {
  if (tau <= 0.0) return 0.0;
  const Integrand f = [=](double w) { return w * saturate(tau * std::pow(w, -alpha)); };
  return integrate_tail(f, 1.0, std::max(1.0, std::pow(tau, 1.0 / alpha)), spec).value;
}

// int_0^inf w g(t w^{-alpha}) dw = t^{2/alpha} (pi/alpha) / sin(2 pi/alpha),
// evaluated by quadrature; the closed form is left to the tests.
double bs_full_exponent(double t, double alpha, const QuadratureSpec& spec) {
  if (t <= 0.0) return 0.0;
  const Integrand f = [=](double w) {
    if (w <= 0.0) return 0.0;
    return w * saturate(t * std::pow(w, -alpha));
  };
  return integrate_tail(f, 0.0, std::pow(t, 1.0 / alpha), spec).value;
}

// Upper limit X beyond which  int_X^inf c x exp(-a x^2) dx = (c / 2a) e^{-a X^2}
// falls below `tol`.
double gaussian_cutoff(double c, double a, double tol) {
  const double arg = std::log(std::max(c / (2.0 * a * tol), 1.0 + 1e-12));
  return std::sqrt(arg / a);
}

// 2 lambda_l (K2(x) + K3(x)) for downlink with vehicle-to-BS power ratio eta.
double dl_vehicle_exponent(const NetworkConfig& cfg, double s_v, const QuadratureSpec& inner) {
  if (cfg.lambda_l <= 0.0) return 0.0;
  const double mu = cfg.mu;
  const double rho = cfg.rho;
  const double alpha = cfg.alpha;
  double k2 = 0.0;
  if (rho > 0.0 && mu > 0.0) {
    // r = rho sin(phi) removes the sqrt(rho^2 - r^2) endpoint behaviour.
    const Integrand f = [&](double phi) {
      const double c = rho * std::cos(phi);
      const double r = rho * std::sin(phi);
      const double inner_val = line_exponent(s_v, r, c, alpha, inner);
      return -std::expm1(-2.0 * mu * c - 2.0 * mu * inner_val) * c;
    };
    k2 = integrate(f, 0.0, kHalfPi, inner).value;
  }
  double k3 = 0.0;
  if (mu > 0.0 && s_v > 0.0) {
    const Integrand f = [&](double r) {
      return -std::expm1(-2.0 * mu * line_exponent(s_v, r, 0.0, alpha, inner));
    };
    const double scale = std::max(rho, std::pow(s_v, 1.0 / alpha));
    k3 = integrate_tail(f, rho, std::max(scale, 1e-9), inner).value;
  }
  return 2.0 * cfg.lambda_l * (k2 + k3);
}

CoverageResult dl_coverage_impl(const NetworkConfig& cfg, double tau, const QuadratureSpec& spec) {
  const QuadratureSpec inner = inner_spec(spec);
  const double eta = cfg.p_v / cfg.p_b;
  const double kappa = bs_excess_exponent(tau, cfg.alpha, inner);
  const double a = kPi * cfg.lambda_b * (1.0 + 2.0 * kappa);  // pi lambda_b K1(x) / x^2

  const Integrand f = [&](double x) {
    if (x <= 0.0) return 0.0;
    const double s_v = tau * std::pow(x, cfg.alpha) * eta;
    const double expo = a * x * x + dl_vehicle_exponent(cfg, s_v, inner);
    return 2.0 * kPi * cfg.lambda_b * x * std::exp(-expo);
  };
  const double cut = gaussian_cutoff(2.0 * kPi * cfg.lambda_b, a, spec.abs_tol * 1e-2);
  // Split at the envelope mode so the adaptive rule sees the peak even when
  // tau is large and the mass sits near x = 0.
  const double mode = 1.0 / std::sqrt(2.0 * a);
  const double split = std::min(4.0 * mode, cut);
  const QuadResult head = integrate(f, 0.0, split, spec);
  const QuadResult tail = integrate(f, split, cut, spec);
  const double value = head.value + tail.value;
  const double err = head.error_bound + tail.error_bound + spec.abs_tol * 1e-2 +
                     spec.rel_tol * std::abs(value);
  return {value, err};
}

CoverageResult sl_coverage_impl(const NetworkConfig& cfg, double tau, const QuadratureSpec& spec) {
  if (cfg.rho <= 0.0 || cfg.lambda_l <= 0.0 || cfg.mu <= 0.0) return {0.0, 0.0};
  const QuadratureSpec inner = inner_spec(spec);
  const double eta = cfg.p_v / cfg.p_b;
  const double mu = cfg.mu;
  const double alpha = cfg.alpha;
  const double lambda_l = cfg.lambda_l;
  // L1(x) = x^2 * 2 pi lambda_b int_0^inf w g((tau/eta) w^{-alpha}) dw  (u = x w).
  const double l1_coeff = 2.0 * kPi * cfg.lambda_b * bs_full_exponent(tau / eta, alpha, inner);

  const Integrand f = [&](double x) {
    if (x <= 0.0) return 0.0;
    const double s_v = tau * std::pow(x, alpha);
    // L0 and L2 after r = x sin(phi), which cancels the 1/sqrt(x^2 - r^2) factor.
    const Integrand l0_f = [&](double phi) {
      const double c = x * std::cos(phi);
      const double r = x * std::sin(phi);
      return std::exp(-2.0 * mu * c - 2.0 * mu * line_exponent(s_v, r, c, alpha, inner));
    };
    const Integrand l2_f = [&](double phi) {
      const double c = x * std::cos(phi);
      const double r = x * std::sin(phi);
      return -std::expm1(-2.0 * mu * c - 2.0 * mu * line_exponent(s_v, r, c, alpha, inner)) * c;
    };
    const double l0 = 4.0 * lambda_l * mu * x * integrate(l0_f, 0.0, kHalfPi, inner).value;
    const double l2 = 2.0 * lambda_l * integrate(l2_f, 0.0, kHalfPi, inner).value;
    double l3 = 0.0;
    if (s_v > 0.0) {
      const Integrand l3_f = [&](double u) {
        return -std::expm1(-2.0 * mu * line_exponent(s_v, u, 0.0, alpha, inner));
      };
      l3 = 2.0 * lambda_l *
           integrate_tail(l3_f, x, std::max(x, std::pow(s_v, 1.0 / alpha)), inner).value;
    }
    const double l1 = l1_coeff * x * x;
    return l0 * std::exp(-l1 - l2 - l3);
  };

  // L0 <= 2 pi lambda_l mu x, so the part beyond `cut` is below tolerance.
  double upper = cfg.rho;
  if (l1_coeff > 0.0) {
    upper = std::min(upper, gaussian_cutoff(2.0 * kPi * lambda_l * mu, l1_coeff, spec.abs_tol * 1e-2));
  }
  double value = 0.0;
  double err = 0.0;
  if (l1_coeff > 0.0) {
    const double split = std::min(4.0 / std::sqrt(2.0 * l1_coeff), upper);
    const QuadResult head = integrate(f, 0.0, split, spec);
    const QuadResult tail = integrate(f, split, upper, spec);
    value = head.value + tail.value;
    err = head.error_bound + tail.error_bound;
  } else {
    const QuadResult all = integrate(f, 0.0, upper, spec);
    value = all.value;
    err = all.error_bound;
  }
  err += spec.abs_tol * 1e-2 + spec.rel_tol * std::abs(value);
  return {value, err};
}

}  // namespace

CoverageResult p_assoc_sl(double lambda_l, double mu, double rho, const QuadratureSpec& spec) {
  if (rho <= 0.0 || lambda_l <= 0.0 || mu <= 0.0) return {0.0, 0.0};
  // u = rho sin(phi): int_0^rho (1 - e^{-2 mu sqrt(rho^2-u^2)}) du
  //                 = int_0^{pi/2} (1 - e^{-2 mu rho cos phi}) rho cos phi dphi
  const Integrand f = [=](double phi) {
    const double c = rho * std::cos(phi);
    return -std::expm1(-2.0 * mu * c) * c;
  };
  const QuadResult q = integrate(f, 0.0, kHalfPi, spec);
  const double survive = std::exp(-2.0 * lambda_l * q.value);
  return {-std::expm1(-2.0 * lambda_l * q.value), survive * 2.0 * lambda_l * q.error_bound};
}

CoverageResult p_assoc_dl(double lambda_l, double mu, double rho, const QuadratureSpec& spec) {
  const CoverageResult sl = p_assoc_sl(lambda_l, mu, rho, spec);
  return {1.0 - sl.value, sl.est_abs_error};
}

CoverageResult dl_coverage(const NetworkConfig& cfg, double tau, const QuadratureSpec& spec) {
  require_tau(tau);
  return dl_coverage_impl(cfg, tau, spec);
}

CoverageResult sl_coverage(const NetworkConfig& cfg, double tau, const QuadratureSpec& spec) {
  require_tau(tau);
  return sl_coverage_impl(cfg, tau, spec);
}

CoverageResult total_coverage(const NetworkConfig& cfg, double tau, const QuadratureSpec& spec) {
  const CoverageResult dl = dl_coverage(cfg, tau, spec);
  const CoverageResult sl = sl_coverage(cfg, tau, spec);
  return {dl.value + sl.value, dl.est_abs_error + sl.est_abs_error};
}

ZeroCellAreas mean_zero_cell_areas(const NetworkConfig& cfg, const QuadratureSpec& spec) {
  const double p_sl = p_assoc_sl(cfg.lambda_l, cfg.mu, cfg.rho, spec).value;
  const double scale = nu() / cfg.lambda_b;
  return {scale * p_sl, scale * (1.0 - p_sl)};
}

CoverageResult mean_dl_rate(const NetworkConfig& cfg, const QuadratureSpec& spec) {
  const Integrand f = [&](double x) {
    return dl_coverage_impl(cfg, std::exp2(x) - 1.0, spec).value;
  };
  // Panels [0,1], [1,2], [2,4], ... until the integrand is below 1e-10 at the
  // right end of two consecutive panels.
  constexpr double kTailLevel = 1e-10;
  double lo = 0.0;
  double hi = 1.0;
  double value = 0.0;
  double err = 0.0;
  int quiet_panels = 0;
  while (quiet_panels < 2) {
    const QuadResult panel = integrate(f, lo, hi, spec);
    value += panel.value;
    err += panel.error_bound;
    quiet_panels = f(hi) < kTailLevel ? quiet_panels + 1 : 0;
    if (hi > 4096.0) {
      throw NonConvergence("rate integral tail did not decay", value, err);
    }
    lo = hi;
    hi *= 2.0;
  }
  err += spec.rel_tol * std::abs(value) + kTailLevel;
  return {value, err};
}

CoverageResult effective_rate(const NetworkConfig& cfg, const QuadratureSpec& spec) {
  const CoverageResult numerator = mean_dl_rate(cfg, spec);
  const CoverageResult p_dl = p_assoc_dl(cfg.lambda_l, cfg.mu, cfg.rho, spec);
  const double denom = nu() * cfg.lambda_u * p_dl.value;
  const double value = cfg.lambda_b * numerator.value / denom;
  const double rel = numerator.est_abs_error / std::max(numerator.value, 1e-300) +
                     p_dl.est_abs_error / p_dl.value;
  return {value, std::abs(value) * rel};
}

CoverageResult network_utility(const NetworkConfig& cfg, double w_s, double w_d,
                               const QuadratureSpec& spec) {
  if (w_s < 0.0 || w_d < 0.0) throw std::invalid_argument("utility weights must be nonnegative");
  CoverageResult sl{0.0, 0.0};
  if (w_s > 0.0) sl = sl_coverage_impl(cfg, std::exp2(cfg.epsilon) - 1.0, spec);
  CoverageResult rate{0.0, 0.0};
  if (w_d > 0.0) rate = effective_rate(cfg, spec);
  return {w_s * sl.value + w_d * rate.value, w_s * sl.est_abs_error + w_d * rate.est_abs_error};
}

CoverageResult total_rate(const NetworkConfig& cfg, const QuadratureSpec& spec) {
  CoverageResult sl{0.0, 0.0};
  if (cfg.epsilon > 0.0) sl = sl_coverage_impl(cfg, std::exp2(cfg.epsilon) - 1.0, spec);
  const CoverageResult rate = effective_rate(cfg, spec);
  return {cfg.epsilon * sl.value + rate.value, cfg.epsilon * sl.est_abs_error + rate.est_abs_error};
}

}  // namespace v2x::analytic
