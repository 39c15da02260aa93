#pragma once

#include <functional>
#include <string>

namespace v2x {

struct QuadratureSpec {
  double rel_tol = 1e-6;
  double abs_tol = 1e-10;
  int max_depth = 40;          // bisection levels below the initial interval
  int max_subdivisions = 2000;  // total interval splits before giving up
  std::string infinite_tail_cutoff_rule =
      "upper=+inf mapped by u = a + s/(1-s), s in [0,1)";
};

struct QuadResult {
  double value = 0.0;
  double error_bound = 0.0;
  int evaluations = 0;
};

using Integrand = std::function<double(double)>;

/// Globally adaptive 7/15-point Gauss-Kronrod integration of f over
/// [lower, upper]. `upper` may be +infinity. Stops once the summed error
/// estimate is below max(abs_tol, rel_tol * |value|); throws NonConvergence
/// when no interval can be split further before that happens.
QuadResult integrate(const Integrand& f, double lower, double upper,
                     const QuadratureSpec& spec = {});

/// Integral over [lower, inf) after rescaling u = lower + scale * w, which
/// places the integrand's features near w ~ 1 before the tail map.
QuadResult integrate_tail(const Integrand& f, double lower, double scale,
                          const QuadratureSpec& spec = {});

}  // namespace v2x
