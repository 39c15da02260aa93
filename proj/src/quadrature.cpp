#include "v2x/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>
#include <vector>

#include "v2x/error.hpp"

namespace v2x {

namespace {

// Kronrod abscissae (positive half, descending) and weights; Gauss weights on
// the odd-indexed abscissae.
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a;
  double b;
  double value;
  double error;
  int depth;

  bool operator<(const Segment& other) const { return error < other.error; }
};

Segment gk15(const Integrand& f, double a, double b, int depth) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double res_g = fc * kWg[3];
  double res_k = fc * kWgk[7];
  double res_abs = std::abs(res_k);
  double fv1[7];
  double fv2[7];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const double f1 = f(center - dx);
    const double f2 = f(center + dx);
    fv1[j] = f1;
    fv2[j] = f2;
    res_k += kWgk[j] * (f1 + f2);
    res_abs += kWgk[j] * (std::abs(f1) + std::abs(f2));
    if (j % 2 == 1) res_g += kWg[j / 2] * (f1 + f2);
  }
  const double mean = 0.5 * res_k;
  double res_asc = kWgk[7] * std::abs(fc - mean);
  for (int j = 0; j < 7; ++j) {
    res_asc += kWgk[j] * (std::abs(fv1[j] - mean) + std::abs(fv2[j] - mean));
  }
  const double value = res_k * half;
  res_abs *= std::abs(half);
  res_asc *= std::abs(half);
  double err = std::abs((res_k - res_g) * half);
  if (res_asc != 0.0 && err != 0.0) {
    err = res_asc * std::min(1.0, std::pow(200.0 * err / res_asc, 1.5));
  }
  const double round_floor = 50.0 * std::numeric_limits<double>::epsilon() * res_abs;
  if (res_abs > std::numeric_limits<double>::min() / (50.0 * std::numeric_limits<double>::epsilon())) {
    err = std::max(err, round_floor);
  }
  if (!std::isfinite(value) || !std::isfinite(err)) {
    std::ostringstream msg;
    msg << "integrand not finite on [" << a << ", " << b << "]";
    throw NonConvergence(msg.str(), value, std::numeric_limits<double>::infinity());
  }
  return {a, b, value, err, depth};
}

QuadResult integrate_finite(const Integrand& f, double lower, double upper,
                            const QuadratureSpec& spec) {
  std::priority_queue<Segment> heap;
  heap.push(gk15(f, lower, upper, 0));
  double total = heap.top().value;
  double total_err = heap.top().error;
  int evaluations = 15;
  int splits = 0;
  std::vector<Segment> frozen;  // too deep to split further

  auto tolerance = [&] { return std::max(spec.abs_tol, spec.rel_tol * std::abs(total)); };

  while (total_err > tolerance()) {
    if (heap.empty() || splits >= spec.max_subdivisions) {
      std::ostringstream msg;
      msg << "quadrature did not converge on [" << lower << ", " << upper
          << "]: error " << total_err << " > tolerance " << tolerance();
      throw NonConvergence(msg.str(), total, total_err);
    }
    Segment worst = heap.top();
    heap.pop();
    if (worst.depth >= spec.max_depth) {
      frozen.push_back(worst);
      continue;
    }
    const double mid = 0.5 * (worst.a + worst.b);
    const Segment left = gk15(f, worst.a, mid, worst.depth + 1);
    const Segment right = gk15(f, mid, worst.b, worst.depth + 1);
    evaluations += 30;
    ++splits;
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }

  // Re-sum to drop accumulated cancellation in the running totals.
  double value = 0.0;
  double err = 0.0;
  for (const auto& s : frozen) {
    value += s.value;
    err += s.error;
  }
  while (!heap.empty()) {
    value += heap.top().value;
    err += heap.top().error;
    heap.pop();
  }
  return {value, err, evaluations};
}

}  // namespace

QuadResult integrate(const Integrand& f, double lower, double upper, const QuadratureSpec& spec) {
  if (spec.rel_tol <= 0.0 || spec.abs_tol <= 0.0 || spec.max_depth < 1) {
    throw std::invalid_argument("QuadratureSpec: tolerances must be positive and max_depth >= 1");
  }
  if (lower == upper) return {0.0, 0.0, 0};
  if (std::isinf(upper) && upper > 0.0) {
    const Integrand mapped = [&f, lower](double s) {
      const double one_minus = 1.0 - s;
      const double u = lower + s / one_minus;
      const double v = f(u);
      return v == 0.0 ? 0.0 : v / (one_minus * one_minus);
    };
    return integrate_finite(mapped, 0.0, 1.0, spec);
  }
  if (!std::isfinite(lower) || !std::isfinite(upper)) {
    throw std::invalid_argument("integrate: lower must be finite, upper finite or +inf");
  }
  if (upper < lower) {
    QuadResult r = integrate_finite(f, upper, lower, spec);
    r.value = -r.value;
    return r;
  }
  return integrate_finite(f, lower, upper, spec);
}

QuadResult integrate_tail(const Integrand& f, double lower, double scale,
                          const QuadratureSpec& spec) {
  const Integrand scaled = [&f, lower, scale](double w) { return scale * f(lower + scale * w); };
  return integrate(scaled, 0.0, std::numeric_limits<double>::infinity(), spec);
}

}  // namespace v2x
