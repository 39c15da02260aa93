// Acceptance suite: one [PASS]/[FAIL] line per criterion, details indented.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <tuple>
#include <vector>

#include "oracles.hpp"
#include "v2x/analytic.hpp"
#include "v2x/simulator.hpp"

using namespace v2x;

namespace {

// Sample sizes and tolerances.
constexpr std::uint64_t kAssocSamples = 1'000'000;
constexpr double kAssocAbsTol = 0.005;
constexpr double kAssocRuntimeSec = 120.0;
constexpr std::uint64_t kLimitSamples = 10'000'000;
constexpr double kLimitTol = 1e-3;
constexpr double kClassicTol = 1e-4;
constexpr std::uint64_t kCoverageSamples = 200'000;
constexpr double kCoverageRuntimeSec = 1800.0;
constexpr std::uint64_t kVoronoiSamples = 100'000;
constexpr double kNuTol = 0.02;
constexpr std::uint64_t kZeroCellSamples = 10'000;
constexpr int kZeroCellProbes = 10'000;
constexpr std::uint64_t kRateSamples = 200'000;
constexpr double kHalvingRelTol = 4e-16;
constexpr double kSmallTau = 1e-8;
constexpr double kSmallTauTol = 1e-5;
constexpr std::uint64_t kReproSamples = 5'000;
constexpr double kInvariantRuntimeSec = 300.0;
constexpr double kSigmas = 3.0;

NetworkConfig make(double lambda_l, double mu, double rho) {
  return NetworkConfig{lambda_l, mu, 5, 200, rho, 3, 1, 1, 0, 1, 0.5, 0.5};
}

std::vector<double> tau_grid() {
  std::vector<double> taus;
  for (int k = 0; k < 7; ++k) taus.push_back(std::pow(10.0, -1.0 + k / 3.0));
  return taus;
}

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

int failures = 0;

void verdict(bool ok, const std::string& label, const std::string& summary) {
  std::printf("[%s] %s: %s\n", ok ? "PASS" : "FAIL", label.c_str(), summary.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

template <class... Args>
void detail(const char* fmt, Args... args) {
  std::printf("    ");
  std::printf(fmt, args...);
  std::printf("\n");
}

template <class... Args>
std::string format(const char* fmt, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

void criterion_association() {
  Timer timer;
  bool ok = true;
  double worst = 0.0;
  std::uint64_t seed = 1000;
  for (double lambda_l : {2.0, 5.0, 10.0}) {
    for (double mu : {1.0, 5.0, 20.0}) {
      const NetworkConfig c = make(lambda_l, mu, 0.05);
      const auto exact = analytic::p_assoc_sl(lambda_l, mu, 0.05);
      const Estimate mc = estimate_association(c, default_plan(c, kAssocSamples, ++seed)).sidelink;
      const double diff = std::abs(mc.mean - exact.value);
      const bool row = diff <= kSigmas * mc.std_error + exact.est_abs_error && diff < kAssocAbsTol;
      ok = ok && row;
      worst = std::max(worst, diff);
      detail("lambda_l=%g mu=%g: analytic=%.6f mc=%.6f se=%.6f |d|=%.6f %s", lambda_l, mu, exact.value, mc.mean,
             mc.std_error, diff, row ? "ok" : "FAIL");
    }
  }
  const double t = timer.seconds();
  ok = ok && t < kAssocRuntimeSec;
  verdict(ok, "1 association cross-validation",
          format("9 grid points, max |d|=%.2e (<%.3g and <=3se), %.1fs (<%gs)", worst, kAssocAbsTol, t,
                 kAssocRuntimeSec));
}

void criterion_limit() {
  const double limit = 1.0 - std::exp(-0.5);
  const NetworkConfig c = make(5, 1e3, 0.05);
  const double a = analytic::p_assoc_sl(5, 1e3, 0.05).value;
  const Estimate mc = estimate_association(c, default_plan(c, kLimitSamples, 2001)).sidelink;
  const bool ok = std::abs(a - limit) < kLimitTol && std::abs(mc.mean - limit) < kLimitTol;
  verdict(ok, "2 dense-road limit",
          format("limit=%.5f analytic=%.5f mc=%.5f (se %.1e), tol %g", limit, a, mc.mean, mc.std_error, kLimitTol));
}

void criterion_classic() {
  NetworkConfig c = make(0, 5, 0.05);
  c.alpha = 4;
  bool ok = true;
  std::string summary;
  for (double tau : {0.1, 1.0, 10.0}) {
    const double v = analytic::dl_coverage(c, tau).value;
    const double o = oracle::classic_coverage_alpha4(tau);
    ok = ok && std::abs(v - o) <= kClassicTol;
    summary += format("tau=%g %.6f vs %.6f; ", tau, v, o);
  }
  verdict(ok, "3 roadless closed form", summary + format("tol %g", kClassicTol));
}

struct CoverageRows {
  bool ok = true;
  bool decomposition_mc = true;
  bool decomposition_analytic = true;
  bool invariants = true;
  int rows = 0;
  int failed = 0;
  double worst_z = 0.0;
};

CoverageRows coverage_rows;

void criterion_coverage() {
  Timer timer;
  const auto taus = tau_grid();
  std::uint64_t seed = 4000;
  for (const NetworkConfig& c : {make(5, 5, 0.05), make(5, 5, 0.15), make(2, 1, 0.05)}) {
    const SirRun run = simulate_sir(c, default_plan(c, kCoverageSamples, ++seed));
    const CoverageCurve curve = coverage_curve(run, taus);
    const double psl = analytic::p_assoc_sl(c.lambda_l, c.mu, c.rho).value;
    double prev_dl = 1.0;
    double prev_sl = 1.0;
    for (const auto& p : curve.points) {
      const auto dl = analytic::dl_coverage(c, p.tau);
      const auto sl = analytic::sl_coverage(c, p.tau);
      const auto total = analytic::total_coverage(c, p.tau);
      for (const auto& [name, a, e] : {std::tuple{"DL", dl, p.downlink}, std::tuple{"SL", sl, p.sidelink}}) {
        const double diff = std::abs(e.mean - a.value);
        const bool row = diff <= kSigmas * e.std_error + a.est_abs_error;
        const double z = (e.mean - a.value) / e.std_error;
        ++coverage_rows.rows;
        coverage_rows.failed += row ? 0 : 1;
        coverage_rows.worst_z = std::max(coverage_rows.worst_z, std::abs(z));
        detail("(%g,%g,%g) tau=%.4f %s analytic=%.6f mc=%.6f se=%.6f z=%+.2f %s", c.lambda_l, c.mu, c.rho, p.tau,
               name, a.value, e.mean, e.std_error, z, row ? "pass" : "fail");
      }
      const auto count = [](const Estimate& e) { return std::llround(e.mean * static_cast<double>(e.n_samples)); };
      coverage_rows.decomposition_mc = coverage_rows.decomposition_mc &&
                                       count(p.total) == count(p.sidelink) + count(p.downlink);
      coverage_rows.decomposition_analytic =
          coverage_rows.decomposition_analytic &&
          std::abs(total.value - (dl.value + sl.value)) <= dl.est_abs_error + sl.est_abs_error;
      // Analytic ledger properties on the same grid.
      coverage_rows.invariants = coverage_rows.invariants && dl.value <= prev_dl + dl.est_abs_error &&
                                 sl.value <= prev_sl + sl.est_abs_error && dl.value >= 0.0 && sl.value >= 0.0 &&
                                 dl.value <= 1.0 - psl + dl.est_abs_error && sl.value <= psl + sl.est_abs_error &&
                                 total.value <= 1.0 + total.est_abs_error;
      prev_dl = dl.value;
      prev_sl = sl.value;
    }
  }
  const double t = timer.seconds();
  coverage_rows.ok = coverage_rows.failed == 0 && t < kCoverageRuntimeSec;
  verdict(coverage_rows.ok, "4 coverage cross-validation",
          format("%d/%d rows pass 3se+quad rule, max |z|=%.2f, n=%llu per config, %.1fs (<%gs)",
                 coverage_rows.rows - coverage_rows.failed, coverage_rows.rows, coverage_rows.worst_z,
                 static_cast<unsigned long long>(kCoverageSamples), t, kCoverageRuntimeSec));
}

void criterion_decomposition() {
  verdict(coverage_rows.decomposition_mc && coverage_rows.decomposition_analytic, "5 decomposition identity",
          format("MC total == SL + DL hit counts on common samples: %s; analytic |total-(SL+DL)| <= summed "
                 "quadrature error: %s",
                 coverage_rows.decomposition_mc ? "yes" : "no", coverage_rows.decomposition_analytic ? "yes" : "no"));
}

void criterion_nu() {
  SimPlan plan;
  plan.n_samples = kVoronoiSamples;
  plan.seed = 6001;
  plan.window_radius = 10.0 / std::sqrt(std::numbers::pi);
  const Estimate e = estimate_voronoi_area_moment(1.0, plan);
  const bool ok = std::abs(e.mean - analytic::nu()) <= kNuTol;
  verdict(ok, "6 Voronoi second moment",
          format("lambda_b^2 E[A^2]=%.4f (se %.4f) vs %.2f, tol %g, %llu cells", e.mean, e.std_error, analytic::nu(),
                 kNuTol, static_cast<unsigned long long>(kVoronoiSamples)));
}

void criterion_zero_cell() {
  const NetworkConfig c = make(5, 5, 0.05);
  SimPlan plan = default_plan(c, kZeroCellSamples, 7001);
  plan.probes_per_cell = kZeroCellProbes;
  const ZeroCellAreaEstimate mc = estimate_zero_cell_areas(c, plan);
  const auto exact = analytic::mean_zero_cell_areas(c);
  const double z_in = (mc.in_region.mean - exact.in_region) / mc.in_region.std_error;
  const double z_out = (mc.outside.mean - exact.outside) / mc.outside.std_error;
  const bool ok = std::abs(z_in) <= kSigmas && std::abs(z_out) <= kSigmas;
  verdict(ok, "7 zero-cell areas",
          format("in D: mc=%.5f analytic=%.5f z=%+.2f; outside D: mc=%.5f analytic=%.5f z=%+.2f", mc.in_region.mean,
                 exact.in_region, z_in, mc.outside.mean, exact.outside, z_out));
}

void criterion_effective_rate() {
  NetworkConfig c = make(5, 5, 0.05);
  const auto exact = analytic::effective_rate(c);
  const EffectiveRateEstimate mc = estimate_effective_rate(c, default_plan(c, kRateSamples, 8001));
  const double z = (mc.rate.mean - exact.value) / mc.rate.std_error;
  const bool cross = std::abs(mc.rate.mean - exact.value) <= kSigmas * mc.rate.std_error + exact.est_abs_error;
  c.lambda_u *= 2.0;
  const auto doubled = analytic::effective_rate(c);
  const double rel = std::abs(doubled.value - exact.value / 2.0) / (exact.value / 2.0);
  verdict(cross && rel <= kHalvingRelTol, "8 effective rate",
          format("analytic=%.6f mc=%.6f (se %.6f, z=%+.2f, cap hits %llu); T(2 lambda_u)/(T/2)-1=%.1e (<=%.0e)",
                 exact.value, mc.rate.mean, mc.rate.std_error, z, static_cast<unsigned long long>(mc.cap_hits), rel,
                 kHalvingRelTol));
}

void criterion_shapes() {
  // Fig. 8/10 setting: 200 m association radius; w_d stays at the config value
  // while w_s is swept.
  NetworkConfig c{5, 5, 5, 200, 0.2, 3, 1, 1, 0, 1, 0.5, 0.5};
  const double tau = std::exp2(c.epsilon) - 1.0;
  std::vector<analytic::CoverageResult> sl;
  std::vector<analytic::CoverageResult> rate;
  for (int k = 1; k <= 10; ++k) {
    c.p_v = 0.1 * k;
    sl.push_back(analytic::sl_coverage(c, tau));
    rate.push_back(analytic::effective_rate(c));
  }
  bool utility_ok = true;
  std::string bad;
  for (int w = 1; w <= 9; ++w) {
    const double w_s = 0.1 * w;
    for (int k = 1; k < 10; ++k) {
      const double prev = w_s * sl[k - 1].value + c.w_d * rate[k - 1].value;
      const double next = w_s * sl[k].value + c.w_d * rate[k].value;
      const double slack = w_s * (sl[k - 1].est_abs_error + sl[k].est_abs_error) +
                           c.w_d * (rate[k - 1].est_abs_error + rate[k].est_abs_error);
      if (next < prev - slack) {
        utility_ok = false;
        bad += format(" w_s=%.1f eta=%.1f->%.1f;", w_s, 0.1 * k, 0.1 * (k + 1));
      }
    }
  }
  for (int k : {0, 9}) {
    detail("eta=%.1f: SL=%.6f T=%.6f U(w_s=0.1)=%.6f U(w_s=0.9)=%.6f", 0.1 * (k + 1), sl[k].value, rate[k].value,
           0.1 * sl[k].value + c.w_d * rate[k].value, 0.9 * sl[k].value + c.w_d * rate[k].value);
  }

  bool order_ok = true;
  std::string totals;
  for (double eta : {0.1, 0.5, 1.0}) {
    c.p_v = eta;
    double prev = std::numeric_limits<double>::infinity();
    for (double load : {20.0, 100.0, 200.0}) {
      c.lambda_u = load * c.lambda_b;
      const double t = analytic::total_rate(c).value;
      order_ok = order_ok && t < prev;
      prev = t;
      totals += format(" eta=%.1f,%g:%.5f", eta, load, t);
    }
  }
  detail("total rate:%s", totals.c_str());
  verdict(utility_ok && order_ok, "9 figure shapes",
          format("utility non-decreasing in eta for all w_s in 0.1..0.9 (w_d=%.1f): %s%s; total rate "
                 "20 > 100 > 200 users/BS at eta in {0.1,0.5,1}: %s",
                 c.w_d, utility_ok ? "yes" : "no", bad.c_str(), order_ok ? "yes" : "no"));
}

void criterion_invariants() {
  Timer timer;
  const NetworkConfig c = make(5, 5, 0.05);
  const auto taus = tau_grid();

  // Small-threshold limits.
  const double psl = analytic::p_assoc_sl(c.lambda_l, c.mu, c.rho).value;
  const double dl0 = analytic::dl_coverage(c, kSmallTau).value;
  const double sl0 = analytic::sl_coverage(c, kSmallTau).value;
  const bool limits = std::abs(dl0 - (1.0 - psl)) <= kSmallTauTol && std::abs(sl0 - psl) <= kSmallTauTol;

  // Monte Carlo: bit reproducibility, complementarity, monotonicity, dominance, bounds.
  SimPlan plan = default_plan(c, kReproSamples, 9001);
  const CoverageCurve a = estimate_coverage_curve(c, taus, plan);
  plan.threads = 2;
  const CoverageCurve b = estimate_coverage_curve(c, taus, plan);
  bool repro = true;
  bool mc_props = a.association.sidelink.mean + a.association.downlink.mean == 1.0;
  for (std::size_t k = 0; k < taus.size(); ++k) {
    const auto& p = a.points[k];
    const auto& q = b.points[k];
    repro = repro && p.sidelink.mean == q.sidelink.mean && p.downlink.mean == q.downlink.mean &&
            p.sidelink.std_error == q.sidelink.std_error && p.downlink.std_error == q.downlink.std_error;
    mc_props = mc_props && p.sidelink.mean <= a.association.sidelink.mean &&
               p.downlink.mean <= a.association.downlink.mean && p.total.mean >= 0.0 && p.total.mean <= 1.0;
    if (k > 0) {
      mc_props = mc_props && p.sidelink.mean <= a.points[k - 1].sidelink.mean &&
                 p.downlink.mean <= a.points[k - 1].downlink.mean;
    }
  }
  const AssociationEstimate a1 = estimate_association(c, default_plan(c, kReproSamples, 9002));
  const AssociationEstimate a2 = estimate_association(c, default_plan(c, kReproSamples, 9002));
  repro = repro && a1.sidelink.mean == a2.sidelink.mean && a1.sidelink.std_error == a2.sidelink.std_error;
  mc_props = mc_props && a1.sidelink.mean + a1.downlink.mean == 1.0;

  const double t = timer.seconds();
  const bool ok = limits && repro && mc_props && coverage_rows.invariants && t < kInvariantRuntimeSec;
  verdict(ok, "10 invariant suites",
          format("analytic monotone/dominance/bounds on criterion-4 grid: %s; tau->0 limits |d|=%.1e,%.1e (<=%g): %s; "
                 "MC monotone/dominance/bounds/complement: %s; seed reproducibility: %s; %.1fs (<%gs)",
                 coverage_rows.invariants ? "yes" : "no", std::abs(dl0 - (1.0 - psl)), std::abs(sl0 - psl),
                 kSmallTauTol, limits ? "yes" : "no", mc_props ? "yes" : "no", repro ? "yes" : "no", t,
                 kInvariantRuntimeSec));
}

}  // namespace

int main() {
  const std::vector<std::function<void()>> criteria{
      criterion_association, criterion_limit,       criterion_classic,         criterion_coverage,
      criterion_decomposition, criterion_nu,        criterion_zero_cell,       criterion_effective_rate,
      criterion_shapes,        criterion_invariants};
  for (const auto& run : criteria) {
    try {
      run();
    } catch (const std::exception& e) {
      std::printf("[FAIL] criterion aborted: %s\n", e.what());
      ++failures;
    }
  }
  std::printf("%d criterion failure(s)\n", failures);
  return failures == 0 ? 0 : 1;
}
