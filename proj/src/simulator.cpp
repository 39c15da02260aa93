#include "v2x/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "v2x/error.hpp"

namespace v2x {

namespace {

// RNG stream domains, so different estimators never share draws.
constexpr std::uint64_t kDomainSir = 1;
constexpr std::uint64_t kDomainAssociation = 2;
constexpr std::uint64_t kDomainZeroLoad = 3;
constexpr std::uint64_t kDomainZeroArea = 4;
constexpr std::uint64_t kDomainVoronoi = 5;

constexpr std::uint64_t kBlock = 256;

double exp_draw(RngStream& rng) { return -std::log1p(-rng.uniform()); }

/// Runs fn(i) for i in [0, n) on worker threads. Each index writes only its
/// own slot, so the outcome does not depend on the worker count.
template <class Fn>
void for_each_replication(std::uint64_t n, unsigned threads, Fn&& fn) {
  unsigned workers = threads != 0 ? threads : std::max(1u, std::thread::hardware_concurrency());
  const std::uint64_t blocks = (n + kBlock - 1) / kBlock;
  workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, std::max<std::uint64_t>(blocks, 1)));
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    try {
      for (std::uint64_t b = next++; b < blocks; b = next++) {
        const std::uint64_t end = std::min(n, (b + 1) * kBlock);
        for (std::uint64_t i = b * kBlock; i < end; ++i) fn(i);
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next = blocks;
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
}

/// Welford accumulation, fed in replication order.
class RunningStats {
 public:
  void add(double x) {
    ++n_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(n_);
    m2_ += delta * (x - mean_);
  }

  Estimate estimate(std::uint64_t seed) const {
    Estimate e;
    e.mean = mean_;
    e.n_samples = n_;
    e.seed = seed;
    e.std_error = n_ > 1 ? std::sqrt(m2_ / static_cast<double>(n_ - 1) / static_cast<double>(n_)) : 0.0;
    return e;
  }

 private:
  std::uint64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

/// Mean of indicators given as a count; keeps complementary estimates exact.
Estimate proportion(std::uint64_t hits, std::uint64_t n, std::uint64_t seed) {
  Estimate e;
  e.n_samples = n;
  e.seed = seed;
  if (n == 0) return e;
  const double nd = static_cast<double>(n);
  e.mean = static_cast<double>(hits) / nd;
  if (n > 1) {
    const double var = static_cast<double>(hits) * static_cast<double>(n - hits) / (nd * (nd - 1.0));
    e.std_error = std::sqrt(var / nd);
  }
  return e;
}

double pathloss(double d, double alpha) { return std::pow(d, -alpha); }

/// Zero cell of one replication: nucleus = base station closest to the origin.
struct ZeroCell {
  Polygon cell;
  Point2 lo;
  Point2 hi;
  std::vector<Vehicle> nearby;  // vehicles that can reach the cell's box within rho

  bool in_region(Point2 p, double rho) const {
    const double rho2 = rho * rho;
    for (const auto& v : nearby) {
      const double dx = v.position.x - p.x;
      const double dy = v.position.y - p.y;
      if (dx * dx + dy * dy <= rho2) return true;
    }
    return false;
  }
};

std::optional<ZeroCell> zero_cell(const NetworkConfig& cfg, const Realization& real) {
  if (real.base_stations.empty()) return std::nullopt;
  const auto nucleus = nearest(real.base_stations, Point2{}).index;
  ZeroCell z;
  z.cell = voronoi_cell(real.base_stations, nucleus, real.window_radius);
  std::tie(z.lo, z.hi) = z.cell.bounding_box();
  for (const auto& v : real.vehicles.vehicles) {
    if (v.position.x >= z.lo.x - cfg.rho && v.position.x <= z.hi.x + cfg.rho &&
        v.position.y >= z.lo.y - cfg.rho && v.position.y <= z.hi.y + cfg.rho) {
      z.nearby.push_back(v);
    }
  }
  return z;
}

Realization sample_with_base_station(const NetworkConfig& cfg, const SimPlan& plan, RngStream& rng,
                                     std::uint64_t& degenerate) {
  for (;;) {
    Realization real = sample_realization(cfg, plan.window_radius, plan.time, rng);
    if (!real.base_stations.empty()) return real;
    ++degenerate;
  }
}

void check_degenerate(std::uint64_t degenerate, std::uint64_t n) {
  if (static_cast<double>(degenerate) >= 1e-6 * static_cast<double>(n)) {
    throw std::runtime_error("aborting: " + std::to_string(degenerate) +
                             " realizations without a base station; enlarge the window");
  }
}

}  // namespace

double default_window_radius(const NetworkConfig& cfg) {
  double radius = std::max(10.0 * cfg.rho, 10.0 / std::sqrt(std::numbers::pi * cfg.lambda_b));
  const double vehicles_per_km2 = cfg.lambda_l * cfg.mu;  // pi * (lambda_l mu / pi)
  if (vehicles_per_km2 > 0.0) radius = std::max(radius, 10.0 / std::sqrt(vehicles_per_km2));
  return radius;
}

SimPlan default_plan(const NetworkConfig& cfg, std::uint64_t n_samples, std::uint64_t seed) {
  SimPlan plan;
  plan.window_radius = default_window_radius(cfg);
  plan.n_samples = n_samples;
  plan.seed = seed;
  plan.guard_note =
      "default disk window; out-of-window interference folded in exactly; "
      "window-doubling check bounds residual geometry truncation";
  return plan;
}

void validate_plan(const NetworkConfig& cfg, const SimPlan& plan) {
  if (plan.n_samples < 1) throw std::invalid_argument("n_samples must be ≥ 1");
  const double tol = 1e-12 * plan.window_radius;
  if (plan.window_radius + tol < 10.0 * cfg.rho) {
    throw std::invalid_argument("window_radius must be at least 10 rho");
  }
  if (plan.window_radius + tol < 10.0 / std::sqrt(std::numbers::pi * cfg.lambda_b)) {
    throw std::invalid_argument("window_radius must be at least 10/sqrt(pi lambda_b)");
  }
  if (plan.time < 0.0) throw std::invalid_argument("time must be nonnegative");
}

Realization sample_realization(const NetworkConfig& cfg, double window_radius, double time,
                               RngStream& rng) {
  Realization real;
  real.window_radius = window_radius;
  real.lines = sample_lines(cfg.lambda_l, window_radius, rng);
  const double travel = cfg.speed * time;
  if (travel > 0.0) {
    // Widen every chord by the travel distance so that the vehicles entering
    // the window by time t are present at t = 0.
    const VehicleSet start = sample_vehicles(real.lines, cfg.mu, rng, travel);
    real.vehicles = advance_vehicles(start, real.lines, cfg.speed, time);
  } else {
    real.vehicles = sample_vehicles(real.lines, cfg.mu, rng);
  }
  real.base_stations = sample_planar_ppp(cfg.lambda_b, window_radius, rng);
  return real;
}

SirSample sample_sir(const Realization& real, const NetworkConfig& cfg, RngStream& rng,
                     const FarField* far_field) {
  const auto& vehicles = real.vehicles.vehicles;
  const auto& stations = real.base_stations;

  std::size_t serving_vehicle = vehicles.size();
  double best_vehicle_d2 = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < vehicles.size(); ++i) {
    const auto& p = vehicles[i].position;
    const double d2 = p.x * p.x + p.y * p.y;
    if (d2 < best_vehicle_d2) {
      best_vehicle_d2 = d2;
      serving_vehicle = i;
    }
  }
  const bool sidelink = serving_vehicle < vehicles.size() && best_vehicle_d2 <= cfg.rho * cfg.rho;

  SirSample out;
  std::size_t serving_station = stations.size();
  double serving_power = 0.0;
  if (sidelink) {
    out.association = Association::Sidelink;
    out.serving_distance = std::sqrt(best_vehicle_d2);
    serving_power = cfg.p_v;
  } else {
    if (stations.empty()) {
      throw DegenerateRealization("no base station in the window and no vehicle within rho");
    }
    const auto near = nearest(stations, Point2{});
    serving_station = near.index;
    out.association = Association::Downlink;
    out.serving_distance = near.distance;
    serving_power = cfg.p_b;
  }

  const double signal = serving_power * exp_draw(rng) * pathloss(out.serving_distance, cfg.alpha);
  double interference = 0.0;
  for (std::size_t i = 0; i < vehicles.size(); ++i) {
    if (sidelink && i == serving_vehicle) continue;
    interference += cfg.p_v * exp_draw(rng) * pathloss(norm(vehicles[i].position), cfg.alpha);
  }
  for (std::size_t i = 0; i < stations.size(); ++i) {
    if (!sidelink && i == serving_station) continue;
    interference += cfg.p_b * exp_draw(rng) * pathloss(norm(stations[i]), cfg.alpha);
  }
  out.sir = interference > 0.0 ? signal / interference : std::numeric_limits<double>::infinity();

  if (far_field != nullptr) {
    const double reach = std::pow(out.serving_distance, cfg.alpha) / serving_power;
    out.sir = far_field->clip_sir(out.sir, exp_draw(rng), reach * cfg.p_b, reach * cfg.p_v,
                                  real.lines.lines);
  }
  return out;
}

SirRun simulate_sir(const NetworkConfig& cfg, const SimPlan& plan) {
  validate_plan(cfg, plan);
  std::optional<FarField> far;
  if (plan.far_field) far.emplace(cfg, plan.window_radius);

  SirRun run;
  run.window_radius = plan.window_radius;
  run.seed = plan.seed;
  run.samples.resize(plan.n_samples);
  std::vector<std::uint32_t> degenerate(plan.n_samples, 0);
  for_each_replication(plan.n_samples, plan.threads, [&](std::uint64_t i) {
    RngStream rng(plan.seed, kDomainSir, i);
    std::uint64_t resampled = 0;
    const Realization real = sample_with_base_station(cfg, plan, rng, resampled);
    degenerate[i] = static_cast<std::uint32_t>(resampled);
    run.samples[i] = sample_sir(real, cfg, rng, far ? &*far : nullptr);
  });
  for (auto d : degenerate) run.degenerate += d;
  check_degenerate(run.degenerate, plan.n_samples);
  return run;
}

AssociationEstimate estimate_association(const NetworkConfig& cfg, const SimPlan& plan) {
  validate_plan(cfg, plan);
  std::vector<std::uint8_t> hit(plan.n_samples, 0);
  if (cfg.rho > 0.0) {
    // Association only depends on vehicles inside B(0, rho), so lines and
    // vehicles are drawn on that disk alone.
    const double disk = std::min(cfg.rho, plan.window_radius);
    const double travel = cfg.speed * plan.time;
    for_each_replication(plan.n_samples, plan.threads, [&](std::uint64_t i) {
      RngStream rng(plan.seed, kDomainAssociation, i);
      const LineSet lines = sample_lines(cfg.lambda_l, disk, rng);
      VehicleSet vehicles;
      if (travel > 0.0) {
        vehicles = advance_vehicles(sample_vehicles(lines, cfg.mu, rng, travel), lines, cfg.speed,
                                    plan.time);
      } else {
        vehicles = sample_vehicles(lines, cfg.mu, rng);
      }
      hit[i] = in_vehicle_region(Point2{}, vehicles, cfg.rho) ? 1 : 0;
    });
  }
  std::uint64_t sl = 0;
  for (auto h : hit) sl += h;
  return {proportion(sl, plan.n_samples, plan.seed),
          proportion(plan.n_samples - sl, plan.n_samples, plan.seed)};
}

CoverageCurve coverage_curve(const SirRun& run, const std::vector<double>& taus) {
  for (double tau : taus) {
    if (!(tau > 0.0)) throw std::invalid_argument("tau must be positive");
  }
  const std::uint64_t n = run.samples.size();
  std::uint64_t sl_assoc = 0;
  std::vector<std::uint64_t> sl(taus.size(), 0);
  std::vector<std::uint64_t> dl(taus.size(), 0);
  for (const auto& s : run.samples) {
    const bool is_sl = s.association == Association::Sidelink;
    sl_assoc += is_sl ? 1 : 0;
    for (std::size_t k = 0; k < taus.size(); ++k) {
      if (s.sir > taus[k]) ++(is_sl ? sl[k] : dl[k]);
    }
  }
  CoverageCurve curve;
  curve.association = {proportion(sl_assoc, n, run.seed), proportion(n - sl_assoc, n, run.seed)};
  for (std::size_t k = 0; k < taus.size(); ++k) {
    curve.points.push_back({taus[k], proportion(sl[k], n, run.seed), proportion(dl[k], n, run.seed),
                            proportion(sl[k] + dl[k], n, run.seed)});
  }
  return curve;
}

CoverageCurve estimate_coverage_curve(const NetworkConfig& cfg, const std::vector<double>& taus,
                                      const SimPlan& plan) {
  return coverage_curve(simulate_sir(cfg, plan), taus);
}

Estimate estimate_coverage(const NetworkConfig& cfg, double tau, Link link, const SimPlan& plan) {
  const CoveragePoint p = estimate_coverage_curve(cfg, {tau}, plan).points.front();
  switch (link) {
    case Link::SL: return p.sidelink;
    case Link::DL: return p.downlink;
    case Link::Total: return p.total;
  }
  return p.total;
}

RateSummary mean_dl_rate(const SirRun& run) {
  RunningStats stats;
  RateSummary out;
  for (const auto& s : run.samples) {
    double bits = 0.0;
    if (s.association == Association::Downlink) {
      bits = std::log2(1.0 + s.sir);
      if (!(bits <= kRateCapBits)) {
        bits = kRateCapBits;
        ++out.cap_hits;
      }
    }
    stats.add(bits);
  }
  out.mean_dl_rate = stats.estimate(run.seed);
  return out;
}

Estimate estimate_zero_cell_load(const NetworkConfig& cfg, const SimPlan& plan) {
  validate_plan(cfg, plan);
  std::vector<double> load(plan.n_samples, 0.0);
  std::vector<std::uint32_t> degenerate(plan.n_samples, 0);
  for_each_replication(plan.n_samples, plan.threads, [&](std::uint64_t i) {
    RngStream rng(plan.seed, kDomainZeroLoad, i);
    std::uint64_t resampled = 0;
    const Realization real = sample_with_base_station(cfg, plan, rng, resampled);
    degenerate[i] = static_cast<std::uint32_t>(resampled);
    const auto z = zero_cell(cfg, real);
    // Users outside the cell's bounding box cannot belong to it, so the user
    // PPP is drawn on the box only.
    const double width = z->hi.x - z->lo.x;
    const double height = z->hi.y - z->lo.y;
    const auto users = sample_poisson(cfg.lambda_u * width * height, rng);
    std::uint64_t count = 0;
    for (std::uint64_t k = 0; k < users; ++k) {
      const Point2 u{z->lo.x + width * rng.uniform(), z->lo.y + height * rng.uniform()};
      if (z->cell.contains(u) && !z->in_region(u, cfg.rho)) ++count;
    }
    load[i] = static_cast<double>(count);
  });
  std::uint64_t total_degenerate = 0;
  for (auto d : degenerate) total_degenerate += d;
  check_degenerate(total_degenerate, plan.n_samples);
  RunningStats stats;
  for (double x : load) stats.add(x);
  return stats.estimate(plan.seed);
}

ZeroCellAreaEstimate estimate_zero_cell_areas(const NetworkConfig& cfg, const SimPlan& plan) {
  validate_plan(cfg, plan);
  if (plan.probes_per_cell < 1) throw std::invalid_argument("probes_per_cell must be >= 1");
  std::vector<std::pair<double, double>> areas(plan.n_samples);
  std::vector<std::uint32_t> degenerate(plan.n_samples, 0);
  for_each_replication(plan.n_samples, plan.threads, [&](std::uint64_t i) {
    RngStream rng(plan.seed, kDomainZeroArea, i);
    std::uint64_t resampled = 0;
    const Realization real = sample_with_base_station(cfg, plan, rng, resampled);
    degenerate[i] = static_cast<std::uint32_t>(resampled);
    const auto z = zero_cell(cfg, real);
    const double width = z->hi.x - z->lo.x;
    const double height = z->hi.y - z->lo.y;
    std::uint64_t inside = 0;
    std::uint64_t outside = 0;
    for (int k = 0; k < plan.probes_per_cell; ++k) {
      const Point2 p{z->lo.x + width * rng.uniform(), z->lo.y + height * rng.uniform()};
      if (!z->cell.contains(p)) continue;
      ++(z->in_region(p, cfg.rho) ? inside : outside);
    }
    const double per_probe = width * height / plan.probes_per_cell;
    areas[i] = {per_probe * static_cast<double>(inside), per_probe * static_cast<double>(outside)};
  });
  std::uint64_t total_degenerate = 0;
  for (auto d : degenerate) total_degenerate += d;
  check_degenerate(total_degenerate, plan.n_samples);
  RunningStats in;
  RunningStats out;
  for (const auto& [a, b] : areas) {
    in.add(a);
    out.add(b);
  }
  return {in.estimate(plan.seed), out.estimate(plan.seed)};
}

EffectiveRateEstimate estimate_effective_rate(const NetworkConfig& cfg, const SimPlan& plan) {
  const RateSummary numerator = mean_dl_rate(simulate_sir(cfg, plan));
  const Estimate load = estimate_zero_cell_load(cfg, plan);
  EffectiveRateEstimate out;
  out.numerator = numerator.mean_dl_rate;
  out.load = load;
  out.cap_hits = numerator.cap_hits;
  out.rate.n_samples = plan.n_samples;
  out.rate.seed = plan.seed;
  out.rate.mean = numerator.mean_dl_rate.mean / load.mean;
  // Delta method; the two estimates come from independent streams.
  const double rel_n = numerator.mean_dl_rate.std_error / numerator.mean_dl_rate.mean;
  const double rel_d = load.std_error / load.mean;
  out.rate.std_error = std::abs(out.rate.mean) * std::sqrt(rel_n * rel_n + rel_d * rel_d);
  return out;
}

Estimate estimate_voronoi_area_moment(double lambda_b, const SimPlan& plan) {
  if (!(lambda_b > 0.0)) throw std::invalid_argument("lambda_b must be positive");
  if (plan.n_samples < 1) throw std::invalid_argument("n_samples must be ≥ 1");
  if (plan.window_radius < 10.0 / std::sqrt(std::numbers::pi * lambda_b)) {
    throw std::invalid_argument("window_radius must be at least 10/sqrt(pi lambda_b)");
  }
  std::vector<double> squares(plan.n_samples, 0.0);
  for_each_replication(plan.n_samples, plan.threads, [&](std::uint64_t i) {
    RngStream rng(plan.seed, kDomainVoronoi, i);
    // Slivnyak: the Palm version is the PPP plus a point at the origin.
    std::vector<Point2> points{Point2{}};
    const auto rest = sample_planar_ppp(lambda_b, plan.window_radius, rng);
    points.insert(points.end(), rest.begin(), rest.end());
    const double area = voronoi_cell(points, 0, plan.window_radius).area();
    squares[i] = area * area;
  });
  RunningStats stats;
  for (double x : squares) stats.add(x);
  return stats.estimate(plan.seed);
}

}  // namespace v2x
