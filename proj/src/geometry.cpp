#include "v2x/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include <json.hpp>

#include "v2x/error.hpp"

namespace v2x {

double distance(Point2 a, Point2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

double norm(Point2 p) { return std::hypot(p.x, p.y); }

Point2 Line::foot() const { return {-r * std::sin(theta), r * std::cos(theta)}; }

Point2 Line::direction() const { return {std::cos(theta), std::sin(theta)}; }

Point2 Line::at(double offset) const {
  const double s = std::sin(theta);
  const double c = std::cos(theta);
  return {-r * s + offset * c, r * c + offset * s};
}

double chord_half_length(double r, double window_radius) {
  if (std::abs(r) > window_radius) {
    throw std::domain_error("chord_half_length: |r| exceeds window radius");
  }
  return std::sqrt((window_radius - r) * (window_radius + r));
}

std::uint64_t sample_poisson(double mean, RngStream& rng) {
  if (mean <= 0.0) return 0;
  std::poisson_distribution<std::int64_t> dist(mean);
  return static_cast<std::uint64_t>(dist(rng));
}

LineSet sample_lines(double lambda_l, double window_radius, RngStream& rng) {
  LineSet out;
  out.window_radius = window_radius;
  const auto count = sample_poisson(2.0 * lambda_l * window_radius, rng);
  out.lines.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    const double r = window_radius * (2.0 * rng.uniform() - 1.0);
    const double theta = std::numbers::pi * rng.uniform();
    out.lines.push_back({r, theta});
  }
  return out;
}

VehicleSet sample_vehicles(const LineSet& lines, double mu, RngStream& rng, double margin) {
  VehicleSet out;
  if (mu <= 0.0) return out;
  for (std::size_t i = 0; i < lines.lines.size(); ++i) {
    const Line& line = lines.lines[i];
    const double half = chord_half_length(line.r, lines.window_radius) + margin;
    const auto count = sample_poisson(2.0 * mu * half, rng);
    for (std::uint64_t k = 0; k < count; ++k) {
      const double offset = half * (2.0 * rng.uniform() - 1.0);
      const int dir = (rng() >> 63) != 0 ? 1 : -1;
      out.vehicles.push_back({line.at(offset), i, offset, dir});
    }
  }
  return out;
}

std::vector<Point2> sample_planar_ppp(double lambda, double window_radius, RngStream& rng) {
  std::vector<Point2> out;
  const auto count =
      sample_poisson(lambda * std::numbers::pi * window_radius * window_radius, rng);
  out.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    const double rad = window_radius * std::sqrt(rng.uniform());
    const double ang = 2.0 * std::numbers::pi * rng.uniform();
    out.push_back({rad * std::cos(ang), rad * std::sin(ang)});
  }
  return out;
}

NearestResult nearest(std::span<const Point2> points, Point2 query) {
  if (points.empty()) throw EmptySetError("nearest: empty point set");
  std::size_t best = 0;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double dx = points[i].x - query.x;
    const double dy = points[i].y - query.y;
    const double d2 = dx * dx + dy * dy;
    if (d2 < best_d2) {
      best_d2 = d2;
      best = i;
    }
  }
  return {points[best], std::sqrt(best_d2), best};
}

bool in_vehicle_region(Point2 query, const VehicleSet& vehicles, double rho) {
  const double rho2 = rho * rho;
  for (const auto& v : vehicles.vehicles) {
    const double dx = v.position.x - query.x;
    const double dy = v.position.y - query.y;
    if (dx * dx + dy * dy <= rho2) return true;
  }
  return false;
}

VehicleSet advance_vehicles(const VehicleSet& vehicles, const LineSet& lines, double speed,
                            double t) {
  if (speed == 0.0 || t == 0.0) return vehicles;
  VehicleSet out;
  out.vehicles.reserve(vehicles.vehicles.size());
  for (const auto& v : vehicles.vehicles) {
    const Line& line = lines.lines.at(v.line_index);
    const double half = chord_half_length(line.r, lines.window_radius);
    const double moved = v.offset + v.direction * speed * t;
    if (std::abs(moved) > half) continue;
    out.vehicles.push_back({line.at(moved), v.line_index, moved, v.direction});
  }
  return out;
}

double Polygon::area() const {
  double twice = 0.0;
  const std::size_t n = vertices.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& a = vertices[i];
    const Point2& b = vertices[(i + 1) % n];
    twice += a.x * b.y - b.x * a.y;
  }
  return 0.5 * twice;
}

bool Polygon::contains(Point2 p) const {
  const std::size_t n = vertices.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& a = vertices[i];
    const Point2& b = vertices[(i + 1) % n];
    if ((b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x) < 0.0) return false;
  }
  return true;
}

std::pair<Point2, Point2> Polygon::bounding_box() const {
  Point2 lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  Point2 hi{-lo.x, -lo.y};
  for (const auto& v : vertices) {
    lo.x = std::min(lo.x, v.x);
    lo.y = std::min(lo.y, v.y);
    hi.x = std::max(hi.x, v.x);
    hi.y = std::max(hi.y, v.y);
  }
  return {lo, hi};
}

namespace {

// Keeps the part of `poly` with (p - z) . d <= h.
std::vector<Point2> clip_half_plane(const std::vector<Point2>& poly, Point2 z, Point2 d, double h) {
  std::vector<Point2> out;
  out.reserve(poly.size() + 1);
  const std::size_t n = poly.size();
  auto side = [&](Point2 p) { return (p.x - z.x) * d.x + (p.y - z.y) * d.y - h; };
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = poly[i];
    const Point2 b = poly[(i + 1) % n];
    const double sa = side(a);
    const double sb = side(b);
    if (sa <= 0.0) out.push_back(a);
    if ((sa < 0.0 && sb > 0.0) || (sa > 0.0 && sb < 0.0)) {
      const double t = sa / (sa - sb);
      out.push_back({a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)});
    }
  }
  return out;
}

}  // namespace

Polygon voronoi_cell(std::span<const Point2> points, std::size_t nucleus, double half_extent) {
  const Point2 z = points[nucleus];
  std::vector<Point2> poly{{-half_extent, -half_extent},
                           {half_extent, -half_extent},
                           {half_extent, half_extent},
                           {-half_extent, half_extent}};

  std::vector<std::pair<double, std::size_t>> order;
  order.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (i == nucleus) continue;
    const double dx = points[i].x - z.x;
    const double dy = points[i].y - z.y;
    order.emplace_back(dx * dx + dy * dy, i);
  }
  std::sort(order.begin(), order.end());

  for (const auto& [d2, idx] : order) {
    double reach2 = 0.0;
    for (const auto& v : poly) {
      const double dx = v.x - z.x;
      const double dy = v.y - z.y;
      reach2 = std::max(reach2, dx * dx + dy * dy);
    }
    // A bisector at distance sqrt(d2)/2 from z cannot cut a polygon whose
    // vertices all lie within that distance; later points are farther still.
    if (d2 > 4.0 * reach2) break;
    const Point2 d{points[idx].x - z.x, points[idx].y - z.y};
    poly = clip_half_plane(poly, z, d, 0.5 * d2);
    if (poly.empty()) break;
  }
  return Polygon{std::move(poly)};
}

std::string to_json(const Realization& real) {
  nlohmann::ordered_json doc;
  doc["seed"] = real.seed;
  doc["window_radius"] = real.window_radius;
  auto& lines = doc["lines"] = nlohmann::json::array();
  for (const auto& l : real.lines.lines) lines.push_back({l.r, l.theta});
  auto& vehicles = doc["vehicles"] = nlohmann::json::array();
  for (const auto& v : real.vehicles.vehicles) {
    vehicles.push_back({{"x", v.position.x},
                        {"y", v.position.y},
                        {"line", v.line_index},
                        {"offset", v.offset},
                        {"direction", v.direction}});
  }
  auto& bs = doc["base_stations"] = nlohmann::json::array();
  for (const auto& p : real.base_stations) bs.push_back({p.x, p.y});
  return doc.dump();
}

Realization realization_from_json(const std::string& text) {
  const auto doc = nlohmann::json::parse(text);
  Realization real;
  real.seed = doc.at("seed").get<std::uint64_t>();
  real.window_radius = doc.at("window_radius").get<double>();
  real.lines.window_radius = real.window_radius;
  for (const auto& l : doc.at("lines")) real.lines.lines.push_back({l.at(0), l.at(1)});
  for (const auto& v : doc.at("vehicles")) {
    real.vehicles.vehicles.push_back({{v.at("x"), v.at("y")},
                                      v.at("line").get<std::size_t>(),
                                      v.at("offset").get<double>(),
                                      v.at("direction").get<int>()});
  }
  for (const auto& p : doc.at("base_stations")) real.base_stations.push_back({p.at(0), p.at(1)});
  return real;
}

}  // namespace v2x
