#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "v2x/rng.hpp"

namespace v2x {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  bool operator==(const Point2&) const = default;
};

double distance(Point2 a, Point2 b);
double norm(Point2 p);

/// Undirected line {p : p . n(theta) = r} with unit normal
/// n(theta) = (-sin theta, cos theta); theta in [0, pi).
struct Line {
  double r = 0.0;
  double theta = 0.0;

  Point2 foot() const;
  Point2 direction() const;
  Point2 at(double offset) const;
};

struct LineSet {
  std::vector<Line> lines;
  double window_radius = 0.0;
};

struct Vehicle {
  Point2 position;
  std::size_t line_index = 0;
  double offset = 0.0;  // signed km along the line from its foot point
  int direction = 1;    // +1 or -1
};

struct VehicleSet {
  std::vector<Vehicle> vehicles;
};

struct Realization {
  LineSet lines;
  VehicleSet vehicles;
  std::vector<Point2> base_stations;
  double window_radius = 0.0;
  std::uint64_t seed = 0;
};

/// Half-length of the chord a line at signed distance r cuts from the disk of
/// radius R centred at the origin. Throws std::domain_error when |r| > R.
double chord_half_length(double r, double window_radius);

std::uint64_t sample_poisson(double mean, RngStream& rng);

/// Lines hitting the disk of radius R: count ~ Poisson(2 lambda_l R),
/// r ~ U(-R, R), theta ~ U(0, pi).
LineSet sample_lines(double lambda_l, double window_radius, RngStream& rng);

/// Poisson(mu) vehicles on every line, restricted to the window chord widened
/// by `margin` at both ends. Directions are +-1 with probability 1/2.
VehicleSet sample_vehicles(const LineSet& lines, double mu, RngStream& rng, double margin = 0.0);

/// Homogeneous PPP on the disk of radius R.
std::vector<Point2> sample_planar_ppp(double lambda, double window_radius, RngStream& rng);

struct NearestResult {
  Point2 point;
  double distance = 0.0;
  std::size_t index = 0;
};

/// Closest point to `query`, ties broken by lowest index. Throws EmptySetError.
NearestResult nearest(std::span<const Point2> points, Point2 query);

/// True iff some vehicle lies in the closed ball of radius rho around query.
bool in_vehicle_region(Point2 query, const VehicleSet& vehicles, double rho);

/// Moves every vehicle by direction * speed * t along its line, then drops the
/// ones that left their window chord.
VehicleSet advance_vehicles(const VehicleSet& vehicles, const LineSet& lines, double speed, double t);

/// Convex polygon, counter-clockwise vertices.
struct Polygon {
  std::vector<Point2> vertices;

  double area() const;
  bool contains(Point2 p) const;
  std::pair<Point2, Point2> bounding_box() const;
};

/// Voronoi cell of `points[nucleus]` within the axis-aligned square of
/// half-side `half_extent` centred at the origin, by successive half-plane
/// clipping with the bisectors of the other points.
Polygon voronoi_cell(std::span<const Point2> points, std::size_t nucleus, double half_extent);

std::string to_json(const Realization& real);
Realization realization_from_json(const std::string& text);

}  // namespace v2x
