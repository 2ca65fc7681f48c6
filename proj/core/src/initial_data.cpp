#include "msflow/initial_data.hpp"

#include "msflow/system_assembly.hpp"

#include <cmath>
#include <numbers>

namespace msflow {

namespace {

constexpr double kPi = std::numbers::pi;

/// Area between a circular arc and its chord of half-length 1, tangent-chord angle psi.
double segment_area(double psi) {
  if (psi == 0.0) return 0.0;
  const double r = 1.0 / std::sin(psi);
  return 0.5 * r * r * (2.0 * psi - std::sin(2.0 * psi));
}

double signed_segment_area(double mu) { return mu >= 0.0 ? segment_area(mu) : -segment_area(-mu); }

/// (left, right) areas for half-chord 1.
std::array<double, 2> bubble_areas(double mu) {
  const double psi_r = 2.0 * kPi / 3.0 + mu;
  const double psi_l = 2.0 * kPi / 3.0 - mu;
  return {segment_area(psi_l) + signed_segment_area(mu), segment_area(psi_r) - signed_segment_area(mu)};
}

/// Arc from (0, y) to (0, -y) relative to the origin, bulging to side `side`.
std::vector<Vec2> arc_points(double y, double psi, int side, std::size_t n, const Vec2& center) {
  std::vector<Vec2> pts(n);
  if (psi == 0.0) {
    for (std::size_t k = 0; k < n; ++k) {
      const double s = static_cast<double>(k) / static_cast<double>(n - 1);
      pts[k] = center + Vec2(0.0, y * (1.0 - 2.0 * s));
    }
  } else {
    const double r = y / std::sin(psi);
    for (std::size_t k = 0; k < n; ++k) {
      const double phi = psi - 2.0 * psi * static_cast<double>(k) / static_cast<double>(n - 1);
      // r (cos phi - cos psi) without cancellation for flat arcs
      const double x = -2.0 * r * std::sin(0.5 * (phi + psi)) * std::sin(0.5 * (phi - psi));
      pts[k] = center + Vec2(side * x, r * std::sin(phi));
    }
  }
  pts.front() = center + Vec2(0.0, y);
  pts.back() = center + Vec2(0.0, -y);
  return pts;
}

}  // namespace

std::string to_string(GeometryType type) {
  switch (type) {
    case GeometryType::DoubleBubble:
      return "double_bubble";
    case GeometryType::DoubleBubblePlusDisk:
      return "double_bubble_plus_disk";
    case GeometryType::TwoDoubleBubbles:
      return "two_double_bubbles";
    case GeometryType::SeedDoubleBubble:
      return "seed_double_bubble";
    case GeometryType::Polylines:
      return "polylines";
  }
  return "double_bubble";
}

GeometryType geometry_type_from_string(const std::string& name) {
  for (GeometryType t : {GeometryType::DoubleBubble, GeometryType::DoubleBubblePlusDisk, GeometryType::TwoDoubleBubbles,
                         GeometryType::SeedDoubleBubble, GeometryType::Polylines}) {
    if (to_string(t) == name) return t;
  }
  throw ConfigError("unknown geometry type '" + name + "'");
}

bool GeometrySpec::operator==(const GeometrySpec& o) const {
  if (type != o.type || vertices_per_curve != o.vertices_per_curve || bubbles.size() != o.bubbles.size() ||
      disks.size() != o.disks.size() || curves.size() != o.curves.size() || junctions.size() != o.junctions.size()) {
    return false;
  }
  for (std::size_t i = 0; i < bubbles.size(); ++i)
    if (bubbles[i].areas != o.bubbles[i].areas || bubbles[i].center != o.bubbles[i].center) return false;
  for (std::size_t i = 0; i < disks.size(); ++i)
    if (disks[i].radius != o.disks[i].radius || disks[i].center != o.disks[i].center) return false;
  for (std::size_t i = 0; i < curves.size(); ++i)
    if (curves[i].closed != o.curves[i].closed || curves[i].vertices != o.curves[i].vertices) return false;
  for (std::size_t i = 0; i < junctions.size(); ++i)
    if (junctions[i].curves != o.junctions[i].curves || junctions[i].vertices != o.junctions[i].vertices) return false;
  return true;
}

DoubleBubbleShape solve_double_bubble(double area_left, double area_right) {
  if (!(area_left > 0.0) || !(area_right > 0.0)) throw ConfigError("double bubble areas must be positive");
  const double target = area_right / area_left;
  // right/left grows monotonically with mu on (-pi/3, pi/3).
  double lo = -kPi / 3.0 + 1e-9;
  double hi = kPi / 3.0 - 1e-9;
  auto ratio = [](double mu) {
    const auto a = bubble_areas(mu);
    return a[1] / a[0];
  };
  if (target < ratio(lo) || target > ratio(hi)) throw ConfigError("infeasible double bubble areas");
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (ratio(mid) < target) lo = mid;
    else hi = mid;
  }
  const double mu = std::abs(area_left - area_right) == 0.0 ? 0.0 : 0.5 * (lo + hi);
  const auto a = bubble_areas(mu);
  return {std::sqrt((area_left + area_right) / (a[0] + a[1])), mu};
}

void append_double_bubble(CurveNetwork& network, const DoubleBubbleSpec& spec, std::size_t vertices,
                          std::array<std::size_t, 3> phases) {
  if (vertices < 2) throw ConfigError("vertices_per_curve must be at least 2");
  const DoubleBubbleShape shape = solve_double_bubble(spec.areas[0], spec.areas[1]);
  const double y = shape.half_chord;
  const std::size_t first = network.curves.size();
  const std::size_t phase_count = network.orientation.phases();
  auto column = [phase_count](std::size_t plus, std::size_t minus) {
    std::vector<int> col(phase_count, 0);
    col[plus] = 1;
    col[minus] = -1;
    return col;
  };
  const auto [left, right, outside] = phases;

  network.curves.push_back({arc_points(y, 2.0 * kPi / 3.0 + shape.mu, +1, vertices, spec.center), false});
  network.orientation.append_column(column(right, outside));
  network.curves.push_back({arc_points(y, 2.0 * kPi / 3.0 - shape.mu, -1, vertices, spec.center), false});
  network.orientation.append_column(column(outside, left));
  network.curves.push_back(
      {arc_points(y, std::abs(shape.mu), shape.mu >= 0.0 ? +1 : -1, vertices, spec.center), false});
  network.orientation.append_column(column(left, right));

  const std::size_t last = vertices - 1;
  network.junctions.push_back({{first, first + 1, first + 2}, {0, 0, 0}});
  network.junctions.push_back({{first, first + 1, first + 2}, {last, last, last}});
}

void append_disk(CurveNetwork& network, const DiskSpec& spec, std::size_t vertices, std::size_t inside,
                 std::size_t outside) {
  if (vertices < 3) throw ConfigError("a disk needs at least 3 vertices");
  if (!(spec.radius > 0.0)) throw ConfigError("disk radius must be positive");
  Curve c;
  c.closed = true;
  for (std::size_t k = 0; k < vertices; ++k) {
    const double phi = 2.0 * kPi * static_cast<double>(k) / static_cast<double>(vertices);
    c.vertices.push_back(spec.center + spec.radius * Vec2(std::cos(phi), std::sin(phi)));
  }
  network.curves.push_back(std::move(c));
  std::vector<int> col(network.orientation.phases(), 0);
  col[outside] = 1;
  col[inside] = -1;
  network.orientation.append_column(col);
}

CurveNetwork make_initial(const GeometrySpec& spec, const OrientationMatrix* orientation, std::size_t exterior_phase) {
  CurveNetwork net;
  const std::size_t n = spec.vertices_per_curve;
  if (spec.type == GeometryType::Polylines) {
    if (orientation == nullptr) throw ConfigError("polyline geometry requires an orientation matrix");
    net.curves = spec.curves;
    net.junctions = spec.junctions;
    net.orientation = *orientation;
    net.exterior_phase = exterior_phase;
    net.validate();
    return net;
  }

  std::size_t want_bubbles = 1, want_disks = 0;
  if (spec.type == GeometryType::DoubleBubblePlusDisk) want_disks = 1;
  if (spec.type == GeometryType::TwoDoubleBubbles) want_bubbles = 2;
  if (spec.bubbles.size() != want_bubbles || spec.disks.size() != want_disks) {
    throw ConfigError("geometry '" + to_string(spec.type) + "' has the wrong number of bubbles or disks");
  }
  net.orientation = OrientationMatrix(3, 0);
  net.exterior_phase = 2;
  for (const auto& b : spec.bubbles) append_double_bubble(net, b, n, {0, 1, 2});
  for (const auto& d : spec.disks) append_disk(net, d, n, 1, 2);

  if (orientation != nullptr) {
    if (orientation->phases() != net.orientation.phases() || orientation->curves() != net.orientation.curves()) {
      throw ConfigError("orientation matrix does not fit the geometry");
    }
    net.orientation = *orientation;
    net.exterior_phase = exterior_phase;
  }
  net.validate();
  return net;
}

std::vector<double> discrete_curvature(const Curve& curve, const Anisotropy& gamma) {
  const std::vector<Vec2> omega = vertex_normals(curve);
  const std::vector<double> mass = lumped_masses(curve);
  std::vector<Vec2> EX(curve.num_vertices(), Vec2::Zero());
  for (std::size_t j = 0; j < curve.num_segments(); ++j) {
    const auto [a, b] = curve.segment(j);
    Mat2 K = Mat2::Zero();
    for (const auto& comp : gamma.components()) K += segment_stiffness(curve.vertices[a], curve.vertices[b], comp, gamma.scale());
    const Vec2 d = K * (curve.vertices[a] - curve.vertices[b]);
    EX[a] += d;
    EX[b] -= d;
  }
  std::vector<double> kappa(curve.num_vertices());
  for (std::size_t k = 0; k < kappa.size(); ++k) kappa[k] = -EX[k].dot(omega[k]) / (mass[k] * omega[k].squaredNorm());
  return kappa;
}

}  // namespace msflow
