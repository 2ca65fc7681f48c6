#pragma once

#include "msflow/anisotropy.hpp"
#include "msflow/common.hpp"
#include "msflow/curve_network.hpp"

#include <array>
#include <cstddef>
#include <string>
#include <vector>

namespace msflow {

/// Standard double bubble: three circular arcs meeting at 120 degrees in two junctions
/// on a vertical chord through `center`.
struct DoubleBubbleSpec {
  std::array<double, 2> areas{1.0, 1.0};  ///< (left, right)
  Vec2 center = Vec2::Zero();
};

struct DiskSpec {
  double radius = 1.0;
  Vec2 center = Vec2::Zero();
};

enum class GeometryType { DoubleBubble, DoubleBubblePlusDisk, TwoDoubleBubbles, SeedDoubleBubble, Polylines };

std::string to_string(GeometryType type);
GeometryType geometry_type_from_string(const std::string& name);

struct GeometrySpec {
  GeometryType type = GeometryType::DoubleBubble;
  std::size_t vertices_per_curve = 128;
  std::vector<DoubleBubbleSpec> bubbles;  ///< one, or two for TwoDoubleBubbles (lower, upper)
  std::vector<DiskSpec> disks;            ///< DoubleBubblePlusDisk only
  std::vector<Curve> curves;              ///< Polylines only
  std::vector<JunctionMap> junctions;     ///< Polylines only

  bool operator==(const GeometrySpec& other) const;
};

/// Geometry of one double bubble: junctions at center + (0, +-y) and the three arcs.
struct DoubleBubbleShape {
  double half_chord;  ///< y
  double mu;          ///< signed tangent-chord angle of the middle arc (positive bulges right)
};

/// Solves for the arc angles and the chord length matching the target areas.
DoubleBubbleShape solve_double_bubble(double area_left, double area_right);

/// Appends a double bubble (curves: right outer, left outer, middle; each traversed from
/// the top junction to the bottom one) with phases (left, right, outside).
void append_double_bubble(CurveNetwork& network, const DoubleBubbleSpec& spec, std::size_t vertices,
                          std::array<std::size_t, 3> phases);

/// Appends a counter-clockwise polygon inscribed in the circle (normal points inwards).
void append_disk(CurveNetwork& network, const DiskSpec& spec, std::size_t vertices, std::size_t inside,
                 std::size_t outside);

/// Builds the network for a geometry spec with the orientation convention of the named
/// presets (phases: left bubble 0, right bubble 1, exterior 2). Polylines need `orientation`.
CurveNetwork make_initial(const GeometrySpec& spec, const OrientationMatrix* orientation = nullptr,
                          std::size_t exterior_phase = 2);

/// Curvature of a curve at rest from C kappa omega + E X = 0, solved per vertex in the
/// normal direction: kappa_k = -(E X)_k . omega_k / (m_k |omega_k|^2).
std::vector<double> discrete_curvature(const Curve& curve, const Anisotropy& gamma);

}  // namespace msflow
