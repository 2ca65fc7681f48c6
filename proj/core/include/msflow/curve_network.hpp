#pragma once

#include "msflow/anisotropy.hpp"
#include "msflow/common.hpp"

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace msflow {

/// A polygonal curve. Segment j joins vertex j to vertex j+1 (mod n for closed curves).
struct Curve {
  std::vector<Vec2> vertices;
  bool closed = false;

  std::size_t num_vertices() const { return vertices.size(); }
  std::size_t num_segments() const;
  std::pair<std::size_t, std::size_t> segment(std::size_t j) const;
  double segment_length(std::size_t j) const;
  double length() const;
};

/// Triple junction: the three curves meeting there and the boundary vertex of each.
/// In 2D every junction holds exactly one matched vertex per curve.
struct JunctionMap {
  std::array<std::size_t, 3> curves{};
  std::array<std::size_t, 3> vertices{};
};

/// O_{l i} = -[chi_l]_{Gamma_i}: -1 when the curve normal points into phase l,
/// +1 when phase l lies behind the normal.
class OrientationMatrix {
 public:
  OrientationMatrix() = default;
  OrientationMatrix(std::size_t phases, std::size_t curves);
  static OrientationMatrix from_rows(const std::vector<std::vector<int>>& rows);

  std::size_t phases() const { return phases_; }
  std::size_t curves() const { return curves_; }
  int operator()(std::size_t phase, std::size_t curve) const { return entries_[phase * curves_ + curve]; }
  int& operator()(std::size_t phase, std::size_t curve) { return entries_[phase * curves_ + curve]; }

  std::vector<int> column(std::size_t curve) const;
  void remove_column(std::size_t curve);
  void append_column(const std::vector<int>& column);
  std::vector<std::vector<int>> rows() const;

  /// Each column must hold exactly one +1 and one -1.
  void validate() const;

 private:
  std::size_t phases_ = 0;
  std::size_t curves_ = 0;
  std::vector<int> entries_;
};

struct CurveNetwork {
  std::vector<Curve> curves;
  std::vector<JunctionMap> junctions;
  OrientationMatrix orientation;
  std::size_t exterior_phase = 0;

  std::size_t num_phases() const { return orientation.phases(); }
  std::size_t total_vertices() const;

  /// Checks closedness/junction bookkeeping and bitwise coincidence of matched vertices.
  void validate() const;
};

Vec2 segment_normal(const Vec2& q1, const Vec2& q2);

/// Lumped L2-projection of the segment normals: |sigma|-weighted average of incident normals.
std::vector<Vec2> vertex_normals(const Curve& curve);

/// Lumped vertex masses (1/2) sum_{sigma ni q} |sigma|.
std::vector<double> lumped_masses(const Curve& curve);

double lumped_inner(const CurveNetwork& network, const CurveField<double>& u, const CurveField<double>& v);
double lumped_inner(const CurveNetwork& network, const CurveField<Vec2>& u, const CurveField<Vec2>& v);

struct RegionAreas {
  std::vector<double> areas;
  bool suspicious = false;  ///< some interior area came out negative
};

inline constexpr double kDomainHalfWidth = 4.0;
inline constexpr double kDomainArea = 64.0;

/// Phase areas from oriented boundary curves; the exterior phase takes the remainder of |Omega|.
RegionAreas region_areas(const CurveNetwork& network, double domain_area = kDomainArea);

/// Index of the phase containing x (winding numbers of the oriented phase boundaries).
std::size_t phase_at(const CurveNetwork& network, const Vec2& x);

/// Throws if some curve normal does not point from its O=+1 phase into its O=-1 phase.
void check_orientation(const CurveNetwork& network);

double anisotropic_length(const Curve& curve, const Anisotropy& gamma);
double anisotropic_length(const CurveNetwork& network, const std::vector<Anisotropy>& anisotropies);

struct SurgeryThresholds {
  double min_length = 0.0;
  std::size_t min_vertices = 4;
};

enum class SurgeryKind { Discard, RemoveAndGlue };

struct SurgeryEvent {
  SurgeryKind kind;
  std::size_t curve;
  double length;
};

std::string to_string(SurgeryKind kind);

/// Flags too-short curves; does not touch the network.
std::vector<SurgeryEvent> surgery_scan(const CurveNetwork& network, const SurgeryThresholds& thresholds);

/// Applies one event. Returns, for every curve of the new network, the index of the
/// old curve whose data it continues (used to carry per-curve parameters along).
std::vector<std::size_t> apply_surgery(CurveNetwork& network, const SurgeryEvent& event);

/// Mean segment length over all curves.
double mean_segment_length(const CurveNetwork& network);

}  // namespace msflow
