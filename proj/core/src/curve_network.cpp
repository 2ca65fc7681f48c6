#include "msflow/curve_network.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <set>

namespace msflow {

std::size_t Curve::num_segments() const {
  const std::size_t n = vertices.size();
  if (n < 2) return 0;
  return closed ? n : n - 1;
}

std::pair<std::size_t, std::size_t> Curve::segment(std::size_t j) const {
  return {j, (j + 1) % vertices.size()};
}

double Curve::segment_length(std::size_t j) const {
  const auto [a, b] = segment(j);
  return (vertices[b] - vertices[a]).norm();
}

double Curve::length() const {
  double sum = 0.0;
  for (std::size_t j = 0; j < num_segments(); ++j) sum += segment_length(j);
  return sum;
}

OrientationMatrix::OrientationMatrix(std::size_t phases, std::size_t curves)
    : phases_(phases), curves_(curves), entries_(phases * curves, 0) {}

OrientationMatrix OrientationMatrix::from_rows(const std::vector<std::vector<int>>& rows) {
  if (rows.empty()) throw ConfigError("orientation matrix has no rows");
  OrientationMatrix O(rows.size(), rows.front().size());
  for (std::size_t l = 0; l < rows.size(); ++l) {
    if (rows[l].size() != O.curves_) throw ConfigError("orientation matrix rows differ in length");
    for (std::size_t i = 0; i < O.curves_; ++i) O(l, i) = rows[l][i];
  }
  return O;
}

std::vector<int> OrientationMatrix::column(std::size_t curve) const {
  std::vector<int> col(phases_);
  for (std::size_t l = 0; l < phases_; ++l) col[l] = (*this)(l, curve);
  return col;
}

void OrientationMatrix::remove_column(std::size_t curve) {
  std::vector<int> next;
  next.reserve(phases_ * (curves_ - 1));
  for (std::size_t l = 0; l < phases_; ++l)
    for (std::size_t i = 0; i < curves_; ++i)
      if (i != curve) next.push_back((*this)(l, i));
  entries_ = std::move(next);
  --curves_;
}

void OrientationMatrix::append_column(const std::vector<int>& column) {
  if (column.size() != phases_) throw Error("orientation column has wrong length");
  std::vector<int> next;
  next.reserve(phases_ * (curves_ + 1));
  for (std::size_t l = 0; l < phases_; ++l) {
    for (std::size_t i = 0; i < curves_; ++i) next.push_back((*this)(l, i));
    next.push_back(column[l]);
  }
  entries_ = std::move(next);
  ++curves_;
}

std::vector<std::vector<int>> OrientationMatrix::rows() const {
  std::vector<std::vector<int>> out(phases_, std::vector<int>(curves_));
  for (std::size_t l = 0; l < phases_; ++l)
    for (std::size_t i = 0; i < curves_; ++i) out[l][i] = (*this)(l, i);
  return out;
}

void OrientationMatrix::validate() const {
  if (phases_ < 2) throw ConfigError("orientation matrix needs at least two phases");
  for (std::size_t i = 0; i < curves_; ++i) {
    int plus = 0, minus = 0;
    for (std::size_t l = 0; l < phases_; ++l) {
      const int v = (*this)(l, i);
      if (v == 1) ++plus;
      else if (v == -1) ++minus;
      else if (v != 0) throw ConfigError("orientation matrix entries must be -1, 0 or 1");
    }
    if (plus != 1 || minus != 1) {
      throw ConfigError("orientation matrix column " + std::to_string(i) +
                        " must contain exactly one +1 and one -1");
    }
  }
}

std::size_t CurveNetwork::total_vertices() const {
  std::size_t n = 0;
  for (const auto& c : curves) n += c.num_vertices();
  return n;
}

void CurveNetwork::validate() const {
  if (orientation.curves() != curves.size()) {
    throw Error("orientation matrix column count does not match the number of curves");
  }
  orientation.validate();
  if (exterior_phase >= orientation.phases()) throw Error("exterior phase index out of range");

  std::map<std::pair<std::size_t, std::size_t>, int> endpoint_refs;
  for (std::size_t i = 0; i < curves.size(); ++i) {
    const Curve& c = curves[i];
    if (c.num_vertices() < 2 || (c.closed && c.num_vertices() < 3)) {
      throw Error("curve " + std::to_string(i) + " has too few vertices");
    }
    for (std::size_t j = 0; j < c.num_segments(); ++j) {
      if (c.segment_length(j) == 0.0) throw Error("zero-length segment on curve " + std::to_string(i));
    }
    if (!c.closed) {
      endpoint_refs[{i, 0}] = 0;
      endpoint_refs[{i, c.num_vertices() - 1}] = 0;
    }
  }
  for (std::size_t k = 0; k < junctions.size(); ++k) {
    const JunctionMap& J = junctions[k];
    for (int r = 0; r < 3; ++r) {
      const auto key = std::make_pair(J.curves[r], J.vertices[r]);
      auto it = endpoint_refs.find(key);
      if (it == endpoint_refs.end()) {
        throw Error("junction " + std::to_string(k) + " references a vertex that is not an open-curve endpoint");
      }
      ++it->second;
    }
    const Vec2& p0 = curves[J.curves[0]].vertices[J.vertices[0]];
    for (int r = 1; r < 3; ++r) {
      const Vec2& p = curves[J.curves[r]].vertices[J.vertices[r]];
      if ((p - p0).norm() > 1e-12) throw Error("junction " + std::to_string(k) + " vertices do not coincide");
    }
  }
  for (const auto& [key, count] : endpoint_refs) {
    if (count != 1) {
      throw Error("endpoint of curve " + std::to_string(key.first) + " is referenced by " + std::to_string(count) +
                  " junctions");
    }
  }
}

Vec2 segment_normal(const Vec2& q1, const Vec2& q2) {
  const Vec2 h = q2 - q1;
  const double len = h.norm();
  if (len == 0.0) throw Error("zero-length segment");
  return perp(h) / len;
}

std::vector<Vec2> vertex_normals(const Curve& curve) {
  const std::size_t n = curve.num_vertices();
  if (curve.num_segments() == 0) throw Error("vertex_normals: curve has no segments");
  std::vector<Vec2> acc(n, Vec2::Zero());
  std::vector<double> w(n, 0.0);
  for (std::size_t j = 0; j < curve.num_segments(); ++j) {
    const auto [a, b] = curve.segment(j);
    const Vec2 h = curve.vertices[b] - curve.vertices[a];
    if (h.squaredNorm() == 0.0) throw Error("zero-length segment");
    // |sigma| nu_sigma = h^perp.
    acc[a] += perp(h);
    acc[b] += perp(h);
    const double len = h.norm();
    w[a] += len;
    w[b] += len;
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (w[k] == 0.0) throw Error("vertex_normals: isolated vertex");
    acc[k] /= w[k];
  }
  return acc;
}

std::vector<double> lumped_masses(const Curve& curve) {
  std::vector<double> m(curve.num_vertices(), 0.0);
  for (std::size_t j = 0; j < curve.num_segments(); ++j) {
    const auto [a, b] = curve.segment(j);
    const double half = 0.5 * curve.segment_length(j);
    m[a] += half;
    m[b] += half;
  }
  return m;
}

namespace {

template <typename T, typename Dot>
double lumped_inner_impl(const CurveNetwork& network, const CurveField<T>& u, const CurveField<T>& v, Dot dot) {
  if (u.size() != network.curves.size() || v.size() != network.curves.size()) {
    throw Error("lumped_inner: field layout does not match the network");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < network.curves.size(); ++i) {
    const Curve& c = network.curves[i];
    if (u[i].size() != c.num_vertices() || v[i].size() != c.num_vertices()) {
      throw Error("lumped_inner: field layout does not match curve " + std::to_string(i));
    }
    for (std::size_t j = 0; j < c.num_segments(); ++j) {
      const auto [a, b] = c.segment(j);
      sum += 0.5 * c.segment_length(j) * (dot(u[i][a], v[i][a]) + dot(u[i][b], v[i][b]));
    }
  }
  return sum;
}

}  // namespace

double lumped_inner(const CurveNetwork& network, const CurveField<double>& u, const CurveField<double>& v) {
  return lumped_inner_impl(network, u, v, [](double a, double b) { return a * b; });
}

double lumped_inner(const CurveNetwork& network, const CurveField<Vec2>& u, const CurveField<Vec2>& v) {
  return lumped_inner_impl(network, u, v, [](const Vec2& a, const Vec2& b) { return a.dot(b); });
}

namespace {

/// int_Gamma x dy along the curve orientation.
double flux_x_dy(const Curve& c) {
  double sum = 0.0;
  for (std::size_t j = 0; j < c.num_segments(); ++j) {
    const auto [a, b] = c.segment(j);
    const Vec2& p = c.vertices[a];
    const Vec2& q = c.vertices[b];
    sum += 0.5 * (p.x() + q.x()) * (q.y() - p.y());
  }
  return sum;
}

double swept_angle(const Curve& c, const Vec2& x) {
  double sum = 0.0;
  for (std::size_t j = 0; j < c.num_segments(); ++j) {
    const auto [a, b] = c.segment(j);
    const Vec2 p = c.vertices[a] - x;
    const Vec2 q = c.vertices[b] - x;
    sum += std::atan2(cross(p, q), p.dot(q));
  }
  return sum;
}

}  // namespace

RegionAreas region_areas(const CurveNetwork& network, double domain_area) {
  const std::size_t phases = network.num_phases();
  RegionAreas out;
  out.areas.assign(phases, 0.0);
  std::vector<double> flux(network.curves.size());
  for (std::size_t i = 0; i < network.curves.size(); ++i) flux[i] = flux_x_dy(network.curves[i]);

  double interior = 0.0;
  for (std::size_t l = 0; l < phases; ++l) {
    if (l == network.exterior_phase) continue;
    double a = 0.0;
    for (std::size_t i = 0; i < network.curves.size(); ++i) a -= network.orientation(l, i) * flux[i];
    out.areas[l] = a;
    interior += a;
    if (a < 0.0) out.suspicious = true;
  }
  out.areas[network.exterior_phase] = domain_area - interior;
  return out;
}

std::size_t phase_at(const CurveNetwork& network, const Vec2& x) {
  std::vector<double> angle(network.curves.size());
  for (std::size_t i = 0; i < network.curves.size(); ++i) angle[i] = swept_angle(network.curves[i], x);
  for (std::size_t l = 0; l < network.num_phases(); ++l) {
    if (l == network.exterior_phase) continue;
    double w = 0.0;
    for (std::size_t i = 0; i < network.curves.size(); ++i) w -= network.orientation(l, i) * angle[i];
    if (std::abs(w / (2.0 * std::numbers::pi) - 1.0) < 0.5) return l;
  }
  return network.exterior_phase;
}

void check_orientation(const CurveNetwork& network) {
  for (std::size_t i = 0; i < network.curves.size(); ++i) {
    const Curve& c = network.curves[i];
    const std::size_t j = c.num_segments() / 2;
    const auto [a, b] = c.segment(j);
    const Vec2 mid = 0.5 * (c.vertices[a] + c.vertices[b]);
    const Vec2 nu = segment_normal(c.vertices[a], c.vertices[b]);
    const double eps = 1e-3 * c.segment_length(j);
    const std::size_t ahead = phase_at(network, mid + eps * nu);
    const std::size_t behind = phase_at(network, mid - eps * nu);
    if (network.orientation(ahead, i) != -1 || network.orientation(behind, i) != 1) {
      throw Error("curve " + std::to_string(i) + " orientation disagrees with the orientation matrix");
    }
  }
}

double anisotropic_length(const Curve& curve, const Anisotropy& gamma) {
  // gamma^(l)(nu)|sigma| = sqrt(h . G~ h) in 2D.
  double sum = 0.0;
  for (std::size_t j = 0; j < curve.num_segments(); ++j) {
    const auto [a, b] = curve.segment(j);
    const Vec2 h = curve.vertices[b] - curve.vertices[a];
    if (h.squaredNorm() == 0.0) throw Error("zero-length segment");
    for (const auto& comp : gamma.components()) sum += std::sqrt(h.dot(comp.G_tilde() * h));
  }
  return gamma.scale() * sum;
}

double anisotropic_length(const CurveNetwork& network, const std::vector<Anisotropy>& anisotropies) {
  if (anisotropies.size() != network.curves.size()) {
    throw Error("anisotropic_length: need one anisotropy per curve");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < network.curves.size(); ++i) sum += anisotropic_length(network.curves[i], anisotropies[i]);
  return sum;
}

std::string to_string(SurgeryKind kind) { return kind == SurgeryKind::Discard ? "discard" : "remove-and-glue"; }

std::vector<SurgeryEvent> surgery_scan(const CurveNetwork& network, const SurgeryThresholds& thresholds) {
  std::vector<SurgeryEvent> events;
  for (std::size_t i = 0; i < network.curves.size(); ++i) {
    const Curve& c = network.curves[i];
    const double len = c.length();
    if (c.closed) {
      if (len < thresholds.min_length || c.num_vertices() < thresholds.min_vertices) {
        events.push_back({SurgeryKind::Discard, i, len});
      }
    } else if (len < thresholds.min_length) {
      events.push_back({SurgeryKind::RemoveAndGlue, i, len});
    }
  }
  return events;
}

double mean_segment_length(const CurveNetwork& network) {
  double total = 0.0;
  std::size_t count = 0;
  for (const auto& c : network.curves) {
    total += c.length();
    count += c.num_segments();
  }
  return count == 0 ? 0.0 : total / static_cast<double>(count);
}

namespace {

std::vector<std::size_t> discard_curve(CurveNetwork& network, std::size_t curve) {
  if (!network.curves[curve].closed) throw Error("discard applies to closed curves only");
  network.curves.erase(network.curves.begin() + static_cast<std::ptrdiff_t>(curve));
  network.orientation.remove_column(curve);
  std::vector<std::size_t> parent;
  for (std::size_t i = 0; i < network.curves.size() + 1; ++i)
    if (i != curve) parent.push_back(i);
  for (auto& J : network.junctions)
    for (auto& c : J.curves)
      if (c > curve) --c;
  return parent;
}

struct End {
  std::size_t curve;
  bool at_start;
  bool operator<(const End& o) const { return std::tie(curve, at_start) < std::tie(o.curve, o.at_start); }
  bool operator==(const End& o) const { return curve == o.curve && at_start == o.at_start; }
};

struct Piece {
  std::size_t curve;
  bool reversed;
};

std::vector<std::size_t> remove_and_glue(CurveNetwork& network, std::size_t removed) {
  const Curve& rc = network.curves[removed];
  if (rc.closed) throw Error("remove-and-glue applies to junction curves only");

  std::vector<std::size_t> touched;  // junction ids holding the removed curve
  for (std::size_t k = 0; k < network.junctions.size(); ++k)
    for (std::size_t r = 0; r < 3; ++r)
      if (network.junctions[k].curves[r] == removed) touched.push_back(k);
  if (touched.size() != 2 || touched[0] == touched[1]) {
    throw Error("remove-and-glue needs a curve joining two distinct junctions");
  }

  // Each end at one junction continues into the end at the other junction that separates the same phases.
  std::array<std::vector<End>, 2> ends;
  std::set<std::size_t> involved;
  for (std::size_t j = 0; j < 2; ++j) {
    const JunctionMap& J = network.junctions[touched[j]];
    for (std::size_t r = 0; r < 3; ++r) {
      if (J.curves[r] == removed) continue;
      ends[j].push_back({J.curves[r], J.vertices[r] == 0});
      involved.insert(J.curves[r]);
    }
    if (ends[j].size() != 2) throw Error("remove-and-glue: unsupported junction configuration");
  }
  // column of the curve traversed towards the junction
  auto arriving = [&network](const End& e) {
    std::vector<int> col = network.orientation.column(e.curve);
    if (e.at_start)
      for (int& v : col) v = -v;
    return col;
  };
  auto departing = [&arriving](const End& e) {
    std::vector<int> col = arriving(e);
    for (int& v : col) v = -v;
    return col;
  };
  std::map<End, End> glue;
  for (const End& a : ends[0]) {
    const auto match = std::find_if(ends[1].begin(), ends[1].end(),
                                    [&](const End& b) { return arriving(a) == departing(b); });
    if (match == ends[1].end()) throw Error("remove-and-glue: no phase-consistent gluing, a new interface would be needed");
    glue[a] = *match;
    glue[*match] = a;
  }
  if (glue.size() != 4) throw Error("remove-and-glue: ambiguous gluing");

  // Both junctions collapse onto the midpoint of the removed curve.
  const Vec2 mid = 0.5 * (rc.vertices.front() + rc.vertices.back());
  for (const auto& [end, partner] : glue) {
    Curve& c = network.curves[end.curve];
    (end.at_start ? c.vertices.front() : c.vertices.back()) = mid;
  }

  std::vector<Curve> new_curves;
  std::vector<std::vector<int>> new_columns;
  std::vector<std::size_t> new_parents;
  std::set<std::size_t> consumed;
  // old (curve, at_start) free end -> (new chain index, at_start in the new chain)
  std::map<End, End> free_end_map;

  for (std::size_t seed : involved) {
    if (consumed.count(seed)) continue;
    // Walk back to a free end, if any.
    End entry{seed, true};
    {
      End cur{seed, true};
      std::set<std::size_t> seen{seed};
      while (true) {
        auto it = glue.find(cur);
        if (it == glue.end()) {
          entry = cur;
          break;
        }
        const End next_in = it->second;
        if (seen.count(next_in.curve)) {
          entry = {seed, true};  // closed chain
          break;
        }
        seen.insert(next_in.curve);
        cur = {next_in.curve, !next_in.at_start};
      }
    }
    std::vector<Piece> pieces;
    End cur = entry;
    bool closed = false;
    while (true) {
      consumed.insert(cur.curve);
      pieces.push_back({cur.curve, !cur.at_start});
      const End out{cur.curve, !cur.at_start};
      auto it = glue.find(out);
      if (it == glue.end()) break;
      if (it->second.curve == entry.curve) {
        closed = true;
        break;
      }
      cur = it->second;
    }

    std::size_t ref = 0;
    for (std::size_t p = 1; p < pieces.size(); ++p)
      if (network.curves[pieces[p].curve].length() > network.curves[pieces[ref].curve].length()) ref = p;
    if (pieces[ref].reversed) {
      std::reverse(pieces.begin(), pieces.end());
      for (auto& p : pieces) p.reversed = !p.reversed;
    }

    Curve merged;
    merged.closed = closed;
    for (std::size_t p = 0; p < pieces.size(); ++p) {
      std::vector<Vec2> verts = network.curves[pieces[p].curve].vertices;
      if (pieces[p].reversed) std::reverse(verts.begin(), verts.end());
      const std::size_t skip = p == 0 ? 0 : 1;
      merged.vertices.insert(merged.vertices.end(), verts.begin() + static_cast<std::ptrdiff_t>(skip), verts.end());
    }
    if (closed) merged.vertices.pop_back();

    const std::size_t chain = new_curves.size();
    if (!closed) {
      const Piece& first = pieces.front();
      const Piece& last = pieces.back();
      free_end_map[{first.curve, !first.reversed}] = {chain, true};
      free_end_map[{last.curve, last.reversed}] = {chain, false};
    }
    new_columns.push_back(network.orientation.column(pieces[ref].curve));
    new_parents.push_back(pieces[ref].curve);
    new_curves.push_back(std::move(merged));
  }

  // Assemble the new network: untouched curves keep their order, merged curves follow.
  std::vector<std::size_t> old_to_new(network.curves.size(), static_cast<std::size_t>(-1));
  CurveNetwork next;
  next.exterior_phase = network.exterior_phase;
  next.orientation = OrientationMatrix(network.num_phases(), 0);
  std::vector<std::size_t> parents;
  for (std::size_t i = 0; i < network.curves.size(); ++i) {
    if (i == removed || involved.count(i)) continue;
    old_to_new[i] = next.curves.size();
    next.curves.push_back(network.curves[i]);
    next.orientation.append_column(network.orientation.column(i));
    parents.push_back(i);
  }
  const std::size_t base = next.curves.size();
  for (std::size_t c = 0; c < new_curves.size(); ++c) {
    next.curves.push_back(std::move(new_curves[c]));
    next.orientation.append_column(new_columns[c]);
    parents.push_back(new_parents[c]);
  }

  for (std::size_t k = 0; k < network.junctions.size(); ++k) {
    if (k == touched[0] || k == touched[1]) continue;
    JunctionMap J = network.junctions[k];
    for (std::size_t r = 0; r < 3; ++r) {
      const std::size_t old = J.curves[r];
      if (old_to_new[old] != static_cast<std::size_t>(-1)) {
        J.curves[r] = old_to_new[old];
        continue;
      }
      const End key{old, J.vertices[r] == 0};
      auto it = free_end_map.find(key);
      if (it == free_end_map.end()) throw Error("remove-and-glue: lost a junction reference");
      const std::size_t nc = base + it->second.curve;
      J.curves[r] = nc;
      J.vertices[r] = it->second.at_start ? 0 : next.curves[nc].num_vertices() - 1;
    }
    next.junctions.push_back(J);
  }
  network = std::move(next);
  return parents;
}

}  // namespace

std::vector<std::size_t> apply_surgery(CurveNetwork& network, const SurgeryEvent& event) {
  if (event.curve >= network.curves.size()) throw Error("surgery event refers to a missing curve");
  if (event.kind == SurgeryKind::Discard) return discard_curve(network, event.curve);
  return remove_and_glue(network, event.curve);
}

}  // namespace msflow
