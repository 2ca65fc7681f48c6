#include "msflow/bulk_mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <unordered_map>

namespace msflow {

double BulkMesh::area(std::size_t t) const {
  const auto& T = triangles[t];
  return 0.5 * cross(vertices[T[1]] - vertices[T[0]], vertices[T[2]] - vertices[T[0]]);
}

double BulkMesh::diameter(std::size_t t) const {
  const auto& T = triangles[t];
  double d = 0.0;
  for (int i = 0; i < 3; ++i) d = std::max(d, (vertices[T[(i + 1) % 3]] - vertices[T[i]]).norm());
  return d;
}

bool BulkMesh::on_boundary(std::size_t v) const {
  const Vec2& p = vertices[v];
  return std::abs(p.x()) == kDomainHalfWidth || std::abs(p.y()) == kDomainHalfWidth;
}

std::array<double, 3> BulkMesh::barycentric(std::size_t t, const Vec2& x) const {
  const auto& T = triangles[t];
  const Vec2& a = vertices[T[0]];
  const Vec2& b = vertices[T[1]];
  const Vec2& c = vertices[T[2]];
  const double det = cross(b - a, c - a);
  const double l1 = cross(x - a, c - a) / det;
  const double l2 = cross(b - a, x - a) / det;
  return {1.0 - l1 - l2, l1, l2};
}

BulkMesh build_initial(int level) {
  if (level < 1) throw Error("build_initial: level must be >= 1");
  const int n = 1 << level;
  const double h = 2.0 * kDomainHalfWidth / n;
  BulkMesh mesh;
  mesh.coarse_level = level;
  mesh.vertices.reserve(static_cast<std::size_t>((n + 1) * (n + 1)));
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) mesh.vertices.emplace_back(-kDomainHalfWidth + i * h, -kDomainHalfWidth + j * h);
  auto id = [n](int i, int j) { return j * (n + 1) + i; };
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
      // Right-angle vertex first so the hypotenuse is the refinement edge.
      if ((i + j) % 2 == 0) {
        mesh.triangles.push_back({b, c, a});
        mesh.triangles.push_back({d, a, c});
      } else {
        mesh.triangles.push_back({a, b, d});
        mesh.triangles.push_back({c, d, b});
      }
    }
  }
  mesh.levels.assign(mesh.triangles.size(), 0);
  return mesh;
}

namespace {

std::uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  double t = len2 > 0.0 ? (p - a).dot(ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return (a + t * ab - p).norm();
}

bool segments_intersect(const Vec2& p1, const Vec2& p2, const Vec2& q1, const Vec2& q2) {
  const double d1 = cross(p2 - p1, q1 - p1);
  const double d2 = cross(p2 - p1, q2 - p1);
  const double d3 = cross(q2 - q1, p1 - q1);
  const double d4 = cross(q2 - q1, p2 - q1);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0));
}

bool point_in_triangle(const Vec2& p, const Vec2& a, const Vec2& b, const Vec2& c) {
  const double s1 = cross(b - a, p - a);
  const double s2 = cross(c - b, p - b);
  const double s3 = cross(a - c, p - c);
  return s1 >= 0 && s2 >= 0 && s3 >= 0;
}

double triangle_segment_distance(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& p, const Vec2& q) {
  if (point_in_triangle(p, a, b, c) || point_in_triangle(q, a, b, c)) return 0.0;
  const std::array<Vec2, 3> v{a, b, c};
  double d = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 3; ++i) {
    const Vec2& e0 = v[i];
    const Vec2& e1 = v[(i + 1) % 3];
    if (segments_intersect(e0, e1, p, q)) return 0.0;
    d = std::min({d, point_segment_distance(e0, p, q), point_segment_distance(p, e0, e1),
                  point_segment_distance(q, e0, e1)});
  }
  return d;
}

/// Newest-vertex bisection with recursive conforming closure.
class Refiner {
 public:
  explicit Refiner(const BulkMesh& base) : mesh_(base), active_(base.triangles.size(), true) {
    for (std::size_t t = 0; t < mesh_.triangles.size(); ++t) add_edges(static_cast<int>(t));
  }

  bool active(int t) const { return active_[t]; }
  std::size_t size() const { return mesh_.triangles.size(); }
  const BulkMesh& mesh() const { return mesh_; }

  void refine(int t) {
    if (!active_[t]) return;
    const auto T = mesh_.triangles[t];
    int n = neighbor(t, T[1], T[2]);
    if (n >= 0) {
      const auto& N = mesh_.triangles[n];
      if (edge_key(N[1], N[2]) != edge_key(T[1], T[2])) {
        refine(n);
        n = neighbor(t, T[1], T[2]);
      }
    }
    bisect(t);
    if (n >= 0) bisect(n);
  }

  BulkMesh finish() const {
    BulkMesh out;
    out.coarse_level = mesh_.coarse_level;
    std::vector<int> remap(mesh_.vertices.size(), -1);
    for (std::size_t t = 0; t < mesh_.triangles.size(); ++t) {
      if (!active_[t]) continue;
      std::array<int, 3> T = mesh_.triangles[t];
      for (int& v : T) {
        if (remap[v] < 0) {
          remap[v] = static_cast<int>(out.vertices.size());
          out.vertices.push_back(mesh_.vertices[v]);
        }
        v = remap[v];
      }
      out.triangles.push_back(T);
      out.levels.push_back(mesh_.levels[t]);
    }
    return out;
  }

 private:
  int neighbor(int t, int a, int b) const {
    auto it = edges_.find(edge_key(a, b));
    if (it == edges_.end()) return -1;
    for (int s : it->second)
      if (s != t) return s;
    return -1;
  }

  void add_edges(int t) {
    const auto& T = mesh_.triangles[t];
    for (int i = 0; i < 3; ++i) edges_[edge_key(T[i], T[(i + 1) % 3])].push_back(t);
  }

  void remove_edges(int t) {
    const auto& T = mesh_.triangles[t];
    for (int i = 0; i < 3; ++i) {
      auto& list = edges_[edge_key(T[i], T[(i + 1) % 3])];
      list.erase(std::remove(list.begin(), list.end(), t), list.end());
    }
  }

  int midpoint(int a, int b) {
    const auto key = edge_key(a, b);
    auto it = midpoints_.find(key);
    if (it != midpoints_.end()) return it->second;
    const int m = static_cast<int>(mesh_.vertices.size());
    mesh_.vertices.push_back(0.5 * (mesh_.vertices[a] + mesh_.vertices[b]));
    midpoints_.emplace(key, m);
    return m;
  }

  void bisect(int t) {
    const auto T = mesh_.triangles[t];
    const int m = midpoint(T[1], T[2]);
    remove_edges(t);
    active_[t] = false;
    const int level = mesh_.levels[t] + 1;
    for (const std::array<int, 3>& child : {std::array<int, 3>{m, T[0], T[1]}, std::array<int, 3>{m, T[2], T[0]}}) {
      const int c = static_cast<int>(mesh_.triangles.size());
      mesh_.triangles.push_back(child);
      mesh_.levels.push_back(level);
      active_.push_back(true);
      add_edges(c);
    }
  }

  BulkMesh mesh_;
  std::vector<bool> active_;
  std::unordered_map<std::uint64_t, std::vector<int>> edges_;
  std::unordered_map<std::uint64_t, int> midpoints_;
};

/// Bucket grid of curve segments for band queries.
class SegmentGrid {
 public:
  SegmentGrid(const CurveNetwork& network, double cell) {
    n_ = std::max(1, static_cast<int>(std::floor(2.0 * kDomainHalfWidth / cell)));
    cell_ = 2.0 * kDomainHalfWidth / n_;
    buckets_.resize(static_cast<std::size_t>(n_) * n_);
    for (const auto& c : network.curves) {
      for (std::size_t j = 0; j < c.num_segments(); ++j) {
        const auto [a, b] = c.segment(j);
        const std::size_t id = segments_.size();
        segments_.push_back({c.vertices[a], c.vertices[b]});
        const Vec2 lo = c.vertices[a].cwiseMin(c.vertices[b]);
        const Vec2 hi = c.vertices[a].cwiseMax(c.vertices[b]);
        for (int iy = clamp(lo.y()); iy <= clamp(hi.y()); ++iy)
          for (int ix = clamp(lo.x()); ix <= clamp(hi.x()); ++ix)
            buckets_[static_cast<std::size_t>(iy) * n_ + ix].push_back(id);
      }
    }
  }

  /// Distance from triangle (a,b,c) to the network, capped: returns a value > limit
  /// when nothing lies within limit.
  double distance(const Vec2& a, const Vec2& b, const Vec2& c, double limit) const {
    const Vec2 lo = a.cwiseMin(b).cwiseMin(c) - Vec2::Constant(limit);
    const Vec2 hi = a.cwiseMax(b).cwiseMax(c) + Vec2::Constant(limit);
    double best = std::numeric_limits<double>::infinity();
    for (int iy = clamp(lo.y()); iy <= clamp(hi.y()); ++iy) {
      for (int ix = clamp(lo.x()); ix <= clamp(hi.x()); ++ix) {
        for (std::size_t id : buckets_[static_cast<std::size_t>(iy) * n_ + ix]) {
          const auto& [p, q] = segments_[id];
          best = std::min(best, triangle_segment_distance(a, b, c, p, q));
          if (best <= limit) return best;
        }
      }
    }
    return best;
  }

 private:
  int clamp(double x) const {
    const int i = static_cast<int>(std::floor((x + kDomainHalfWidth) / cell_));
    return std::clamp(i, 0, n_ - 1);
  }

  int n_ = 1;
  double cell_ = 8.0;
  std::vector<std::pair<Vec2, Vec2>> segments_;
  std::vector<std::vector<std::size_t>> buckets_;
};

}  // namespace

AdaptResult adapt(const BulkMesh& base, const CurveNetwork& network, const AdaptParams& params) {
  if (!(params.h_fine > 0.0) || params.band_width < 0.0) throw Error("adapt: invalid mesh parameters");
  const double h_coarse = 2.0 * kDomainHalfWidth / (1 << base.coarse_level);
  if (params.h_fine > h_coarse * std::sqrt(2.0)) throw Error("adapt: h_fine must not exceed h_coarse");

  Refiner refiner(base);
  const SegmentGrid grid(network, std::max(params.band_width, params.h_fine));
  bool flagged_any = false;
  std::size_t scan_from = 0;
  while (true) {
    std::vector<int> flagged;
    const std::size_t end = refiner.size();
    const BulkMesh& m = refiner.mesh();
    for (std::size_t t = scan_from; t < end; ++t) {
      if (!refiner.active(static_cast<int>(t)) || m.diameter(t) <= params.h_fine) continue;
      const auto& T = m.triangles[t];
      if (grid.distance(m.vertices[T[0]], m.vertices[T[1]], m.vertices[T[2]], params.band_width) <=
          params.band_width) {
        flagged.push_back(static_cast<int>(t));
      }
    }
    // Triangles created before `end` that are still active and unflagged stay unflagged:
    // the flagging criterion depends only on the triangle itself.
    scan_from = end;
    if (flagged.empty()) break;
    flagged_any = true;
    for (int t : flagged) refiner.refine(t);
  }
  return {refiner.finish(), !flagged_any};
}

AdaptResult adapt(const CurveNetwork& network, const AdaptParams& params) {
  return adapt(build_initial(params.coarse_level), network, params);
}

std::string check_mesh(const BulkMesh& mesh) {
  std::unordered_map<std::uint64_t, int> count;
  double total = 0.0;
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const double a = mesh.area(t);
    if (!(a > 0.0)) return "triangle " + std::to_string(t) + " has non-positive area";
    total += a;
    const auto& T = mesh.triangles[t];
    for (int i = 0; i < 3; ++i) ++count[edge_key(T[i], T[(i + 1) % 3])];
  }
  if (std::abs(total - kDomainArea) > 1e-10) return "triangle areas do not sum to the domain area";
  for (const auto& [key, c] : count) {
    const int a = static_cast<int>(key >> 32);
    const int b = static_cast<int>(key & 0xffffffffu);
    const Vec2& p = mesh.vertices[a];
    const Vec2& q = mesh.vertices[b];
    const bool boundary_edge = (std::abs(p.x()) == kDomainHalfWidth && p.x() == q.x()) ||
                               (std::abs(p.y()) == kDomainHalfWidth && p.y() == q.y());
    if (c != (boundary_edge ? 1 : 2)) return "non-conforming edge (hanging node)";
  }
  return {};
}

SparseMatrix assemble_stiffness(const BulkMesh& mesh) {
  std::vector<Triplet> trip;
  trip.reserve(9 * mesh.num_triangles());
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto& T = mesh.triangles[t];
    const double area = mesh.area(t);
    if (!(area > 0.0)) throw Error("assemble_stiffness: degenerate triangle " + std::to_string(t));
    // grad lambda_i = perp(opposite edge) / (2 area), up to a sign fixed by orientation.
    std::array<Vec2, 3> g;
    for (int i = 0; i < 3; ++i) {
      const Vec2 e = mesh.vertices[T[(i + 2) % 3]] - mesh.vertices[T[(i + 1) % 3]];
      g[i] = Vec2(e.y(), -e.x()) / (2.0 * area);
    }
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) trip.emplace_back(T[i], T[j], area * g[i].dot(g[j]));
  }
  SparseMatrix A(static_cast<Eigen::Index>(mesh.num_vertices()), static_cast<Eigen::Index>(mesh.num_vertices()));
  A.setFromTriplets(trip.begin(), trip.end());
  return A;
}

TriangleLocator::TriangleLocator(const BulkMesh& mesh) : mesh_(&mesh) {
  n_ = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(mesh.num_triangles()) / 2.0)));
  cell_ = 2.0 * kDomainHalfWidth / n_;
  buckets_.resize(static_cast<std::size_t>(n_) * n_);
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto& T = mesh.triangles[t];
    const Vec2 lo = mesh.vertices[T[0]].cwiseMin(mesh.vertices[T[1]]).cwiseMin(mesh.vertices[T[2]]);
    const Vec2 hi = mesh.vertices[T[0]].cwiseMax(mesh.vertices[T[1]]).cwiseMax(mesh.vertices[T[2]]);
    for (int iy = clamp_cell(lo.y()); iy <= clamp_cell(hi.y()); ++iy)
      for (int ix = clamp_cell(lo.x()); ix <= clamp_cell(hi.x()); ++ix)
        buckets_[cell_index(ix, iy)].push_back(static_cast<int>(t));
  }
}

int TriangleLocator::clamp_cell(double coord) const {
  const int i = static_cast<int>(std::floor((coord + kDomainHalfWidth) / cell_));
  return std::clamp(i, 0, n_ - 1);
}

int TriangleLocator::locate(const Vec2& x, double tol) const {
  if (std::abs(x.x()) > kDomainHalfWidth + tol || std::abs(x.y()) > kDomainHalfWidth + tol) return -1;
  int best = -1;
  for (int t : buckets_[cell_index(clamp_cell(x.x()), clamp_cell(x.y()))]) {
    if (best >= 0 && t >= best) continue;
    const auto l = mesh_->barycentric(static_cast<std::size_t>(t), x);
    if (l[0] >= -tol && l[1] >= -tol && l[2] >= -tol) best = t;
  }
  return best;
}

std::vector<int> TriangleLocator::candidates(const Vec2& a, const Vec2& b) const {
  const Vec2 lo = a.cwiseMin(b);
  const Vec2 hi = a.cwiseMax(b);
  std::vector<int> out;
  for (int iy = clamp_cell(lo.y()); iy <= clamp_cell(hi.y()); ++iy)
    for (int ix = clamp_cell(lo.x()); ix <= clamp_cell(hi.x()); ++ix) {
      const auto& bucket = buckets_[cell_index(ix, iy)];
      out.insert(out.end(), bucket.begin(), bucket.end());
    }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<double> transfer(const BulkMesh& from, const std::vector<double>& values, const BulkMesh& to) {
  if (values.size() != from.num_vertices()) throw Error("transfer: field size does not match the mesh");
  const TriangleLocator locator(from);
  std::vector<double> out(to.num_vertices());
  for (std::size_t v = 0; v < to.num_vertices(); ++v) {
    const int t = locator.locate(to.vertices[v], 1e-10);
    if (t < 0) throw Error("transfer: vertex outside the source mesh");
    const auto l = from.barycentric(static_cast<std::size_t>(t), to.vertices[v]);
    const auto& T = from.triangles[static_cast<std::size_t>(t)];
    out[v] = l[0] * values[T[0]] + l[1] * values[T[1]] + l[2] * values[T[2]];
  }
  return out;
}

bool BoundarySpec::is_dirichlet(const BulkMesh& mesh, std::size_t v) const {
  switch (side) {
    case DirichletSide::None:
      return false;
    case DirichletSide::All:
      return mesh.on_boundary(v);
    case DirichletSide::Right:
      return mesh.vertices[v].x() == kDomainHalfWidth;
  }
  return false;
}

void BoundarySpec::validate(std::size_t phases) const {
  if (side == DirichletSide::None) return;
  if (w_D.size() != phases) throw ConfigError("boundary.w_D must have one entry per phase");
  const double sum = std::accumulate(w_D.begin(), w_D.end(), 0.0);
  double scale = 0.0;
  for (double w : w_D) scale = std::max(scale, std::abs(w));
  if (std::abs(sum) > 1e-12 * std::max(1.0, scale)) throw ConfigError("boundary.w_D must sum to zero");
}

std::string to_string(DirichletSide side) {
  switch (side) {
    case DirichletSide::None:
      return "none";
    case DirichletSide::All:
      return "all";
    case DirichletSide::Right:
      return "right";
  }
  return "none";
}

DirichletSide dirichlet_side_from_string(const std::string& name) {
  if (name == "none") return DirichletSide::None;
  if (name == "all") return DirichletSide::All;
  if (name == "right") return DirichletSide::Right;
  throw ConfigError("unknown Dirichlet selector '" + name + "' (expected none, all or right)");
}

void dirichlet_apply(std::vector<Triplet>& triplets, Eigen::VectorXd& rhs, const BulkMesh& mesh,
                     const BoundarySpec& spec, std::size_t offset, double value) {
  if (spec.side == DirichletSide::None) return;
  std::vector<bool> fixed(mesh.num_vertices(), false);
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) fixed[v] = spec.is_dirichlet(mesh, v);
  const auto lo = static_cast<Eigen::Index>(offset);
  const auto hi = static_cast<Eigen::Index>(offset + mesh.num_vertices());
  std::erase_if(triplets, [&](const Triplet& t) {
    return t.row() >= lo && t.row() < hi && fixed[static_cast<std::size_t>(t.row() - lo)];
  });
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
    if (!fixed[v]) continue;
    const auto r = static_cast<Eigen::Index>(offset + v);
    triplets.emplace_back(r, r, 1.0);
    rhs[r] = value;
  }
}

}  // namespace msflow
