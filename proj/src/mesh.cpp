#include "abpole/mesh.hpp"

#include <algorithm>
#include <cstdio>
#include <functional>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_map>

#include "triangulator.hpp"

namespace abpole {

using detail::Curve;
using detail::Pslg;

double Mesh::triangle_area(std::size_t t) const {
  const auto& v = triangles[t];
  return signed_area(vertices[v[0]], vertices[v[1]], vertices[v[2]]);
}

double Mesh::total_area() const {
  double s = 0.0;
  for (std::size_t t = 0; t < triangles.size(); ++t) s += triangle_area(t);
  return s;
}

std::vector<int> Mesh::outer_boundary_vertices(int part) const {
  std::set<int> out;
  for (const TaggedEdge& e : tagged_edges) {
    if (e.tag.kind != EdgeKind::Outer || (part >= 0 && e.tag.id != part)) continue;
    out.insert(e.a);
    out.insert(e.b);
  }
  return {out.begin(), out.end()};
}

std::size_t Mesh::count_unique_edges() const {
  std::set<std::pair<int, int>> edges;
  for (const auto& t : triangles)
    for (int k = 0; k < 3; ++k) edges.insert(std::minmax(t[k], t[(k + 1) % 3]));
  return edges.size();
}

double SizingField::operator()(Point2 x) const {
  double s = points.empty() ? 1.0 : cap_ratio;
  for (const GradingPoint& g : points) s = std::min(s, std::pow(distance(x, g.at) / reference_length, g.exponent));
  return h * std::clamp(s, floor_ratio, cap_ratio);
}

namespace {

void check_grading(std::span<const GradingPoint> grading) {
  for (const GradingPoint& g : grading)
    if (!(g.exponent > 0.0 && g.exponent <= 1.0)) throw PreconditionError("grading exponent must lie in (0, 1]");
}

void add_constraint_curves(Pslg& pslg, std::span<const CutSpec> constraints) {
  for (const CutSpec& c : constraints) {
    if (c.polyline.size() < 2 || c.segment_ids.size() + 1 != c.polyline.size())
      throw PreconditionError("constraint polyline needs one segment id per piece");
    for (std::size_t i = 0; i + 1 < c.polyline.size(); ++i)
      pslg.curves.push_back(
          Curve::line(c.polyline[i], c.polyline[i + 1], {EdgeKind::Constraint, c.segment_ids[i]}));
  }
}

/// Split the circle arc [t0, t1] at every constraint point lying on it.
void add_arc(Pslg& pslg, Point2 center, double radius, double t0, double t1, Point2 a, Point2 b, EdgeTag tag,
             std::span<const CutSpec> constraints) {
  std::vector<std::pair<double, Point2>> stops{{t0, a}, {t1, b}};
  const double tol = 1e-12 * radius;
  for (const CutSpec& c : constraints)
    for (Point2 p : c.polyline) {
      if (std::abs(distance(p, center) - radius) > tol) continue;
      const double t = wrap_angle(std::atan2(p.y - center.y, p.x - center.x), t0);
      if (t > t0 + 1e-12 && t < t1 - 1e-12) stops.emplace_back(t, p);
    }
  std::sort(stops.begin(), stops.end(), [](const auto& l, const auto& r) { return l.first < r.first; });
  for (std::size_t i = 0; i + 1 < stops.size(); ++i) {
    if (stops[i + 1].first - stops[i].first < 1e-12) continue;
    pslg.curves.push_back(
        Curve::arc(center, radius, stops[i].first, stops[i + 1].first, stops[i].second, stops[i + 1].second, tag));
  }
}

/// Replace constraint points that nearly coincide with forced boundary
/// vertices by those vertices, so both curves share one mesh vertex.
std::vector<CutSpec> snap_constraints(std::span<const CutSpec> constraints, std::span<const Point2> forced,
                                      double scale) {
  std::vector<CutSpec> out(constraints.begin(), constraints.end());
  for (CutSpec& c : out)
    for (Point2& p : c.polyline)
      for (Point2 q : forced)
        if (distance(p, q) <= 1e-9 * scale) p = q;
  return out;
}

double distance_to_piece(Point2 x, Point2 a, Point2 b) {
  const Point2 d = b - a;
  const double t = std::clamp(dot(x - a, d) / dot(d, d), 0.0, 1.0);
  return distance(x, a + t * d);
}

/// Grading points strictly inside the region become mesh vertices unless they
/// lie on a constraint piece without being one of its vertices.
void add_grading_vertices(Pslg& pslg, const SizingField& sizing, std::span<const CutSpec> constraints, double scale,
                          const std::function<bool(Point2)>& inside) {
  const double tol = 1e-12 * scale;
  for (const GradingPoint& g : sizing.points) {
    if (!inside(g.at)) continue;
    bool on_piece = false, is_vertex = false;
    for (const CutSpec& c : constraints) {
      for (Point2 q : c.polyline) is_vertex = is_vertex || q == g.at;
      for (std::size_t i = 0; i + 1 < c.polyline.size(); ++i)
        on_piece = on_piece || distance_to_piece(g.at, c.polyline[i], c.polyline[i + 1]) <= tol;
    }
    if (!on_piece || is_vertex) pslg.points.push_back(g.at);
  }
}

SizingField make_sizing(double h, double reference, std::span<const GradingPoint> grading) {
  SizingField s;
  s.h = h;
  s.reference_length = reference;
  s.points.assign(grading.begin(), grading.end());
  return s;
}

}  // namespace

Mesh generate_disk_mesh(Point2 center, double radius, double h, std::span<const GradingPoint> grading,
                        std::span<const CutSpec> constraints) {
  return generate_disk_mesh(center, radius, make_sizing(h, radius, grading), constraints);
}

Mesh generate_disk_mesh(Point2 center, double radius, const SizingField& sizing, std::span<const CutSpec> constraints) {
  if (!(radius > 0.0)) throw PreconditionError("disk radius must be positive");
  if (!(sizing.h > 0.0 && sizing.h < radius)) throw PreconditionError("mesh size must satisfy 0 < h < radius");
  check_grading(sizing.points);
  Pslg pslg;
  const Point2 quarter[4] = {{center.x + radius, center.y},
                             {center.x, center.y + radius},
                             {center.x - radius, center.y},
                             {center.x, center.y - radius}};
  const auto snapped = snap_constraints(constraints, quarter, radius);
  for (int q = 0; q < 4; ++q)
    add_arc(pslg, center, radius, q * 0.5 * kPi, (q + 1) * 0.5 * kPi, quarter[q], quarter[(q + 1) % 4],
            {EdgeKind::Outer, 0}, snapped);
  add_constraint_curves(pslg, snapped);
  add_grading_vertices(pslg, sizing, snapped, radius,
                       [&](Point2 x) { return distance(x, center) < radius * (1.0 - 1e-9); });
  return detail::triangulate(pslg, sizing);
}

Mesh generate_half_disk_mesh(double radius, double h, std::span<const GradingPoint> grading,
                             std::span<const CutSpec> constraints) {
  return generate_half_disk_mesh(radius, make_sizing(h, radius, grading), constraints);
}

Mesh generate_half_disk_mesh(double radius, const SizingField& sizing, std::span<const CutSpec> constraints) {
  if (!(radius > 1.0)) throw PreconditionError("half-disk radius must exceed 1");
  if (!(sizing.h > 0.0 && sizing.h < radius)) throw PreconditionError("mesh size must satisfy 0 < h < radius");
  check_grading(sizing.points);
  Pslg pslg;
  const Point2 o{0.0, 0.0}, e{1.0, 0.0}, right{radius, 0.0}, top{0.0, radius}, left{-radius, 0.0};
  const Point2 forced[5] = {o, e, right, top, left};
  const auto snapped = snap_constraints(constraints, forced, radius);
  constraints = snapped;
  add_arc(pslg, o, radius, 0.0, 0.5 * kPi, right, top, {EdgeKind::Outer, half_disk::kArc}, constraints);
  add_arc(pslg, o, radius, 0.5 * kPi, kPi, top, left, {EdgeKind::Outer, half_disk::kArc}, constraints);
  pslg.curves.push_back(Curve::line(left, o, {EdgeKind::Outer, half_disk::kAxisLeft}));
  pslg.curves.push_back(Curve::line(o, e, {EdgeKind::Outer, half_disk::kAxisFree}));
  pslg.curves.push_back(Curve::line(e, right, {EdgeKind::Outer, half_disk::kAxisDirichlet}));
  add_constraint_curves(pslg, constraints);
  add_grading_vertices(pslg, sizing, constraints, radius,
                       [&](Point2 x) { return x.y > 1e-9 * radius && norm(x) < radius * (1.0 - 1e-9); });
  return detail::triangulate(pslg, sizing);
}

Mesh generate_rectangle_mesh(Point2 lo, Point2 hi, double h, std::span<const GradingPoint> grading,
                             std::span<const CutSpec> constraints) {
  const double extent = std::min(hi.x - lo.x, hi.y - lo.y);
  if (!(extent > 0.0)) throw PreconditionError("rectangle must have positive extent");
  if (!(h > 0.0 && h < extent)) throw PreconditionError("mesh size must satisfy 0 < h < side");
  check_grading(grading);
  Pslg pslg;
  const Point2 c[4] = {lo, {hi.x, lo.y}, hi, {lo.x, hi.y}};
  for (int s = 0; s < 4; ++s) pslg.curves.push_back(Curve::line(c[s], c[(s + 1) % 4], {EdgeKind::Outer, s}));
  const auto snapped = snap_constraints(constraints, c, extent);
  add_constraint_curves(pslg, snapped);
  const SizingField sizing = make_sizing(h, std::max(hi.x - lo.x, hi.y - lo.y), grading);
  const double tol = 1e-9 * extent;
  add_grading_vertices(pslg, sizing, snapped, extent, [&](Point2 x) {
    return x.x > lo.x + tol && x.x < hi.x - tol && x.y > lo.y + tol && x.y < hi.y - tol;
  });
  return detail::triangulate(pslg, sizing);
}

const CutSegment& CrackedMesh::segment(int id) const {
  for (const CutSegment& s : segments)
    if (s.id == id) return s;
  throw PreconditionError("unknown cut segment id " + std::to_string(id));
}

int CrackedMesh::node_on_side(int plus_node, Side s) const {
  if (s == Side::Minus && twin[plus_node] >= 0) return twin[plus_node];
  return plus_node;
}

namespace {

int find_vertex(const Mesh& mesh, Point2 p) {
  int best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (int v = 0; v < static_cast<int>(mesh.vertices.size()); ++v) {
    const double d = distance(mesh.vertices[v], p);
    if (d < best_d) best_d = d, best = v;
  }
  if (best < 0 || best_d > 1e-10 * (1.0 + norm(p)))
    throw PreconditionError("cut polyline vertex is not a mesh vertex; re-mesh with the cut as a constraint");
  return best;
}

}  // namespace

CrackedMesh cut_mesh(const Mesh& mesh, std::span<const CutSpec> cuts) {
  const int nv = static_cast<int>(mesh.vertices.size());
  std::vector<std::vector<int>> incident(nv);
  for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t)
    for (int v : mesh.triangles[t]) incident[v].push_back(t);

  std::set<std::pair<int, int>> already_cut;
  for (const TaggedEdge& e : mesh.tagged_edges)
    if (e.tag.kind == EdgeKind::Cut) already_cut.insert(std::minmax(e.a, e.b));

  CrackedMesh cm;
  cm.base = mesh;
  cm.twin.assign(nv, -1);
  cm.side.assign(nv, Side::None);

  struct Interior {
    int node, prev, next;
  };
  std::vector<Interior> interior;
  std::set<int> endpoint_set, interior_set;
  std::set<std::pair<int, int>> new_cut;

  for (const CutSpec& c : cuts) {
    if (c.polyline.size() < 2 || c.segment_ids.size() + 1 != c.polyline.size())
      throw PreconditionError("cut polyline needs one segment id per piece");
    std::vector<int> path{find_vertex(mesh, c.polyline.front())};
    for (std::size_t i = 0; i + 1 < c.polyline.size(); ++i) {
      const Point2 p = c.polyline[i], q = c.polyline[i + 1];
      const int target = find_vertex(mesh, q);
      const Point2 dir = (1.0 / distance(p, q)) * (q - p);
      CutSegment seg{c.segment_ids[i], p, q, {path.back()}};
      int cur = path.back();
      while (cur != target) {
        int best = -1;
        double best_cos = 1.0 - 1e-9;
        for (int t : incident[cur])
          for (int w : mesh.triangles[t]) {
            if (w == cur) continue;
            const Point2 d = mesh.vertices[w] - mesh.vertices[cur];
            const double c = dot(d, dir) / norm(d);
            if (c > best_cos) best_cos = c, best = w;
          }
        if (best < 0)
          throw PreconditionError("cut polyline is not resolved by mesh edges; re-mesh with the cut as a constraint");
        const auto key = std::minmax(cur, best);
        if (already_cut.count(key) || new_cut.count(key))
          throw PreconditionError("cut overlaps an edge that is already cut");
        new_cut.insert(key);
        seg.chain.push_back(best);
        path.push_back(best);
        cur = best;
      }
      cm.segments.push_back(std::move(seg));
    }
    endpoint_set.insert(path.front());
    endpoint_set.insert(path.back());
    for (std::size_t i = 1; i + 1 < path.size(); ++i) {
      if (!interior_set.insert(path[i]).second) throw PreconditionError("cut polylines intersect");
      interior.push_back({path[i], path[i - 1], path[i + 1]});
    }
  }
  for (int v : interior_set)
    if (endpoint_set.count(v)) throw PreconditionError("cut polylines may only meet at endpoints");
  cm.tips.assign(endpoint_set.begin(), endpoint_set.end());

  Mesh& base = cm.base;
  for (const Interior& it : interior) {
    const Point2 x = base.vertices[it.node];
    const double t_next = std::atan2(base.vertices[it.next].y - x.y, base.vertices[it.next].x - x.x);
    const double sweep = wrap_angle(std::atan2(base.vertices[it.prev].y - x.y, base.vertices[it.prev].x - x.x), t_next) - t_next;
    const int dup = static_cast<int>(base.vertices.size());
    base.vertices.push_back(x);
    cm.twin[it.node] = dup;
    cm.twin.push_back(it.node);
    cm.side[it.node] = Side::Plus;
    cm.side.push_back(Side::Minus);
    for (int t : incident[it.node]) {
      auto& tri = base.triangles[t];
      const Point2 g = (1.0 / 3.0) * (base.vertices[tri[0]] + base.vertices[tri[1]] + base.vertices[tri[2]]);
      const double a = wrap_angle(std::atan2(g.y - x.y, g.x - x.x), t_next) - t_next;
      if (a < sweep) continue;  // left of the polyline: Plus side keeps the original node
      for (int& v : tri)
        if (v == it.node) v = dup;
    }
  }

  std::vector<TaggedEdge> edges;
  for (const TaggedEdge& e : mesh.tagged_edges)
    if (e.tag.kind != EdgeKind::Constraint || !new_cut.count(std::minmax(e.a, e.b))) edges.push_back(e);
  for (const CutSegment& s : cm.segments)
    for (std::size_t i = 0; i + 1 < s.chain.size(); ++i) {
      edges.push_back({s.chain[i], s.chain[i + 1], {EdgeKind::Cut, s.id}});
      const int a = cm.node_on_side(s.chain[i], Side::Minus), b = cm.node_on_side(s.chain[i + 1], Side::Minus);
      if (a != s.chain[i] || b != s.chain[i + 1]) edges.push_back({a, b, {EdgeKind::Cut, s.id}});
    }
  base.tagged_edges = std::move(edges);
  return cm;
}

CrackedMesh uncut(const Mesh& mesh) {
  CrackedMesh cm;
  cm.base = mesh;
  cm.twin.assign(mesh.vertices.size(), -1);
  cm.side.assign(mesh.vertices.size(), Side::None);
  return cm;
}

Mesh mirror_across_axis(const Mesh& half, std::vector<int>* mirror_index) {
  Mesh full;
  full.h_target = half.h_target;
  full.vertices = half.vertices;
  std::vector<int> image(half.vertices.size());
  for (std::size_t v = 0; v < half.vertices.size(); ++v) {
    const Point2 p = half.vertices[v];
    if (p.y == 0.0) {
      image[v] = static_cast<int>(v);
    } else {
      image[v] = static_cast<int>(full.vertices.size());
      full.vertices.push_back({p.x, -p.y});
    }
  }
  full.triangles = half.triangles;
  full.triangle_markers.assign(half.triangles.size(), 0);
  for (const auto& t : half.triangles) {
    full.triangles.push_back({image[t[0]], image[t[2]], image[t[1]]});
    full.triangle_markers.push_back(1);
  }
  for (const TaggedEdge& e : half.tagged_edges) {
    if (e.tag.kind == EdgeKind::Outer && e.tag.id == half_disk::kArc) {
      full.tagged_edges.push_back(e);
      full.tagged_edges.push_back({image[e.a], image[e.b], e.tag});
    } else if (e.tag.kind == EdgeKind::Outer) {
      full.tagged_edges.push_back({e.a, e.b, {EdgeKind::Constraint, e.tag.id}});
    } else {
      full.tagged_edges.push_back(e);
    }
  }
  if (mirror_index) *mirror_index = std::move(image);
  return full;
}

PointLocator::PointLocator(const Mesh& mesh) : mesh_(&mesh) {
  if (mesh.triangles.empty()) throw PreconditionError("point locator needs a non-empty mesh");
  Point2 hi = mesh.vertices.front();
  lo_ = hi;
  for (Point2 p : mesh.vertices) {
    lo_ = {std::min(lo_.x, p.x), std::min(lo_.y, p.y)};
    hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
  }
  const double w = std::max(hi.x - lo_.x, 1e-300), hgt = std::max(hi.y - lo_.y, 1e-300);
  cell_ = std::sqrt(w * hgt / static_cast<double>(mesh.triangles.size())) * 2.0;
  nx_ = std::max(1, static_cast<int>(std::ceil(w / cell_)));
  ny_ = std::max(1, static_cast<int>(std::ceil(hgt / cell_)));
  auto cells_of = [&](const std::array<int, 3>& t, auto&& emit) {
    Point2 a = mesh.vertices[t[0]], b = a;
    for (int v : t) {
      const Point2 p = mesh.vertices[v];
      a = {std::min(a.x, p.x), std::min(a.y, p.y)};
      b = {std::max(b.x, p.x), std::max(b.y, p.y)};
    }
    const int i0 = std::clamp(static_cast<int>((a.x - lo_.x) / cell_), 0, nx_ - 1);
    const int i1 = std::clamp(static_cast<int>((b.x - lo_.x) / cell_), 0, nx_ - 1);
    const int j0 = std::clamp(static_cast<int>((a.y - lo_.y) / cell_), 0, ny_ - 1);
    const int j1 = std::clamp(static_cast<int>((b.y - lo_.y) / cell_), 0, ny_ - 1);
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i) emit(j * nx_ + i);
  };
  std::vector<int> count(static_cast<std::size_t>(nx_) * ny_ + 1, 0);
  for (const auto& t : mesh.triangles) cells_of(t, [&](int c) { ++count[c + 1]; });
  for (std::size_t c = 1; c < count.size(); ++c) count[c] += count[c - 1];
  start_ = count;
  items_.resize(count.back());
  for (int ti = 0; ti < static_cast<int>(mesh.triangles.size()); ++ti)
    cells_of(mesh.triangles[ti], [&](int c) { items_[count[c]++] = ti; });
}

PointLocator::Hit PointLocator::locate(Point2 x) const {
  Hit best;
  const int i = static_cast<int>(std::floor((x.x - lo_.x) / cell_));
  const int j = static_cast<int>(std::floor((x.y - lo_.y) / cell_));
  if (i < 0 || j < 0 || i >= nx_ || j >= ny_) return best;
  const int c = j * nx_ + i;
  double best_min = -1e-10;
  for (int q = start_[c]; q < start_[c + 1]; ++q) {
    const auto& t = mesh_->triangles[items_[q]];
    const Point2 a = mesh_->vertices[t[0]], b = mesh_->vertices[t[1]], cc = mesh_->vertices[t[2]];
    const double area2 = cross(b - a, cc - a);
    const std::array<double, 3> l = {cross(b - x, cc - x) / area2, cross(cc - x, a - x) / area2,
                                     cross(a - x, b - x) / area2};
    const double m = std::min({l[0], l[1], l[2]});
    if (m > best_min) {
      best_min = m;
      best = {items_[q], l};
    }
  }
  return best;
}

double PointLocator::interpolate(std::span<const double> values, Point2 x) const {
  const Hit h = locate(x);
  if (h.triangle < 0) throw PreconditionError("interpolation point lies outside the mesh");
  const auto& t = mesh_->triangles[h.triangle];
  return h.bary[0] * values[t[0]] + h.bary[1] * values[t[1]] + h.bary[2] * values[t[2]];
}

void write_abmesh(std::ostream& os, const CrackedMesh& cm) {
  char buf[96];
  const Mesh& m = cm.base;
  os << "abmesh 1\n";
  os << "V " << m.vertices.size() << '\n';
  for (Point2 p : m.vertices) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g\n", p.x, p.y);
    os << buf;
  }
  os << "T " << m.triangles.size() << '\n';
  for (std::size_t t = 0; t < m.triangles.size(); ++t) {
    const auto& v = m.triangles[t];
    os << v[0] << ' ' << v[1] << ' ' << v[2] << ' ' << (t < m.triangle_markers.size() ? m.triangle_markers[t] : 0)
       << '\n';
  }
  std::size_t count = 0;
  for (const CutSegment& s : cm.segments) count += s.chain.size();
  os << "C " << count << '\n';
  for (const CutSegment& s : cm.segments)
    for (int node : s.chain)
      os << s.id << ' ' << node << ' ' << cm.twin[node] << ' ' << static_cast<int>(cm.side[node]) << '\n';
}

CrackedMesh read_abmesh(std::istream& is) {
  auto fail = [](const std::string& what) { return PreconditionError("abmesh: " + what); };
  std::string word;
  int version = 0;
  if (!(is >> word >> version) || word != "abmesh" || version != 1) throw fail("bad header");
  std::size_t n = 0;
  if (!(is >> word >> n) || word != "V") throw fail("missing V block");
  CrackedMesh cm;
  Mesh& m = cm.base;
  m.vertices.resize(n);
  for (Point2& p : m.vertices)
    if (!(is >> p.x >> p.y)) throw fail("truncated vertex block");
  if (!(is >> word >> n) || word != "T") throw fail("missing T block");
  m.triangles.resize(n);
  m.triangle_markers.resize(n);
  for (std::size_t t = 0; t < n; ++t) {
    auto& v = m.triangles[t];
    if (!(is >> v[0] >> v[1] >> v[2] >> m.triangle_markers[t])) throw fail("truncated triangle block");
    for (int i : v)
      if (i < 0 || i >= static_cast<int>(m.vertices.size())) throw fail("triangle index out of range");
  }
  if (!(is >> word >> n) || word != "C") throw fail("missing C block");
  cm.twin.assign(m.vertices.size(), -1);
  cm.side.assign(m.vertices.size(), Side::None);
  std::map<int, std::size_t> seg_pos;
  for (std::size_t r = 0; r < n; ++r) {
    int id, node, twin, side;
    if (!(is >> id >> node >> twin >> side)) throw fail("truncated cut block");
    if (node < 0 || node >= static_cast<int>(m.vertices.size())) throw fail("cut node out of range");
    auto [it, fresh] = seg_pos.try_emplace(id, cm.segments.size());
    if (fresh) cm.segments.push_back({id, m.vertices[node], m.vertices[node], {}});
    cm.segments[it->second].chain.push_back(node);
    cm.segments[it->second].to = m.vertices[node];
    if (twin >= 0) {
      cm.twin[node] = twin;
      cm.twin[twin] = node;
      cm.side[node] = static_cast<Side>(side);
      cm.side[twin] = side == 1 ? Side::Minus : Side::Plus;
    }
  }

  // Rebuild edge tags: chain edges are Cut, remaining single-sided edges Outer.
  std::set<std::pair<int, int>> cut_edges;
  std::set<int> tips;
  for (const CutSegment& s : cm.segments) {
    for (int end : {s.chain.front(), s.chain.back()})
      if (cm.twin[end] < 0) tips.insert(end);
    for (std::size_t i = 0; i + 1 < s.chain.size(); ++i) {
      const int a = s.chain[i], b = s.chain[i + 1];
      m.tagged_edges.push_back({a, b, {EdgeKind::Cut, s.id}});
      cut_edges.insert(std::minmax(a, b));
      const int ma = cm.node_on_side(a, Side::Minus), mb = cm.node_on_side(b, Side::Minus);
      if (ma != a || mb != b) {
        m.tagged_edges.push_back({ma, mb, {EdgeKind::Cut, s.id}});
        cut_edges.insert(std::minmax(ma, mb));
      }
    }
  }
  cm.tips.assign(tips.begin(), tips.end());
  std::map<std::pair<int, int>, int> use;
  for (const auto& t : m.triangles)
    for (int k = 0; k < 3; ++k) ++use[std::minmax(t[k], t[(k + 1) % 3])];
  for (const auto& [e, c] : use)
    if (c == 1 && !cut_edges.count(e)) m.tagged_edges.push_back({e.first, e.second, {EdgeKind::Outer, 0}});
  return cm;
}

}  // namespace abpole
