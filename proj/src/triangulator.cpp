#include "triangulator.hpp"

#include <algorithm>
#include <cstdint>
#include <deque>
#include <limits>
#include <map>
#include <tuple>
#include <unordered_map>
#include <utility>

namespace abpole::detail {

Point2 Curve::eval(double s) const {
  if (s <= 0.0) return start;
  if (s >= 1.0) return end;
  if (shape == Shape::Line) return start + s * (end - start);
  return center + polar(radius, angle0 + s * (angle1 - angle0));
}

double Curve::length() const {
  if (shape == Shape::Line) return distance(start, end);
  return radius * std::abs(angle1 - angle0);
}

Curve Curve::line(Point2 a, Point2 b, EdgeTag tag) {
  Curve c;
  c.shape = Shape::Line;
  c.start = a;
  c.end = b;
  c.tag = tag;
  return c;
}

Curve Curve::arc(Point2 center, double radius, double t0, double t1, Point2 a, Point2 b, EdgeTag tag) {
  Curve c;
  c.shape = Shape::Arc;
  c.center = center;
  c.radius = radius;
  c.angle0 = t0;
  c.angle1 = t1;
  c.start = a;
  c.end = b;
  c.tag = tag;
  return c;
}

namespace {

constexpr double kMaxRadiusEdgeRatio = 1.4142135623730951;  // min angle ~20.7 deg

struct Tri {
  std::array<int, 3> v;
  std::array<int, 3> n{-1, -1, -1};  // n[i] lies across the edge opposite v[i]
  bool alive = true;
};

struct Subsegment {
  int a;
  int b;
  int curve;
  double sa;
  double sb;
  bool alive = true;
};

std::uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) | static_cast<std::uint32_t>(b);
}

class Refiner {
public:
  Refiner(const Pslg& pslg, const SizingField& size) : pslg_(pslg), size_(size), min_len_(0.5 * size.min_size()) {}

  Mesh run();

private:
  static bool is_super(int v) { return v < 3; }
  bool touches_super(int t) const {
    const auto& v = tris_[t].v;
    return is_super(v[0]) || is_super(v[1]) || is_super(v[2]);
  }

  int add_triangle(int a, int b, int c);
  int locate(Point2 p, int start) const;
  std::vector<int> cavity(Point2 p, int seed);
  int insert(Point2 p, std::vector<int> cav);
  std::vector<int> fan(int a) const;
  bool has_edge(int a, int b) const;
  bool encroached(const Subsegment& s) const;
  void split(int sub);
  void recover_segments();
  void refine_triangles();
  bool needs_split(int t) const;

  const Pslg& pslg_;
  const SizingField& size_;
  double min_len_;

  std::vector<Point2> pts_;
  std::vector<Tri> tris_;
  std::vector<int> vtri_;
  std::vector<int> mark_;
  int stamp_ = 0;
  int hint_ = 0;
  std::vector<int> new_tris_;

  std::vector<Subsegment> subs_;
  std::unordered_map<std::uint64_t, int> sub_of_edge_;
  std::deque<int> seg_queue_;
  std::deque<int> tri_queue_;
};

int Refiner::add_triangle(int a, int b, int c) {
  const int id = static_cast<int>(tris_.size());
  tris_.push_back(Tri{{a, b, c}});
  vtri_[a] = vtri_[b] = vtri_[c] = id;
  return id;
}

int Refiner::locate(Point2 p, int start) const {
  int t = start;
  unsigned rot = 0;
  const std::size_t cap = 4 * tris_.size() + 64;
  for (std::size_t step = 0; step < cap; ++step) {
    const auto& tri = tris_[t];
    bool moved = false;
    for (int j = 0; j < 3; ++j) {
      const int k = static_cast<int>((j + rot) % 3);
      const int a = tri.v[(k + 1) % 3], b = tri.v[(k + 2) % 3];
      if (orient2d(pts_[a], pts_[b], p) < 0.0) {
        if (tri.n[k] < 0) throw NumericalError("mesh generator: point outside the enclosing triangle");
        t = tri.n[k];
        moved = true;
        break;
      }
    }
    ++rot;
    if (!moved) return t;
  }
  throw NumericalError("mesh generator: point location did not terminate");
}

std::vector<int> Refiner::cavity(Point2 p, int seed) {
  if (mark_.size() < tris_.size()) mark_.resize(tris_.size() * 2, 0);
  ++stamp_;
  std::vector<int> cav{seed};
  mark_[seed] = stamp_;
  for (std::size_t i = 0; i < cav.size(); ++i) {
    for (int nb : tris_[cav[i]].n) {
      if (nb < 0 || mark_[nb] == stamp_) continue;
      const auto& v = tris_[nb].v;
      if (incircle(pts_[v[0]], pts_[v[1]], pts_[v[2]], p) > 0.0) {
        mark_[nb] = stamp_;
        cav.push_back(nb);
      }
    }
  }
  return cav;
}

int Refiner::insert(Point2 p, std::vector<int> cav) {
  struct Rim {
    int a, b, outside, owner;
  };
  std::vector<Rim> rim;
  // Shrink the cavity until it is star-shaped from p. With exact predicates
  // this loop runs once.
  for (int attempt = 0;; ++attempt) {
    if (mark_.size() < tris_.size()) mark_.resize(tris_.size() * 2, 0);
    ++stamp_;
    for (int t : cav) mark_[t] = stamp_;
    rim.clear();
    int bad_owner = -1;
    for (int t : cav) {
      const auto& tri = tris_[t];
      for (int k = 0; k < 3; ++k) {
        const int nb = tri.n[k];
        if (nb >= 0 && mark_[nb] == stamp_) continue;
        const int a = tri.v[(k + 1) % 3], b = tri.v[(k + 2) % 3];
        if (orient2d(pts_[a], pts_[b], p) <= 0.0) bad_owner = t;
        rim.push_back({a, b, nb, t});
      }
    }
    if (bad_owner < 0) break;
    if (bad_owner == cav.front() || attempt > 64)
      throw NumericalError("mesh generator: insertion cavity is not star-shaped");
    cav.erase(std::find(cav.begin(), cav.end(), bad_owner));
  }

  const int pv = static_cast<int>(pts_.size());
  pts_.push_back(p);
  vtri_.push_back(-1);
  for (int t : cav) tris_[t].alive = false;

  new_tris_.clear();
  std::unordered_map<int, int> by_start, by_end;
  for (const Rim& r : rim) {
    const int t = add_triangle(r.a, r.b, pv);
    tris_[t].n[2] = r.outside;
    if (r.outside >= 0) {
      for (int& m : tris_[r.outside].n)
        if (m == r.owner) m = t;
    }
    by_start[r.a] = t;
    by_end[r.b] = t;
    new_tris_.push_back(t);
  }
  for (int t : new_tris_) {
    auto& tri = tris_[t];
    tri.n[0] = by_start.at(tri.v[1]);  // edge (b, p)
    tri.n[1] = by_end.at(tri.v[0]);    // edge (p, a)
  }
  hint_ = new_tris_.front();
  return pv;
}

std::vector<int> Refiner::fan(int a) const {
  std::vector<int> out;
  const int t0 = vtri_[a];
  if (t0 < 0 || !tris_[t0].alive) return out;
  auto index_of = [&](int t) {
    const auto& v = tris_[t].v;
    return v[0] == a ? 0 : (v[1] == a ? 1 : 2);
  };
  int t = t0;
  do {
    out.push_back(t);
    t = tris_[t].n[(index_of(t) + 1) % 3];
  } while (t >= 0 && t != t0);
  if (t < 0) {
    t = tris_[t0].n[(index_of(t0) + 2) % 3];
    while (t >= 0) {
      out.push_back(t);
      t = tris_[t].n[(index_of(t) + 2) % 3];
    }
  }
  return out;
}

bool Refiner::has_edge(int a, int b) const {
  for (int t : fan(a)) {
    const auto& v = tris_[t].v;
    if (v[0] == b || v[1] == b || v[2] == b) return true;
  }
  return false;
}

bool Refiner::encroached(const Subsegment& s) const {
  bool present = false;
  for (int t : fan(s.a)) {
    const auto& v = tris_[t].v;
    if (v[0] != s.b && v[1] != s.b && v[2] != s.b) continue;
    present = true;
    const int apex = v[0] != s.a && v[0] != s.b ? v[0] : (v[1] != s.a && v[1] != s.b ? v[1] : v[2]);
    if (is_super(apex)) continue;
    if (dot(pts_[s.a] - pts_[apex], pts_[s.b] - pts_[apex]) < 0.0) return true;
  }
  return !present;
}

void Refiner::split(int id) {
  const Subsegment s = subs_[id];
  const Curve& curve = pslg_.curves[s.curve];
  const double sm = 0.5 * (s.sa + s.sb);
  const Point2 m = curve.eval(sm);
  if (distance(pts_[s.a], pts_[s.b]) < 1e-13 * (1.0 + norm(m)))
    throw NumericalError("mesh generator: constraint segment cannot be recovered");
  const int t = locate(m, vtri_[s.a]);
  const int mv = insert(m, cavity(m, t));

  subs_[id].alive = false;
  sub_of_edge_.erase(edge_key(s.a, s.b));
  for (auto [x, y, sx, sy] : {std::tuple{s.a, mv, s.sa, sm}, std::tuple{mv, s.b, sm, s.sb}}) {
    const int nid = static_cast<int>(subs_.size());
    subs_.push_back({x, y, s.curve, sx, sy});
    sub_of_edge_[edge_key(x, y)] = nid;
    seg_queue_.push_back(nid);
  }
  for (int nt : new_tris_) {
    const auto& v = tris_[nt].v;
    if (auto it = sub_of_edge_.find(edge_key(v[0], v[1])); it != sub_of_edge_.end()) seg_queue_.push_back(it->second);
    tri_queue_.push_back(nt);
  }
}

void Refiner::recover_segments() {
  std::size_t guard = 0;
  while (!seg_queue_.empty()) {
    if (++guard > 50'000'000) throw NumericalError("mesh generator: segment recovery did not terminate");
    const int id = seg_queue_.front();
    seg_queue_.pop_front();
    const Subsegment& s = subs_[id];
    if (!s.alive) continue;
    if (!encroached(s)) continue;
    const bool missing = !has_edge(s.a, s.b);
    if (missing || distance(pts_[s.a], pts_[s.b]) > 2.0 * min_len_) split(id);
  }
}

bool Refiner::needs_split(int t) const {
  const auto& v = tris_[t].v;
  const Point2 a = pts_[v[0]], b = pts_[v[1]], c = pts_[v[2]];
  const double la = distance(b, c), lb = distance(c, a), lc = distance(a, b);
  const double lmin = std::min({la, lb, lc}), lmax = std::max({la, lb, lc});
  const double area2 = cross(b - a, c - a);
  if (area2 <= 0.0) return false;
  const double circumradius = la * lb * lc / (2.0 * area2);
  const Point2 centroid = (1.0 / 3.0) * (a + b + c);
  if (lmax > size_(centroid) && circumradius > min_len_) return true;
  return lmin > min_len_ && circumradius / lmin > kMaxRadiusEdgeRatio;
}

void Refiner::refine_triangles() {
  for (int t = 0; t < static_cast<int>(tris_.size()); ++t)
    if (tris_[t].alive) tri_queue_.push_back(t);

  std::size_t guard = 0;
  while (!tri_queue_.empty()) {
    if (++guard > 100'000'000) throw NumericalError("mesh generator: refinement did not terminate");
    const int t = tri_queue_.front();
    tri_queue_.pop_front();
    if (!tris_[t].alive || touches_super(t) || !needs_split(t)) continue;

    const auto& v = tris_[t].v;
    const Point2 cc = circumcenter(pts_[v[0]], pts_[v[1]], pts_[v[2]]);
    std::vector<int> cav = cavity(cc, t);

    std::vector<int> hit;
    bool outside = false;
    double nearest = std::numeric_limits<double>::infinity();
    for (int ct : cav) {
      const auto& cv = tris_[ct].v;
      if (touches_super(ct)) outside = true;
      for (int k = 0; k < 3; ++k) {
        nearest = std::min(nearest, distance(pts_[cv[k]], cc));
        auto it = sub_of_edge_.find(edge_key(cv[k], cv[(k + 1) % 3]));
        if (it == sub_of_edge_.end()) continue;
        const Subsegment& s = subs_[it->second];
        if (dot(pts_[s.a] - cc, pts_[s.b] - cc) < 0.0 &&
            std::find(hit.begin(), hit.end(), it->second) == hit.end())
          hit.push_back(it->second);
      }
    }
    if (!hit.empty()) {
      bool progressed = false;
      for (int id : hit) {
        if (!subs_[id].alive) continue;
        if (distance(pts_[subs_[id].a], pts_[subs_[id].b]) <= 2.0 * min_len_) continue;
        split(id);
        progressed = true;
      }
      recover_segments();
      if (progressed && tris_[t].alive) tri_queue_.push_back(t);
      continue;
    }
    if (outside || nearest < 1e-9 * min_len_) continue;
    insert(cc, std::move(cav));
    for (int nt : new_tris_) tri_queue_.push_back(nt);
  }
}

Mesh Refiner::run() {
  // Discretize every curve according to the sizing field.
  std::map<std::pair<double, double>, int> registry;
  std::vector<Point2> initial;
  auto vertex_of = [&](Point2 p) {
    auto [it, fresh] = registry.try_emplace({p.x, p.y}, static_cast<int>(initial.size()) + 3);
    if (fresh) initial.push_back(p);
    return it->second;
  };
  struct Piece {
    int a, b, curve;
    double sa, sb;
  };
  std::vector<Piece> pieces;
  for (int ci = 0; ci < static_cast<int>(pslg_.curves.size()); ++ci) {
    const Curve& c = pslg_.curves[ci];
    const double len = c.length();
    if (len <= 0.0) continue;
    std::vector<double> params{0.0};
    double s = 0.0;
    for (;;) {
      double step = size_(c.eval(s));
      for (int it = 0; it < 4; ++it) step = std::min(size_(c.eval(s)), size_(c.eval(std::min(1.0, s + step / len))));
      step = std::max(step, size_.min_size());
      const double next = s + step / len;
      if (next >= 1.0 - 0.5 * step / len) break;
      params.push_back(next);
      s = next;
    }
    params.push_back(1.0);
    int prev = vertex_of(c.start);
    for (std::size_t i = 1; i < params.size(); ++i) {
      const int cur = vertex_of(i + 1 == params.size() ? c.end : c.eval(params[i]));
      pieces.push_back({prev, cur, ci, params[i - 1], params[i]});
      prev = cur;
    }
  }
  for (Point2 p : pslg_.points) vertex_of(p);

  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (Point2 p : initial) {
    xmin = std::min(xmin, p.x), xmax = std::max(xmax, p.x);
    ymin = std::min(ymin, p.y), ymax = std::max(ymax, p.y);
  }
  const Point2 mid{0.5 * (xmin + xmax), 0.5 * (ymin + ymax)};
  const double span = std::max(xmax - xmin, ymax - ymin) + 1.0;
  pts_ = {mid + Point2{-40.0 * span, -40.0 * span}, mid + Point2{40.0 * span, -40.0 * span},
          mid + Point2{0.0, 40.0 * span}};
  vtri_.assign(3, -1);
  add_triangle(0, 1, 2);

  for (Point2 p : initial) {
    const int t = locate(p, tris_[hint_].alive ? hint_ : static_cast<int>(tris_.size()) - 1);
    insert(p, cavity(p, t));
  }

  for (const Piece& pc : pieces) {
    const int id = static_cast<int>(subs_.size());
    subs_.push_back({pc.a, pc.b, pc.curve, pc.sa, pc.sb});
    sub_of_edge_[edge_key(pc.a, pc.b)] = id;
    seg_queue_.push_back(id);
  }
  recover_segments();
  refine_triangles();
  for (int id = 0; id < static_cast<int>(subs_.size()); ++id)
    if (subs_[id].alive) seg_queue_.push_back(id);
  recover_segments();
  for (const Subsegment& s : subs_)
    if (s.alive && !has_edge(s.a, s.b)) throw NumericalError("mesh generator: constraint edge lost");

  Mesh mesh;
  mesh.vertices.assign(pts_.begin() + 3, pts_.end());
  for (const Tri& t : tris_) {
    if (!t.alive || is_super(t.v[0]) || is_super(t.v[1]) || is_super(t.v[2])) continue;
    mesh.triangles.push_back({t.v[0] - 3, t.v[1] - 3, t.v[2] - 3});
  }
  mesh.triangle_markers.assign(mesh.triangles.size(), 0);
  for (const Subsegment& s : subs_) {
    if (!s.alive) continue;
    mesh.tagged_edges.push_back({s.a - 3, s.b - 3, pslg_.curves[s.curve].tag});
  }
  mesh.h_target = size_.h;
  return mesh;
}

}  // namespace

Mesh triangulate(const Pslg& pslg, const SizingField& size) {
  Refiner r(pslg, size);
  return r.run();
}

}  // namespace abpole::detail
