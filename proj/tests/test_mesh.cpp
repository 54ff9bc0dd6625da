#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "abpole/mesh.hpp"

using namespace abpole;

namespace {

double min_incident_edge(const Mesh& m, int v) {
  double best = 1e300;
  for (const auto& t : m.triangles)
    for (int i = 0; i < 3; ++i)
      if (t[i] == v)
        for (int j = 1; j < 3; ++j) best = std::min(best, distance(m.vertices[v], m.vertices[t[(i + j) % 3]]));
  return best;
}

int find_vertex(const Mesh& m, Point2 p) {
  for (std::size_t i = 0; i < m.vertices.size(); ++i)
    if (m.vertices[i] == p) return static_cast<int>(i);
  return -1;
}

CutSpec ray_cut(Point2 from, Point2 to, int id = 0) { return CutSpec{{from, to}, {id}}; }

}  // namespace

TEST_CASE("unit disk mesh: positive areas, boundary on the circle, Euler relation") {
  const Mesh m = generate_disk_mesh({0, 0}, 1.0, 0.2, {});
  for (std::size_t t = 0; t < m.num_triangles(); ++t) CHECK(m.triangle_area(t) > 0.0);
  const auto bnd = m.outer_boundary_vertices();
  REQUIRE(!bnd.empty());
  for (int v : bnd) CHECK(std::abs(norm(m.vertices[v]) - 1.0) <= 1e-3 * 0.2);
  const long V = static_cast<long>(m.num_vertices());
  const long E = static_cast<long>(m.count_unique_edges());
  const long F = static_cast<long>(m.num_triangles());
  CHECK(V - E + F == 1);
}

TEST_CASE("grading toward the origin refines the incident edges") {
  const GradingPoint g{{0, 0}, 0.5};
  const Mesh m = generate_disk_mesh({0, 0}, 1.0, 0.1, std::span(&g, 1), std::span<const CutSpec>{});
  const int origin = find_vertex(m, {0, 0});
  REQUIRE(origin >= 0);
  CHECK(min_incident_edge(m, origin) <= 0.1 / 5);
}

TEST_CASE("mesh size not below the radius is rejected") {
  CHECK_THROWS_AS(generate_disk_mesh({0, 0}, 1.0, 1.5, {}), PreconditionError);
  CHECK_THROWS_AS(generate_half_disk_mesh(8.0, 9.0, {}), PreconditionError);
}

TEST_CASE("half disk: forced vertex at (1,0) and boundary partition") {
  const Mesh m = generate_half_disk_mesh(8.0, 0.2, {});
  CHECK(find_vertex(m, {1.0, 0.0}) >= 0);
  CHECK(find_vertex(m, {0.0, 0.0}) >= 0);
  for (const TaggedEdge& e : m.tagged_edges) {
    REQUIRE(e.tag.kind == EdgeKind::Outer);
    const Point2 a = m.vertices[e.a], b = m.vertices[e.b];
    const Point2 mid = 0.5 * (a + b);
    switch (e.tag.id) {
      case half_disk::kArc:
        CHECK(std::abs(norm(a) - 8.0) < 1e-9);
        CHECK(std::abs(norm(b) - 8.0) < 1e-9);
        break;
      case half_disk::kAxisLeft:
        CHECK((a.y == 0.0 && b.y == 0.0 && mid.x < 0.0));
        break;
      case half_disk::kAxisFree:
        CHECK((a.y == 0.0 && b.y == 0.0 && mid.x > 0.0 && mid.x < 1.0));
        break;
      case half_disk::kAxisDirichlet:
        CHECK((a.y == 0.0 && b.y == 0.0 && mid.x > 1.0 && mid.x < 8.0));
        break;
      default:
        FAIL("unexpected part id");
    }
  }
  CHECK(m.total_area() == doctest::Approx(0.5 * kPi * 64).epsilon(2e-3));
}

TEST_CASE("half disk vertex count scales like 1/h^2") {
  const double coarse = static_cast<double>(generate_half_disk_mesh(8.0, 0.1, {}).num_vertices());
  const double fine = static_cast<double>(generate_half_disk_mesh(8.0, 0.05, {}).num_vertices());
  CHECK(fine / coarse >= 3.0);
  CHECK(fine / coarse <= 6.0);
}

TEST_CASE("ray cut from the center duplicates interior ray nodes only") {
  const CutSpec cut = ray_cut({0, 0}, {1, 0});
  const Mesh m = generate_disk_mesh({0, 0}, 1.0, 0.1, {}, std::span(&cut, 1));
  int ray_nodes = 0;
  for (const Point2& p : m.vertices)
    if (p.y == 0.0 && p.x > 0.0 && p.x < 1.0) ++ray_nodes;
  const CrackedMesh cm = cut_mesh(m, std::span(&cut, 1));
  CHECK(cm.num_nodes() == m.num_vertices() + static_cast<std::size_t>(ray_nodes));
  // The boundary endpoint is kept single as well; the only crack tip inside
  // the disk is the center.
  std::vector<Point2> interior_tips;
  for (int t : cm.tips)
    if (norm(cm.base.vertices[t]) < 1.0 - 1e-12) interior_tips.push_back(cm.base.vertices[t]);
  REQUIRE(interior_tips.size() == 1);
  CHECK(interior_tips[0] == Point2{0, 0});
  CHECK(cm.base.total_area() == doctest::Approx(m.total_area()).epsilon(1e-12));

  // Twins form an involution between coincident nodes on opposite sides.
  int twins = 0;
  for (std::size_t v = 0; v < cm.num_nodes(); ++v) {
    const int t = cm.twin[v];
    if (t < 0) continue;
    ++twins;
    CHECK(cm.twin[t] == static_cast<int>(v));
    CHECK(cm.base.vertices[t] == cm.base.vertices[v]);
    CHECK(cm.side[t] == (cm.side[v] == Side::Plus ? Side::Minus : Side::Plus));
  }
  CHECK(twins == 2 * ray_nodes);
  for (const auto& tri : cm.base.triangles)
    CHECK(signed_area(cm.base.vertices[tri[0]], cm.base.vertices[tri[1]], cm.base.vertices[tri[2]]) > 0.0);
}

TEST_CASE("two cuts meeting at the origin share a non-duplicated tip") {
  const std::vector<CutSpec> cuts{ray_cut({0, 0}, {1, 0}, 0), ray_cut({0, 0}, {0, 0.5}, 1)};
  const Mesh m = generate_disk_mesh({0, 0}, 1.0, 0.1, {}, cuts);
  const CrackedMesh cm = cut_mesh(m, cuts);
  const int origin = find_vertex(cm.base, {0, 0});
  REQUIRE(origin >= 0);
  CHECK(cm.twin[origin] == -1);
  CHECK(std::count(cm.tips.begin(), cm.tips.end(), origin) >= 1);
  CHECK(cm.segment(0).chain.front() == origin);
  CHECK(cm.segment(1).chain.front() == origin);
  int at_origin = 0;
  for (const Point2& p : cm.base.vertices) at_origin += p == Point2{0, 0};
  CHECK(at_origin == 1);
}

TEST_CASE("cut not along mesh edges is rejected") {
  const Mesh m = generate_disk_mesh({0, 0}, 1.0, 0.1, {});
  const CutSpec cut = ray_cut({0.0123, 0.0456}, {0.7, 0.31});
  CHECK_THROWS_AS(cut_mesh(m, std::span(&cut, 1)), PreconditionError);
}

TEST_CASE("cutting an already cut segment is rejected") {
  const CutSpec cut = ray_cut({0, 0}, {1, 0});
  const Mesh m = generate_disk_mesh({0, 0}, 1.0, 0.1, {}, std::span(&cut, 1));
  const CrackedMesh cm = cut_mesh(m, std::span(&cut, 1));
  CHECK_THROWS_AS(cut_mesh(cm.base, std::span(&cut, 1)), PreconditionError);
}

TEST_CASE("mirrored half disk covers the full disk") {
  const Mesh half = generate_half_disk_mesh(4.0, 0.2, {});
  std::vector<int> index;
  const Mesh full = mirror_across_axis(half, &index);
  CHECK(full.total_area() == doctest::Approx(2.0 * half.total_area()).epsilon(1e-12));
  REQUIRE(index.size() == half.num_vertices());
  for (std::size_t v = 0; v < index.size(); ++v) {
    const Point2 p = half.vertices[v], q = full.vertices[index[v]];
    CHECK(q.x == p.x);
    CHECK(q.y == -p.y);
  }
}

TEST_CASE("point locator interpolates linear fields exactly") {
  const Mesh m = generate_disk_mesh({0, 0}, 1.0, 0.15, {});
  std::vector<double> f;
  for (const Point2& p : m.vertices) f.push_back(1.0 + 2.0 * p.x - 3.0 * p.y);
  const PointLocator loc(m);
  for (Point2 x : {Point2{0.1, 0.2}, Point2{-0.5, 0.3}, Point2{0.0, -0.9}})
    CHECK(loc.interpolate(f, x) == doctest::Approx(1.0 + 2.0 * x.x - 3.0 * x.y).epsilon(1e-12));
  CHECK_THROWS_AS((void)loc.interpolate(f, {2.0, 0.0}), PreconditionError);
}

TEST_CASE("abmesh round trip") {
  const CutSpec cut = ray_cut({0, 0}, {1, 0});
  const Mesh m = generate_disk_mesh({0, 0}, 1.0, 0.2, {}, std::span(&cut, 1));
  const CrackedMesh cm = cut_mesh(m, std::span(&cut, 1));
  std::stringstream ss;
  write_abmesh(ss, cm);
  const CrackedMesh back = read_abmesh(ss);
  CHECK(back.base.vertices == cm.base.vertices);
  CHECK(back.base.triangles == cm.base.triangles);
  CHECK(back.base.triangle_markers == cm.base.triangle_markers);
  CHECK(back.twin == cm.twin);
  CHECK(back.side == cm.side);
  std::stringstream again;
  write_abmesh(again, back);
  CHECK(again.str() == ss.str());
}
