#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "abpole/geometry.hpp"

namespace abpole {

/// Kind of a tagged mesh edge. Constraint edges are resolved by the mesh but
/// not yet split; Cut edges have been duplicated by cut_mesh.
enum class EdgeKind : std::uint8_t { Outer, Constraint, Cut };

struct EdgeTag {
  EdgeKind kind = EdgeKind::Outer;
  int id = 0;  ///< boundary part id for Outer, segment id otherwise
  friend bool operator==(EdgeTag, EdgeTag) = default;
};

struct TaggedEdge {
  int a = 0;
  int b = 0;
  EdgeTag tag;
};

/// Boundary part ids of generate_half_disk_mesh.
namespace half_disk {
inline constexpr int kArc = 0;
inline constexpr int kAxisLeft = 1;       ///< diameter from (-R,0) to (0,0)
inline constexpr int kAxisFree = 2;       ///< (0,0) to (1,0)
inline constexpr int kAxisDirichlet = 3;  ///< (1,0) to (R,0)
}  // namespace half_disk

/// Planar triangulation. Triangles are counterclockwise.
struct Mesh {
  std::vector<Point2> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<int> triangle_markers;
  std::vector<TaggedEdge> tagged_edges;
  double h_target = 0.0;

  [[nodiscard]] std::size_t num_vertices() const { return vertices.size(); }
  [[nodiscard]] std::size_t num_triangles() const { return triangles.size(); }
  [[nodiscard]] double triangle_area(std::size_t t) const;
  [[nodiscard]] double total_area() const;
  /// Vertices on edges tagged Outer (optionally restricted to one part id).
  [[nodiscard]] std::vector<int> outer_boundary_vertices(int part = -1) const;
  [[nodiscard]] std::size_t count_unique_edges() const;
};

/// Local size law: h * (|x - q| / reference_length)^exponent near each point,
/// clamped to [floor_ratio, cap_ratio] * h.
struct GradingPoint {
  Point2 at;
  double exponent = 0.5;
};

struct SizingField {
  double h = 0.1;
  double reference_length = 1.0;
  std::vector<GradingPoint> points;
  double floor_ratio = 1e-3;
  double cap_ratio = 1.0;

  [[nodiscard]] double operator()(Point2 x) const;
  [[nodiscard]] double min_size() const { return h * floor_ratio; }
};

/// An ordered polyline that must appear as a union of mesh edges.
/// segment_ids[i] labels the piece polyline[i] -> polyline[i+1].
struct CutSpec {
  std::vector<Point2> polyline;
  std::vector<int> segment_ids;
};

/// Conforming Delaunay triangulation of a disk; constraint polylines become
/// mesh edges and any endpoint lying on the circle becomes a boundary vertex.
Mesh generate_disk_mesh(Point2 center, double radius, double h, std::span<const GradingPoint> grading,
                        std::span<const CutSpec> constraints = {});

/// Same, with an explicit size law (its grading points are validated too).
Mesh generate_disk_mesh(Point2 center, double radius, const SizingField& sizing,
                        std::span<const CutSpec> constraints = {});

/// Upper half-disk {x2 > 0, |x| < radius} with forced vertices at (0,0) and
/// (1,0). Boundary parts are listed in namespace half_disk.
Mesh generate_half_disk_mesh(double radius, double h, std::span<const GradingPoint> grading,
                             std::span<const CutSpec> constraints = {});
Mesh generate_half_disk_mesh(double radius, const SizingField& sizing, std::span<const CutSpec> constraints = {});

/// Axis-aligned rectangle, one boundary part per side (bottom, right, top, left).
Mesh generate_rectangle_mesh(Point2 lo, Point2 hi, double h, std::span<const GradingPoint> grading,
                             std::span<const CutSpec> constraints = {});

enum class Side : std::int8_t { None = 0, Plus = 1, Minus = -1 };

/// Node chain of one cut segment, ordered from its start to its end, using
/// the Plus-side node index at every position.
struct CutSegment {
  int id = 0;
  Point2 from;
  Point2 to;
  std::vector<int> chain;
};

/// Mesh with nodes duplicated along cut segments. The Plus side is the left
/// side of the directed polyline; its outward normal is the direction
/// rotated clockwise.
struct CrackedMesh {
  Mesh base;
  std::vector<int> twin;    ///< per vertex, duplicate on the other side or -1
  std::vector<Side> side;   ///< per vertex
  std::vector<int> tips;    ///< polyline endpoints, never duplicated
  std::vector<CutSegment> segments;

  [[nodiscard]] std::size_t num_nodes() const { return base.vertices.size(); }
  [[nodiscard]] const CutSegment& segment(int id) const;
  /// Node on the requested side at a chain position (tips return themselves).
  [[nodiscard]] int node_on_side(int plus_node, Side s) const;
};

/// Duplicate interior cut nodes and rewire triangles to the matching side.
/// Throws PreconditionError when a polyline is not a union of mesh edges or
/// overlaps an edge that has already been cut.
CrackedMesh cut_mesh(const Mesh& mesh, std::span<const CutSpec> cuts);

/// Wrap an uncut mesh so downstream code can treat it uniformly.
CrackedMesh uncut(const Mesh& mesh);

/// Mirror a half-disk mesh across the x1-axis, sharing axis vertices.
/// Returns the full mesh and, for each half-mesh vertex, its mirrored index.
Mesh mirror_across_axis(const Mesh& half, std::vector<int>* mirror_index = nullptr);

/// Bucket grid over triangle bounding boxes for point queries. On a cracked
/// mesh a point off the cut lies in triangles of one side only.
class PointLocator {
public:
  struct Hit {
    int triangle = -1;
    std::array<double, 3> bary{};
  };

  explicit PointLocator(const Mesh& mesh);
  [[nodiscard]] Hit locate(Point2 x) const;
  /// Linear interpolation of nodal values; throws PreconditionError outside the mesh.
  [[nodiscard]] double interpolate(std::span<const double> values, Point2 x) const;

private:
  const Mesh* mesh_;
  Point2 lo_;
  double cell_ = 1.0;
  int nx_ = 1, ny_ = 1;
  std::vector<int> start_;
  std::vector<int> items_;
};

// "abmesh 1" text format: V (x y), T (i j k marker), C (segid node twin side).
void write_abmesh(std::ostream& os, const CrackedMesh& cm);
CrackedMesh read_abmesh(std::istream& is);

}  // namespace abpole
