#pragma once

// Conforming Delaunay refinement for the convex domains the mesh generators
// produce. Internal to the library.

#include <vector>

#include "abpole/mesh.hpp"

namespace abpole::detail {

/// A boundary or constraint curve parameterized over [0, 1]. The endpoints
/// are stored exactly so that curves sharing an endpoint share a vertex.
struct Curve {
  enum class Shape { Line, Arc } shape = Shape::Line;
  Point2 start;
  Point2 end;
  Point2 center;  // Arc only
  double radius = 0.0;
  double angle0 = 0.0;
  double angle1 = 0.0;
  EdgeTag tag;

  [[nodiscard]] Point2 eval(double s) const;
  [[nodiscard]] double length() const;

  static Curve line(Point2 a, Point2 b, EdgeTag tag);
  static Curve arc(Point2 center, double radius, double t0, double t1, Point2 a, Point2 b, EdgeTag tag);
};

struct Pslg {
  std::vector<Curve> curves;
  std::vector<Point2> points;  ///< isolated interior vertices
};

/// Triangulate the region bounded by the Outer curves (which must form a
/// convex closed loop) so that every curve is a union of mesh edges.
Mesh triangulate(const Pslg& pslg, const SizingField& size);

}  // namespace abpole::detail
