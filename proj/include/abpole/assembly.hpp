#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "abpole/mesh.hpp"

namespace abpole {

using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

/// Symmetric sparse matrix holding its lower triangle (diagonal included).
struct SparseSymMatrix {
  SparseMatrix lower;

  [[nodiscard]] Eigen::Index dim() const { return lower.rows(); }
  [[nodiscard]] Vector apply(const Vector& x) const;
  [[nodiscard]] double quad(const Vector& x) const { return x.dot(apply(x)); }
  [[nodiscard]] SparseMatrix full() const;
};

enum class Backend { Serial, Parallel };

/// Serial is the reference implementation; Parallel distributes element
/// kernels and the per-entry reduction over OpenMP threads. Both produce the
/// same summation order per entry, so results agree bit for bit.
SparseSymMatrix assemble_stiffness(const CrackedMesh& cm, Backend backend = Backend::Parallel);
SparseSymMatrix assemble_mass(const CrackedMesh& cm, Backend backend = Backend::Parallel);

struct StiffnessAndMass {
  SparseSymMatrix K;
  SparseSymMatrix M;
};
StiffnessAndMass assemble_system(const CrackedMesh& cm, Backend backend = Backend::Parallel);

/// Local matrices of a single linear triangle.
std::array<std::array<double, 3>, 3> local_stiffness(Point2 a, Point2 b, Point2 c);
std::array<std::array<double, 3>, 3> local_mass(Point2 a, Point2 b, Point2 c);

/// Line density coeff * |x - origin|^power along a straight piece through origin.
struct PowerDensity {
  double coeff = 1.0;
  double power = 0.0;
  Point2 origin;
};

/// Integral of density * phi_i over the given mesh edges, in closed form.
/// Each edge must lie on a ray from density.origin.
Vector assemble_edge_load(const Mesh& mesh, std::span<const std::pair<int, int>> edges, const PowerDensity& density);

/// Load on the Plus-side nodes of a cut segment.
Vector assemble_segment_load(const CrackedMesh& cm, int segment_id, const PowerDensity& density);

enum class JumpKind { Continuous, Antiperiodic, InhomogeneousSum };

struct JumpConstraint {
  int segment = 0;
  JumpKind kind = JumpKind::Continuous;
  std::function<double(Point2)> g;  ///< InhomogeneousSum data u+ + u- = g
};

/// full = lift + P * reduced.
struct ReducedSystem {
  SparseSymMatrix K;
  SparseSymMatrix M;
  Vector f;     ///< -P^T K lift
  Vector lift;
  SparseMatrix P;

  [[nodiscard]] Eigen::Index dim() const { return P.cols(); }
  [[nodiscard]] Vector expand(const Vector& reduced) const { return lift + P * reduced; }
  /// Reduced representation of a linear functional given by a full nodal vector.
  [[nodiscard]] Vector restrict_load(const Vector& full_load) const { return P.transpose() * full_load; }
};

/// Eliminate jump constraints (sum/difference variables) and Dirichlet nodes.
/// Crack tips take the trace value implied by their incident segments:
/// antiperiodic forces 0, an inhomogeneous sum forces g/2.
ReducedSystem reduce(const SparseSymMatrix& K, const SparseSymMatrix& M, const CrackedMesh& cm,
                     std::span<const JumpConstraint> constraints, std::span<const int> dirichlet);

/// Nodes on Outer edges, optionally restricted to a set of part ids.
std::vector<int> dirichlet_nodes(const CrackedMesh& cm, std::span<const int> parts = {});

/// Elementwise integral of |grad u|^2 for a nodal field.
double dirichlet_energy(const Mesh& mesh, const Vector& u);

/// Coordinate dump "i j value", lower triangle, sorted by (i, j).
void write_matrix(std::ostream& os, const SparseSymMatrix& A);

}  // namespace abpole
