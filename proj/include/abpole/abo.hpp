#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <vector>

#include "abpole/eigensolve.hpp"

namespace abpole {

/// Polar angle around an anchor, valued in [alpha, alpha + 2pi).
struct AngleChart {
  Point2 anchor;
  double alpha = 0.0;

  /// Throws PreconditionError at the anchor itself.
  [[nodiscard]] double theta(Point2 x) const;
  /// e^{i theta / 2}; flips sign across the ray at angle alpha.
  [[nodiscard]] std::complex<double> half_phase(Point2 x) const;
};

struct DiskDomain {
  Point2 center{0.0, 0.0};
  double radius = 1.0;

  [[nodiscard]] double distance_to_boundary(Point2 x) const { return radius - abpole::distance(x, center); }
};

struct AbMeshConfig {
  DiskDomain domain;
  double h = 0.02;
  double grading_exponent = 0.5;
};

/// Cracked mesh shared by the pole problem and the limit (anchor) problem.
/// The cut runs from the anchor through the pole to the boundary along the
/// ray at angle alpha; segment 0 is anchor->pole, segment 1 pole->boundary.
/// When pole == anchor only segment 1 exists.
struct AbSetup {
  AbMeshConfig config;
  AngleChart chart;
  Point2 pole;
  CrackedMesh mesh;
  SparseSymMatrix K;
  SparseSymMatrix M;
  std::vector<int> dirichlet;
};

inline constexpr int kSegmentAnchorPole = 0;
inline constexpr int kSegmentPoleBoundary = 1;

std::shared_ptr<const AbSetup> make_ab_setup(const AbMeshConfig& cfg, Point2 anchor, Point2 pole, double alpha);

/// Which Aharonov-Bohm pole the real-gauge problem uses on a shared setup.
enum class PoleChoice { Pole, Anchor };

struct AbEigenResult {
  std::shared_ptr<const AbSetup> setup;
  std::shared_ptr<const ReducedSystem> system;
  PoleChoice choice = PoleChoice::Pole;
  Point2 pole;
  double alpha = 0.0;
  int n0 = 1;
  std::vector<EigenPair> pairs;  ///< lowest n0 + 1 pairs
  double lambda = 0.0;           ///< n0-th eigenvalue
  Vector u;                      ///< full nodal field of the n0-th pair, unit L2 norm
  bool simple = true;            ///< simplicity check passed
  bool normalized = false;       ///< sign fixed by normalize_pair (or as reference)
};

struct SolveOptions {
  double gap_tol = 1e-3;
  EigenOptions eigen;
};

/// Real-gauge eigenproblem: for PoleChoice::Pole the traces are continuous
/// on anchor->pole and antiperiodic beyond; for PoleChoice::Anchor the whole
/// cut is antiperiodic. The returned field has its first significant nodal
/// value positive. A failed simplicity check only clears `simple`.
AbEigenResult solve_ab(std::shared_ptr<const AbSetup> setup, PoleChoice choice, int n0,
                       const SolveOptions& opt = {});

/// Convenience overload building a fresh setup.
AbEigenResult solve_ab(const AbMeshConfig& cfg, Point2 anchor, Point2 pole, double alpha, int n0,
                       const SolveOptions& opt = {});

/// Flip u_a so that its mass inner product with u_0 is positive.
AbEigenResult normalize_pair(const AbEigenResult& result_a, const AbEigenResult& result_0);

/// Elementwise integral of |grad(u_a - u_0)|^2 on the cut domain.
double energy_discrepancy(const AbEigenResult& result_a, const AbEigenResult& result_0);

/// max over random admissible v of |v^T (K u - lambda M u)| / |v|_{H1}.
double weak_residual(const AbEigenResult& r, std::uint64_t seed, int samples = 20);

}  // namespace abpole
