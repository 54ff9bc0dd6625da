#pragma once

#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "abpole/assembly.hpp"
#include "abpole/fitting.hpp"

namespace abpole {

struct CrackOptions {
  double h = 0.06;                ///< element size at unit distance from the tips
  double grading_exponent = 0.5;  ///< size ~ h * dist^exponent around tips
  std::vector<double> radii{4.0, 8.0, 16.0};
  int omega_samples = 2048;
};

/// Cut segment ids of the crack meshes.
inline constexpr int kSegmentS0 = 0;
inline constexpr int kSegmentGamma = 1;

/// Discrete problem data retained for perturbation and export.
struct CrackProblem {
  CrackedMesh mesh;
  SparseSymMatrix K;
  Vector linear;  ///< J(u) = 1/2 u^T K u + linear^T u
  ReducedSystem reduced;
};

struct CrackSolution {
  double alpha = 0.0;
  int k = 1;
  double R = 0.0;
  double h = 0.0;
  bool half_plane = false;  ///< w_e from the half-plane problem (alpha = 0)
  std::shared_ptr<const CrackProblem> problem;
  Vector w;                 ///< nodal field on problem->mesh (full disk)
  double J = 0.0;           ///< J_p(w_p); for w_e the bracket of the energy identity
  double L_trunc = 0.0;     ///< integral of |grad w|^2 over the truncated disk
  double omega1 = 0.0;      ///< integral of w(cos t, sin t) sin(kt/2), t in (0, 2pi)
  double m_direct = 0.0;    ///< w_e only: attained minimum of the half-plane functional
  double m_identity = 0.0;  ///< w_e only: the same quantity via the full-disk identity

  [[nodiscard]] double functional(const Vector& u) const;
};

/// Minimize J_p over the truncated constraint set on D_R (alpha not 0 mod 2pi).
CrackSolution solve_wp(double alpha, int k, double R, const CrackOptions& opt = {});

/// Half-plane minimization on the half disk of radius R, reflected evenly.
CrackSolution solve_we(int k, double R, const CrackOptions& opt = {});

/// solve_wp, or solve_we when alpha = 0 mod 2pi.
CrackSolution solve_crack(double alpha, int k, double R, const CrackOptions& opt = {});

/// Integral of w(r cos t, r sin t) sin(kt/2) over t in (0, 2pi).
double omega(const CrackSolution& sol, double r, int samples = 2048);

/// Truncation-extrapolated scalars from solutions at three increasing radii.
struct CrackLimit {
  double alpha = 0.0;
  int k = 1;
  std::vector<double> radii;
  TailFit L;
  InverseFit J;
  InverseFit omega1;
  InverseFit m;  ///< w_e only
};
CrackLimit extrapolate_crack(std::span<const CrackSolution> sols);

/// L_inf of the three-radius tail fit of L_trunc. Throws NumericalError on a
/// non-monotone triple.
double extrapolate_L(std::span<const CrackSolution> sols);

/// Truncation limit of any scalar over three radii. The Dirichlet circle
/// perturbs each angular mode r^{-m/2} by a multiple of R^{-m} r^{m/2}, so the
/// error is a series in 1/R; its first two terms are eliminated.
InverseFit extrapolate_scalar(std::span<const CrackSolution> sols,
                           const std::function<double(const CrackSolution&)>& value);

/// omega(r) r^{k/2} at each radius after truncation extrapolation, and its
/// spread max|x - mean| / |mean|.
struct OmegaScaling {
  std::vector<double> radii;
  std::vector<double> scaled;
  double spread = 0.0;
};
OmegaScaling omega_scaling(std::span<const CrackSolution> sols, std::span<const double> radii);

/// Residuals of the three identities, normalized by |2 m_k|.
struct IdentityReport {
  double r1 = 0.0;  ///< |k omega1 + 4 m_k cos(k alpha)|
  double r2 = 0.0;  ///< |omega1 + (2/k) J|
  double r3 = 0.0;  ///< |J - 2 m_k cos(k alpha)|
};
IdentityReport identity_suite(double alpha, int k, double J, double omega1, double mk);
IdentityReport identity_suite(const CrackLimit& lim, double mk);
/// Recomputes J and omega1 from the stored field, so a non-minimizer is flagged.
IdentityReport identity_suite(const CrackSolution& sol, double mk);

struct ProfileRow {
  double alpha = 0.0;
  double L = 0.0;
  double J = 0.0;
  double omega1 = 0.0;
  double tail_q = 0.0;
};
struct ProfileReport {
  std::vector<ProfileRow> rows;
  double evenness = 0.0;     ///< max |L(a) - L(2pi - a)| / max L over grid pairs
  double periodicity = 0.0;  ///< max |L(a) - L(a + 2pi/k)| / max L over grid pairs
  int even_pairs = 0;
  int periodic_pairs = 0;
  bool all_positive = true;
};
ProfileReport L_profile(int k, std::span<const double> alphas, const CrackOptions& opt = {});

/// Mirror maps used by the symmetry checks: rotation by 2pi/k and the
/// reflection (x1, x2) -> (x1, -x2).
Point2 rotate_2pi_over_k(Point2 x, int k);
Point2 reflect_x2(Point2 x);

/// One discrete check of a functional inequality lhs >= rhs.
struct InequalityCheck {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  [[nodiscard]] double margin() const { return (lhs - rhs) / lhs; }
};

/// Hardy inequality on the antiperiodic space around s0, and exterior
/// Hardy plus Poincare (constant 1/6) on the space cut along s0 and the
/// segment to p = (cos alpha, sin alpha). Test fields are radial bumps times
/// odd angular half-modes, with and without a jump across the segment.
std::vector<InequalityCheck> inequality_suite(double alpha, double h = 0.05);

/// JSON scalars of a crack solution.
void write_crack_json(std::ostream& os, const CrackSolution& sol);
/// Mesh-format dump followed by a "W n" block of nodal values.
void write_crack_field(std::ostream& os, const CrackSolution& sol);

}  // namespace abpole
