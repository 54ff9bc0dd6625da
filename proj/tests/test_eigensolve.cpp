#include <doctest.h>

#include <cmath>

#include <Eigen/Dense>

#include "abpole/abo.hpp"
#include "abpole/eigensolve.hpp"
#include "abpole/fitting.hpp"
#include "oracles.hpp"

using namespace abpole;

namespace {

ReducedSystem dirichlet_system(const Mesh& m) {
  const CrackedMesh cm = uncut(m);
  const StiffnessAndMass s = assemble_system(cm);
  return reduce(s.K, s.M, cm, {}, dirichlet_nodes(cm));
}

double first_eigenvalue(const Mesh& m) { return smallest_eigenpairs(dirichlet_system(m), 1).at(0).value; }

EigenPair make_pair(double v) {
  EigenPair p;
  p.value = v;
  return p;
}

}  // namespace

TEST_CASE("unit square Dirichlet eigenvalue extrapolates to 2 pi^2") {
  const double coarse = first_eigenvalue(generate_rectangle_mesh({0, 0}, {1, 1}, 0.05, {}));
  const double fine = first_eigenvalue(generate_rectangle_mesh({0, 0}, {1, 1}, 0.025, {}));
  const double exact = 2.0 * kPi * kPi;
  CHECK(coarse >= exact);
  CHECK(fine >= exact);
  CHECK(fine < coarse);
  CHECK(std::abs(richardson(coarse, fine, 2.0, 2.0) - exact) <= 2e-3 * exact);
}

TEST_CASE("unit disk Dirichlet eigenvalue extrapolates to j01^2") {
  const double j01 = oracle::bessel_zero(0.0, 2.0, 3.0);
  CHECK(j01 == doctest::Approx(2.404826).epsilon(1e-6));
  const double coarse = first_eigenvalue(generate_disk_mesh({0, 0}, 1.0, 0.05, {}));
  const double fine = first_eigenvalue(generate_disk_mesh({0, 0}, 1.0, 0.025, {}));
  CHECK(std::abs(richardson(coarse, fine, 2.0, 2.0) - j01 * j01) <= 5e-3 * j01 * j01);
}

TEST_CASE("pole at the disk center: half-integer Bessel spectrum and degeneracy") {
  const double j12 = oracle::bessel_zero(0.5, 3.0, 3.5);
  const double j32 = oracle::bessel_zero(1.5, 4.0, 5.0);
  CHECK(j12 == doctest::Approx(kPi).epsilon(1e-11));
  CHECK(j32 == doctest::Approx(4.493409).epsilon(1e-6));
  AbMeshConfig cfg;
  cfg.h = 0.03;
  const auto setup = make_ab_setup(cfg, {0, 0}, {0, 0}, 0.0);
  const AbEigenResult r = solve_ab(setup, PoleChoice::Anchor, 4);
  REQUIRE(r.pairs.size() >= 5);
  CHECK(std::abs(r.pairs[0].value - j12 * j12) <= 5e-3 * j12 * j12);
  CHECK(std::abs(r.pairs[1].value - j12 * j12) <= 5e-3 * j12 * j12);
  CHECK(std::abs(r.pairs[2].value - j32 * j32) <= 1e-2 * j32 * j32);
  CHECK(std::abs(r.pairs[3].value - j32 * j32) <= 1e-2 * j32 * j32);
  CHECK_FALSE(detect_simplicity(r.pairs, 1, 1e-3));
  CHECK_FALSE(r.simple);
}

TEST_CASE("off-center pole splits the pair") {
  AbMeshConfig cfg;
  cfg.h = 0.04;
  const AbEigenResult r = solve_ab(cfg, {0.3, 0.0}, {0.3, 0.0}, 0.0, 1);
  CHECK(detect_simplicity(r.pairs, 1, 1e-3));
  CHECK(r.simple);
}

TEST_CASE("simplicity check on synthetic spectra") {
  const std::vector<EigenPair> close{make_pair(1.0), make_pair(1.0 + 1e-12), make_pair(3.0)};
  CHECK(detect_simplicity(close, 1, 0.0));
  CHECK_FALSE(detect_simplicity(close, 1, 1e-6));
  const std::vector<EigenPair> equal{make_pair(2.0), make_pair(2.0)};
  CHECK_FALSE(detect_simplicity(equal, 1, 0.0));
  CHECK(detect_simplicity(close, 2, 0.0));
  CHECK_THROWS_AS(detect_simplicity(close, 3, 0.0), PreconditionError);
}

TEST_CASE("Lanczos agrees with a dense generalized eigensolver") {
  const CutSpec cut{{{0, 0}, {1, 0}}, {0}};
  const CrackedMesh cm =
      cut_mesh(generate_disk_mesh({0.0, 0.0}, 1.0, 0.2, {}, std::span(&cut, 1)), std::span(&cut, 1));
  const StiffnessAndMass s = assemble_system(cm);
  const JumpConstraint c{0, JumpKind::Antiperiodic, {}};
  const ReducedSystem rs = reduce(s.K, s.M, cm, std::span(&c, 1), dirichlet_nodes(cm));
  const Eigen::MatrixXd K(rs.K.full()), M(rs.M.full());
  const Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> dense(K, M);
  const auto pairs = smallest_eigenpairs(rs, 5);
  REQUIRE(pairs.size() == 5);
  for (int i = 0; i < 5; ++i) {
    CHECK(pairs[i].value == doctest::Approx(dense.eigenvalues()[i]).epsilon(1e-9));
    CHECK(pairs[i].index == i);
    const Vector& x = pairs[i].vector;
    CHECK((K * x - pairs[i].value * M * x).norm() <= 1e-9);
    CHECK(pairs[i].residual <= 1e-9);
    for (int j = 0; j < 5; ++j)
      CHECK(std::abs(x.dot(M * pairs[j].vector) - (i == j ? 1.0 : 0.0)) <= 1e-8);
  }
  // The repeated pair of the symmetric configuration is captured twice.
  CHECK(pairs[1].value - pairs[0].value <= 1e-2 * pairs[0].value);
}

TEST_CASE("eigenvalues decrease under refinement toward the continuum value") {
  AbMeshConfig cfg;
  std::vector<double> lam;
  for (double h : {0.08, 0.04, 0.02}) {
    cfg.h = h;
    lam.push_back(solve_ab(cfg, {0, 0}, {0, 0}, 0.0, 1).pairs[0].value);
  }
  CHECK(lam[0] > lam[1]);
  CHECK(lam[1] > lam[2]);
  const double extrapolated = richardson(lam[1], lam[2], 2.0, 2.0);
  for (double l : lam) CHECK(l >= extrapolated - 1e-6);
  CHECK(extrapolated == doctest::Approx(kPi * kPi).epsilon(5e-3));
}

TEST_CASE("seeded runs are reproducible") {
  const ReducedSystem rs = dirichlet_system(generate_disk_mesh({0, 0}, 1.0, 0.1, {}));
  EigenOptions opt;
  opt.seed = 42;
  const auto a = smallest_eigenpairs(rs, 3, opt);
  const auto b = smallest_eigenpairs(rs, 3, opt);
  for (int i = 0; i < 3; ++i) {
    CHECK(a[i].value == b[i].value);
    CHECK(a[i].vector == b[i].vector);
  }
  UniformStream s1(9), s2(9);
  const Vector v = s1.vector(100);
  CHECK(v == s2.vector(100));
  CHECK(v.maxCoeff() < 1.0);
  CHECK(v.minCoeff() >= -1.0);
}
