#include <doctest.h>

#include <cmath>

#include "abpole/abo.hpp"

using namespace abpole;

TEST_CASE("angle chart examples") {
  CHECK(AngleChart{{0, 0}, 0.0}.theta({0, 1}) == doctest::Approx(0.5 * kPi));
  CHECK(AngleChart{{0, 0}, 0.5 * kPi}.theta({0, 1}) == doctest::Approx(0.5 * kPi));
  CHECK(AngleChart{{1, 0}, 0.0}.theta({0, 0}) == doctest::Approx(kPi));
  const AngleChart behind{{1, 0}, 0.0};
  CHECK_THROWS_AS((void)behind.theta({1, 0}), PreconditionError);
}

TEST_CASE("angle chart range and branch jump") {
  const AngleChart c{{0.2, -0.1}, 1.0};
  for (int j = 0; j < 64; ++j) {
    const double t = 1.0 + kTwoPi * (j + 0.5) / 64;
    CHECK(c.theta(c.anchor + polar(0.3, t)) == doctest::Approx(t).epsilon(1e-12));
  }
  const auto above = c.half_phase(c.anchor + polar(0.3, 1.0 + 1e-9));
  const auto below = c.half_phase(c.anchor + polar(0.3, 1.0 - 1e-9));
  CHECK(std::abs(above + below) < 1e-8);
}

TEST_CASE("pole at the center gives the half-integer Bessel eigenvalue") {
  AbMeshConfig cfg;
  cfg.h = 0.03;
  const AbEigenResult r = solve_ab(cfg, {0, 0}, {0, 0}, 0.0, 1);
  CHECK(r.lambda == doctest::Approx(kPi * kPi).epsilon(5e-3));
  const double l2 = r.u.dot(r.setup->M.apply(r.u));
  CHECK(l2 == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("poles outside the open domain are rejected") {
  AbMeshConfig cfg;
  cfg.h = 0.1;
  CHECK_THROWS_AS(make_ab_setup(cfg, {1.0, 0.0}, {1.0, 0.0}, 0.0), PreconditionError);
  CHECK_THROWS_AS(make_ab_setup(cfg, {0.3, 0.0}, {0.3, 0.2}, 0.0), PreconditionError);
  CHECK_THROWS_AS(solve_ab(cfg, {0.0, 0.0}, {0.0, 0.0}, 0.0, 0), PreconditionError);
}

TEST_CASE("eigenvalue does not depend on the cut direction") {
  AbMeshConfig cfg;
  cfg.h = 0.04;
  const Point2 a{0.3, 0.0};
  const double l0 = solve_ab(cfg, a, a, 0.0, 1).lambda;
  const double l1 = solve_ab(cfg, a, a, kPi / 5, 1).lambda;
  CHECK(std::abs(l0 - l1) / l0 <= 5e-3);
}

TEST_CASE("pole and anchor problems on one mesh") {
  AbMeshConfig cfg;
  cfg.h = 0.04;
  const Point2 b{0.3, 0.0};
  const auto setup = make_ab_setup(cfg, b, {0.35, 0.0}, 0.0);
  const AbEigenResult r0 = solve_ab(setup, PoleChoice::Anchor, 1);
  const AbEigenResult ra = solve_ab(setup, PoleChoice::Pole, 1);
  CHECK(r0.setup == ra.setup);

  SUBCASE("continuity on the anchor-pole segment, antiperiodic beyond") {
    for (int v : setup->mesh.segment(kSegmentAnchorPole).chain) {
      const int w = setup->mesh.twin[v];
      if (w >= 0) CHECK(ra.u[v] == ra.u[w]);
    }
    for (int v : setup->mesh.segment(kSegmentPoleBoundary).chain) {
      const int w = setup->mesh.twin[v];
      if (w >= 0) CHECK(ra.u[v] == -ra.u[w]);
    }
  }
  SUBCASE("normalization cases") {
    const AbEigenResult self = normalize_pair(r0, r0);
    CHECK(self.u == r0.u);
    CHECK(self.normalized);
    AbEigenResult flipped = r0;
    flipped.u = -flipped.u;
    CHECK(normalize_pair(flipped, r0).u == r0.u);
    CHECK(energy_discrepancy(self, self) == 0.0);
    CHECK_THROWS_AS(energy_discrepancy(ra, self), PreconditionError);
    const double E = energy_discrepancy(normalize_pair(ra, r0), self);
    CHECK(E > 0.0);
    AbEigenResult wrong = normalize_pair(ra, r0);
    wrong.u = -wrong.u;
    CHECK(energy_discrepancy(wrong, self) > 10.0 * E);
  }
  SUBCASE("orthogonal branches are rejected") {
    AbEigenResult r2 = solve_ab(setup, PoleChoice::Anchor, 2);
    const Vector& u0 = r0.u;
    r2.u -= r2.u.dot(setup->M.apply(u0)) * u0;
    CHECK_THROWS_AS(normalize_pair(r2, r0), NumericalError);
  }
  SUBCASE("weak residual") {
    CHECK(weak_residual(r0, 1) <= 1e-6);
    CHECK(weak_residual(ra, 1) <= 1e-6);
  }
}

TEST_CASE("eigenvalue and eigenfunction converge as the pole approaches the anchor") {
  AbMeshConfig cfg;
  cfg.h = 0.03;
  const Point2 b{0.3, 0.0};
  double prev_dl = 1e300, prev_E = 1e300;
  for (double t : {0.08, 0.04, 0.02}) {
    const auto setup = make_ab_setup(cfg, b, {0.3 + t, 0.0}, 0.0);
    const AbEigenResult r0 = normalize_pair(solve_ab(setup, PoleChoice::Anchor, 1),
                                            solve_ab(setup, PoleChoice::Anchor, 1));
    const AbEigenResult ra = normalize_pair(solve_ab(setup, PoleChoice::Pole, 1), r0);
    const double dl = std::abs(r0.lambda - ra.lambda);
    const double E = energy_discrepancy(ra, r0);
    CHECK(dl < prev_dl);
    CHECK(E < prev_E);
    prev_dl = dl;
    prev_E = E;
  }
}
