#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "abpole/blowup.hpp"

using namespace abpole;

namespace {

const std::vector<double> kRadii{0.08, 0.04, 0.02, 0.01};

BlowupFit fit_with(double beta1, double beta2, double k) {
  const RadialSampler s = [=](double r, double t) {
    return std::pow(r, 0.5 * k) * (beta1 * std::cos(0.5 * k * t) + beta2 * std::sin(0.5 * k * t));
  };
  return fit_blowup(s, 0.0, kRadii);
}

}  // namespace

TEST_CASE("psi examples") {
  CHECK(psi({0, 1}, 1) == doctest::Approx(std::sqrt(0.5)));
  CHECK(psi({0, 1}, 3) == doctest::Approx(std::sqrt(0.5)));
  CHECK(psi({1, 0}, 1) == 0.0);
  CHECK(std::abs(psi({1, -1e-12}, 1)) < 1e-9);
  // d psi / dt at t = 0+ on the unit circle is 1/2.
  const double eps = 1e-6;
  CHECK((psi(polar(1.0, eps), 1) - psi({1, 0}, 1)) / eps == doctest::Approx(0.5).epsilon(1e-5));
  CHECK(psi(polar(4.0, 1.0), 1) == doctest::Approx(2.0 * std::sin(0.5)));
}

TEST_CASE("psi normal derivative matches finite differences") {
  for (int k : {1, 3, 5})
    for (double alpha : {0.3, kPi / 2, 2.0, kPi, 4.0, 5.9})
      for (double r : {0.1, 0.5, 1.0}) {
        const Point2 x = polar(r, alpha);
        const Point2 nu{std::sin(alpha), -std::cos(alpha)};
        const double eps = 1e-6 * r;
        const double fd = (psi(x + eps * nu, k) - psi(x - eps * nu, k)) / (2.0 * eps);
        CHECK(psi_normal_derivative(r, alpha, k) == doctest::Approx(fd).epsilon(1e-6));
        CHECK(psi_normal_derivative(r, alpha, k) ==
              doctest::Approx(-0.5 * k * std::cos(0.5 * k * alpha) * std::pow(r, 0.5 * k - 1.0)).epsilon(1e-12));
      }
}

TEST_CASE("blow-up fit of the exact profile") {
  const BlowupFit f = fit_with(0.0, 1.0, 1);
  CHECK(f.k == 1);
  CHECK(std::abs(f.beta1) <= 1e-10);
  CHECK(f.beta2 == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(std::abs(f.alpha0) <= 1e-10);
  CHECK(f.slope == doctest::Approx(1.0).epsilon(1e-6));  // log L2(circle) ~ (k+1)/2 log r
  for (double res : f.residuals) CHECK(res <= 1e-8);
}

TEST_CASE("blow-up fit of a cosine profile points the nodal ray backwards") {
  const BlowupFit f = fit_with(2.0, 0.0, 1);
  CHECK(f.k == 1);
  CHECK(std::abs(std::abs(f.beta1) - 2.0) <= 1e-10);
  CHECK(std::abs(f.beta2) <= 1e-10);
  CHECK(f.alpha0 == doctest::Approx(kPi).epsilon(1e-10));
  CHECK(f.amplitude_sq() == doctest::Approx(4.0).epsilon(1e-10));
}

TEST_CASE("blow-up fit detects higher vanishing order") {
  const BlowupFit f = fit_with(0.3, -0.7, 3);
  CHECK(f.k == 3);
  CHECK(f.amplitude_sq() == doctest::Approx(0.58).epsilon(1e-9));
  const NodalCount nc = count_nodal_lines(
      [](double r, double t) { return std::pow(r, 1.5) * (0.3 * std::cos(1.5 * t) - 0.7 * std::sin(1.5 * t)); }, 0.0,
      0.05);
  CHECK(nc.sign_changes == 6);
  CHECK(nc.nodal_lines() == 3);
}

TEST_CASE("rotate_frame conserves the amplitude") {
  const BlowupFit same = rotate_frame(fit_with(0.0, 1.0, 1));
  CHECK(std::abs(same.beta1) <= 1e-10);
  CHECK(same.beta2 == doctest::Approx(1.0).epsilon(1e-10));
  const BlowupFit turned = rotate_frame(fit_with(2.0, 0.0, 1));
  CHECK(std::abs(turned.beta1) <= 1e-10);
  CHECK(std::abs(turned.beta2) == doctest::Approx(2.0).epsilon(1e-10));

  UniformStream rng(11);
  for (int t = 0; t < 20; ++t) {
    BlowupFit f;
    f.k = 2 * (t % 3) + 1;
    f.beta1 = rng.next();
    f.beta2 = rng.next();
    f.alpha0 = wrap_angle(2.0 * std::atan2(f.beta1, -f.beta2) / f.k, 0.0);
    const BlowupFit g = rotate_frame(f);
    CHECK(std::abs(g.beta2 * g.beta2 - f.amplitude_sq()) <= 1e-12);
    CHECK(std::abs(g.beta1) <= 1e-12);
  }
}

TEST_CASE("first eigenfunction with an off-center pole has one nodal line") {
  AbMeshConfig cfg;
  cfg.h = 0.03;
  const auto setup = make_ab_setup(cfg, {0.3, 0.0}, {0.3, 0.0}, 0.0);
  const AbEigenResult r0 = solve_ab(setup, PoleChoice::Anchor, 1);
  const auto radii = default_blowup_radii(*setup);
  REQUIRE(radii.size() == 5);
  CHECK(radii[0] == doctest::Approx(0.2 * 0.7));
  const BlowupFit f = fit_blowup(r0, radii);
  CHECK(f.k == 1);
  CHECK(f.amplitude_sq() > 0.0);
  CHECK(*std::min_element(f.residuals.begin(), f.residuals.end()) <= 0.05);

  const PointLocator loc(setup->mesh.base);
  const RadialSampler sample = [&](double r, double t) {
    return loc.interpolate(std::span(r0.u.data(), r0.u.size()), setup->chart.anchor + polar(r, t));
  };
  const NodalCount nc = count_nodal_lines(sample, setup->chart.alpha, radii[2]);
  CHECK(nc.nodal_lines() == f.k);

  std::ostringstream os;
  write_blowup_json(os, f);
  const auto j = nlohmann::json::parse(os.str());
  for (const char* key : {"k", "beta1_re", "beta1_im", "beta2_re", "beta2_im", "alpha0", "residuals"})
    CHECK(j.contains(key));
}
