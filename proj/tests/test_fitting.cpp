#include <doctest.h>

#include <array>
#include <cmath>

#include "abpole/fitting.hpp"
#include "abpole/geometry.hpp"

using namespace abpole;

TEST_CASE("line and log-log fits recover exact models") {
  const std::array<double, 4> x{0.1, 0.05, 0.025, 0.0125};
  std::array<double, 4> y{}, p{};
  for (int i = 0; i < 4; ++i) {
    y[i] = 3.0 - 2.0 * x[i];
    p[i] = 5.0 * std::pow(x[i], 1.5);
  }
  const LineFit l = fit_line(x, y);
  CHECK(l.slope == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(l.intercept == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(l.rms_residual <= 1e-12);
  const LineFit g = fit_loglog(x, p);
  CHECK(g.slope == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(std::exp(g.intercept) == doctest::Approx(5.0).epsilon(1e-12));
  const std::array<double, 2> bad{1.0, -1.0};
  CHECK_THROWS_AS(fit_loglog(std::span(x).first(2), bad), PreconditionError);
  CHECK_THROWS_AS(fit_line(std::span(x).first(1), std::span(y).first(1)), PreconditionError);
}

TEST_CASE("Richardson removes the leading error term") {
  auto f = [](double h) { return 7.0 + 3.0 * h * h; };
  CHECK(richardson(f(0.1), f(0.05), 2.0, 2.0) == doctest::Approx(7.0).epsilon(1e-12));
}

TEST_CASE("tail fit of the model 1 - 1/R") {
  const std::array<double, 3> R{4.0, 8.0, 16.0};
  const std::array<double, 3> L{1.0 - 1.0 / 4.0, 1.0 - 1.0 / 8.0, 1.0 - 1.0 / 16.0};
  const TailFit f = fit_tail(R, L);
  CHECK(f.limit == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(f.q == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(f.c == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(f.max_residual <= 1e-12);
  CHECK_FALSE(f.clamped);
}

TEST_CASE("tail fit of a constant triple") {
  const std::array<double, 3> R{4.0, 8.0, 16.0};
  const std::array<double, 3> L{2.5, 2.5, 2.5};
  const TailFit f = fit_tail(R, L);
  CHECK(f.limit == 2.5);
  CHECK(f.c == 0.0);
}

TEST_CASE("tail fit of a decreasing triple and of non-monotone data") {
  const std::array<double, 3> R{4.0, 8.0, 16.0};
  std::array<double, 3> L{};
  for (int i = 0; i < 3; ++i) L[i] = 1.5 + 0.4 * std::pow(R[i], -1.5);
  const TailFit f = fit_tail(R, L);
  CHECK(f.limit == doctest::Approx(1.5).epsilon(1e-10));
  CHECK(f.q == doctest::Approx(1.5).epsilon(1e-8));
  const std::array<double, 3> zigzag{1.0, 1.2, 1.1};
  CHECK_THROWS_AS(fit_tail(R, zigzag), NumericalError);
}

TEST_CASE("tail exponent outside the admissible range is clamped") {
  const std::array<double, 3> R{4.0, 8.0, 16.0};
  std::array<double, 3> L{};
  for (int i = 0; i < 3; ++i) L[i] = 1.0 - std::pow(R[i], -3.0);
  const TailFit f = fit_tail(R, L);
  CHECK(f.clamped);
  CHECK(f.q == 2.0);
  CHECK(f.max_residual > 0.0);
  CHECK(std::abs(f.limit - 1.0) < 2e-3);
}

TEST_CASE("inverse-power fit is exact on its model") {
  const std::array<double, 3> R{4.0, 8.0, 16.0};
  std::array<double, 3> v{};
  for (int i = 0; i < 3; ++i) v[i] = -0.4 + 0.3 / R[i] - 0.7 / (R[i] * R[i]);
  const InverseFit f = fit_inverse_powers(R, v);
  CHECK(f.limit == doctest::Approx(-0.4).epsilon(1e-12));
  CHECK(f.c1 == doctest::Approx(0.3).epsilon(1e-10));
  CHECK(f.c2 == doctest::Approx(-0.7).epsilon(1e-10));
}
