#include "abpole/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "abpole/geometry.hpp"

namespace abpole {

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw PreconditionError("line fit needs at least two matching points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) mx += x[i], my += y[i];
  mx /= n, my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) sxx += (x[i] - mx) * (x[i] - mx), sxy += (x[i] - mx) * (y[i] - my);
  if (!(sxx > 0.0)) throw PreconditionError("line fit needs distinct abscissae");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - f.intercept - f.slope * x[i];
    ss += r * r;
  }
  f.rms_residual = std::sqrt(ss / n);
  return f;
}

LineFit fit_loglog(std::span<const double> x, std::span<const double> y) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw PreconditionError("log-log fit needs positive data");
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  return fit_line(lx, ly);
}

double richardson(double coarse, double fine, double ratio, double order) {
  return fine + (fine - coarse) / (std::pow(ratio, order) - 1.0);
}

namespace {

/// Least squares for (limit, c) at fixed q; returns max residual.
double solve_fixed_q(std::span<const double> R, std::span<const double> L, double q, double& limit, double& c) {
  std::vector<double> z(R.size());
  for (std::size_t i = 0; i < R.size(); ++i) z[i] = -std::pow(R[i], -q);
  const LineFit f = fit_line(z, L);
  limit = f.intercept;
  c = f.slope;
  double worst = 0.0;
  for (std::size_t i = 0; i < R.size(); ++i) worst = std::max(worst, std::abs(L[i] - limit - c * z[i]));
  return worst;
}

}  // namespace

TailFit fit_tail(std::span<const double> R, std::span<const double> L, double q_min, double q_max) {
  if (R.size() != 3 || L.size() != 3) throw PreconditionError("tail fit uses exactly three radii");
  if (!(R[0] < R[1] && R[1] < R[2])) throw PreconditionError("tail fit radii must increase");
  TailFit out;
  const double d1 = L[1] - L[0], d2 = L[2] - L[1];
  const double scale = std::max({std::abs(L[0]), std::abs(L[1]), std::abs(L[2]), 1e-300});
  if (std::abs(d1) <= 1e-14 * scale && std::abs(d2) <= 1e-14 * scale) {
    out.limit = L[2];
    out.c = 0.0;
    return out;
  }
  if (d1 * d2 < 0.0 || std::abs(d2) >= std::abs(d1))
    throw NumericalError("tail fit: truncated values are not monotonically converging");

  // The ratio (R0^-q - R1^-q) / (R1^-q - R2^-q) increases with q; match d1/d2.
  auto ratio = [&](double q) {
    return (std::pow(R[0], -q) - std::pow(R[1], -q)) / (std::pow(R[1], -q) - std::pow(R[2], -q));
  };
  const double target = d1 / d2;
  double q;
  if (target <= ratio(q_min)) {
    q = q_min, out.clamped = true;
  } else if (target >= ratio(q_max)) {
    q = q_max, out.clamped = true;
  } else {
    double lo = q_min, hi = q_max;
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
      const double mid = 0.5 * (lo + hi);
      (ratio(mid) < target ? lo : hi) = mid;
    }
    q = 0.5 * (lo + hi);
  }
  out.q = q;
  out.max_residual = solve_fixed_q(R, L, q, out.limit, out.c);
  return out;
}

InverseFit fit_inverse_powers(std::span<const double> R, std::span<const double> v) {
  if (R.size() != 3 || v.size() != 3) throw PreconditionError("inverse-power fit uses exactly three radii");
  if (!(R[0] > 0.0 && R[0] < R[1] && R[1] < R[2])) throw PreconditionError("inverse-power fit radii must increase");
  Eigen::Matrix3d A;
  Eigen::Vector3d b;
  for (int i = 0; i < 3; ++i) {
    const double x = 1.0 / R[i];
    A.row(i) << 1.0, x, x * x;
    b[i] = v[i];
  }
  const Eigen::Vector3d c = A.fullPivLu().solve(b);
  return {c[0], c[1], c[2]};
}

}  // namespace abpole
