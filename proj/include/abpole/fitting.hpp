#pragma once

#include <span>

namespace abpole {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rms_residual = 0.0;
};

/// Unweighted least squares y = intercept + slope * x (at least 2 points).
LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// Least-squares slope of log y against log x; all values must be positive.
LineFit fit_loglog(std::span<const double> x, std::span<const double> y);

/// Two-level Richardson extrapolation for an error term ~ h^order, where
/// `fine` was computed with step h_coarse / ratio.
double richardson(double coarse, double fine, double ratio, double order);

/// Model L(R) = L_inf - c R^-q fitted through three truncation radii, with q
/// restricted to [q_min, q_max].
struct TailFit {
  double limit = 0.0;
  double c = 0.0;
  double q = 1.0;
  double max_residual = 0.0;
  bool clamped = false;
};
TailFit fit_tail(std::span<const double> R, std::span<const double> L, double q_min = 0.5, double q_max = 2.0);

/// Exact fit v(R) = limit + c1 / R + c2 / R^2 through three radii.
struct InverseFit {
  double limit = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
};
InverseFit fit_inverse_powers(std::span<const double> R, std::span<const double> v);

}  // namespace abpole
