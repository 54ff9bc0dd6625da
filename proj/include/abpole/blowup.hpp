#pragma once

#include <complex>
#include <functional>
#include <iosfwd>
#include <vector>

#include "abpole/abo.hpp"

namespace abpole {

/// r^{k/2} sin(k t / 2) with t in [0, 2pi).
double psi(Point2 x, int k);

/// Normal derivative of psi on the segment from 0 to p = (cos a, sin a),
/// taken along nu = (sin a, -cos a) at distance r from 0.
double psi_normal_derivative(double r, double alpha, int k);

struct BlowupFit {
  int k = 1;
  double beta1 = 0.0;  ///< real pair; the complex amplitudes are beta * unit
  double beta2 = 0.0;
  std::complex<double> unit{1.0, 0.0};
  double alpha0 = 0.0;    ///< nodal direction in [0, 2pi/k)
  double rotation = 0.0;  ///< frame rotation applied by rotate_frame
  std::vector<double> radii;
  std::vector<double> residuals;  ///< per radius, max profile misfit / amplitude
  std::vector<double> beta1_by_radius;
  std::vector<double> beta2_by_radius;
  double slope = 0.0;  ///< of log |u|_{L2(circle)} against log r

  [[nodiscard]] double amplitude_sq() const { return beta1 * beta1 + beta2 * beta2; }
};

/// Real-gauge samples u(anchor + r(cos t, sin t)) for t in the chart range.
using RadialSampler = std::function<double(double r, double t)>;

struct BlowupOptions {
  int samples = 512;
  int max_k = 15;
};

/// Fit k, beta1, beta2 and alpha0 from samples around the chart anchor.
/// Projections use midpoint samples t_j = alpha + (j + 1/2) 2pi/n, so no
/// sample hits the cut; amplitudes are extrapolated linearly in r to r = 0.
BlowupFit fit_blowup(const RadialSampler& sample, double chart_alpha, std::span<const double> radii,
                     const BlowupOptions& opt = {});

/// Fit from the anchor-pole eigenfunction of an AB result.
BlowupFit fit_blowup(const AbEigenResult& u0, std::span<const double> radii, const BlowupOptions& opt = {});

/// Default radii 0.2 * 2^-j * dist(anchor, boundary), j = 0..4.
std::vector<double> default_blowup_radii(const AbSetup& setup);

/// Rotate coordinates by alpha0 so that beta1 vanishes.
BlowupFit rotate_frame(const BlowupFit& fit);

/// Sign changes of the real-gauge profile continued antiperiodically to the
/// double cover [alpha, alpha + 4pi); a vanishing order k gives 2k changes.
struct NodalCount {
  int sign_changes = 0;
  std::vector<double> angles;
  [[nodiscard]] int nodal_lines() const { return sign_changes / 2; }
};
NodalCount count_nodal_lines(const RadialSampler& sample, double chart_alpha, double r, int samples = 720);

void write_blowup_json(std::ostream& os, const BlowupFit& fit);

}  // namespace abpole
