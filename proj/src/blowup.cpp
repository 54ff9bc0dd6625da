#include "abpole/blowup.hpp"

#include <cmath>
#include <ostream>

#include <nlohmann/json.hpp>

#include "abpole/fitting.hpp"

namespace abpole {

double psi(Point2 x, int k) {
  const double r = norm(x);
  if (r == 0.0) return 0.0;
  const double t = wrap_angle(std::atan2(x.y, x.x));
  return std::pow(r, 0.5 * k) * std::sin(0.5 * k * t);
}

double psi_normal_derivative(double r, double alpha, int k) {
  return -0.5 * k * std::cos(0.5 * k * alpha) * std::pow(r, 0.5 * k - 1.0);
}

namespace {

std::vector<double> sample_angles(double alpha, int n) {
  std::vector<double> t(n);
  for (int j = 0; j < n; ++j) t[j] = alpha + (j + 0.5) * kTwoPi / n;
  return t;
}

}  // namespace

BlowupFit fit_blowup(const RadialSampler& sample, double chart_alpha, std::span<const double> radii,
                     const BlowupOptions& opt) {
  if (radii.size() < 2) throw PreconditionError("blow-up fit needs at least two radii");
  for (std::size_t i = 0; i + 1 < radii.size(); ++i)
    if (!(radii[i] > radii[i + 1] && radii[i + 1] > 0.0)) throw PreconditionError("blow-up radii must decrease");
  const int n = opt.samples;
  const double dt = kTwoPi / n;
  const auto t = sample_angles(chart_alpha, n);

  std::vector<std::vector<double>> values;
  std::vector<double> circle_norm;
  for (double r : radii) {
    std::vector<double> v(n);
    double s = 0.0;
    for (int j = 0; j < n; ++j) {
      v[j] = sample(r, t[j]);
      s += v[j] * v[j];
    }
    circle_norm.push_back(std::sqrt(s * r * dt));
    values.push_back(std::move(v));
  }

  BlowupFit fit;
  fit.radii.assign(radii.begin(), radii.end());
  fit.slope = fit_loglog(radii, circle_norm).slope;
  const double k_raw = 2.0 * fit.slope - 1.0;
  const int k = 2 * static_cast<int>(std::lround((k_raw - 1.0) / 2.0)) + 1;
  if (k < 1 || k > opt.max_k || std::abs(k_raw - k) > 0.4)
    throw NumericalError("blow-up: circle-norm slope does not match an odd vanishing order (mesh too coarse?)");
  fit.k = k;

  for (std::size_t i = 0; i < radii.size(); ++i) {
    const double scale = std::pow(radii[i], -0.5 * k);
    double b1 = 0.0, b2 = 0.0;
    for (int j = 0; j < n; ++j) {
      b1 += values[i][j] * std::cos(0.5 * k * t[j]);
      b2 += values[i][j] * std::sin(0.5 * k * t[j]);
    }
    b1 *= scale * dt / kPi;
    b2 *= scale * dt / kPi;
    fit.beta1_by_radius.push_back(b1);
    fit.beta2_by_radius.push_back(b2);
    const double amp = std::hypot(b1, b2);
    double worst = 0.0;
    for (int j = 0; j < n; ++j) {
      const double model = b1 * std::cos(0.5 * k * t[j]) + b2 * std::sin(0.5 * k * t[j]);
      worst = std::max(worst, std::abs(scale * values[i][j] - model));
    }
    fit.residuals.push_back(amp > 0.0 ? worst / amp : INFINITY);
  }
  fit.beta1 = fit_line(radii, fit.beta1_by_radius).intercept;
  fit.beta2 = fit_line(radii, fit.beta2_by_radius).intercept;
  if (!(std::hypot(fit.beta1, fit.beta2) > 1e-10))
    throw NumericalError("blow-up: angular projections are below the noise floor");
  const double period = kTwoPi / k;
  double a0 = std::fmod(2.0 / k * std::atan2(-fit.beta1, fit.beta2), period);
  if (a0 < 0.0) a0 += period;
  if (a0 >= period) a0 -= period;
  fit.alpha0 = a0;
  return fit;
}

BlowupFit fit_blowup(const AbEigenResult& u0, std::span<const double> radii, const BlowupOptions& opt) {
  if (u0.choice != PoleChoice::Anchor) throw PreconditionError("blow-up fit expects the limit-pole eigenfunction");
  const AbSetup& s = *u0.setup;
  const PointLocator locator(s.mesh.base);
  const Point2 b = s.chart.anchor;
  const std::span<const double> values(u0.u.data(), static_cast<std::size_t>(u0.u.size()));
  auto sampler = [&](double r, double t) { return locator.interpolate(values, b + polar(r, t)); };
  BlowupFit fit = fit_blowup(sampler, s.chart.alpha, radii, opt);

  const NodalCount nodes = count_nodal_lines(sampler, s.chart.alpha, radii.back());
  if (nodes.nodal_lines() != fit.k || nodes.sign_changes != 2 * fit.k) throw NumericalError("blow-up: fitted k disagrees with the nodal-line count");
  return fit;
}

std::vector<double> default_blowup_radii(const AbSetup& setup) {
  const double d = setup.config.domain.distance_to_boundary(setup.chart.anchor);
  std::vector<double> r;
  for (int j = 0; j <= 4; ++j) r.push_back(0.2 * std::ldexp(1.0, -j) * d);
  return r;
}

BlowupFit rotate_frame(const BlowupFit& fit) {
  BlowupFit out = fit;
  const double c = std::cos(0.5 * fit.k * fit.alpha0), s = std::sin(0.5 * fit.k * fit.alpha0);
  auto rot = [&](double b1, double b2) { return std::pair{b1 * c + b2 * s, -b1 * s + b2 * c}; };
  std::tie(out.beta1, out.beta2) = rot(fit.beta1, fit.beta2);
  for (std::size_t i = 0; i < fit.beta1_by_radius.size(); ++i)
    std::tie(out.beta1_by_radius[i], out.beta2_by_radius[i]) = rot(fit.beta1_by_radius[i], fit.beta2_by_radius[i]);
  out.rotation = fit.rotation + fit.alpha0;
  out.alpha0 = 0.0;
  return out;
}

NodalCount count_nodal_lines(const RadialSampler& sample, double chart_alpha, double r, int samples) {
  const auto t = sample_angles(chart_alpha, samples);
  std::vector<double> v(2 * samples);
  for (int j = 0; j < samples; ++j) {
    v[j] = sample(r, t[j]);
    v[j + samples] = -v[j];
  }
  const double dt = kTwoPi / samples;
  NodalCount out;
  for (int j = 0; j < 2 * samples; ++j) {
    const double prev = v[j], cur = v[(j + 1) % (2 * samples)];
    if ((prev < 0.0) != (cur < 0.0)) {
      ++out.sign_changes;
      out.angles.push_back(chart_alpha + (j + 0.5) * dt + dt * prev / (prev - cur));
    }
  }
  return out;
}

void write_blowup_json(std::ostream& os, const BlowupFit& fit) {
  const std::complex<double> b1 = fit.beta1 * fit.unit, b2 = fit.beta2 * fit.unit;
  nlohmann::ordered_json j;
  j["k"] = fit.k;
  j["beta1_re"] = b1.real();
  j["beta1_im"] = b1.imag();
  j["beta2_re"] = b2.real();
  j["beta2_im"] = b2.imag();
  j["alpha0"] = fit.alpha0;
  j["residuals"] = fit.residuals;
  os << j.dump(2) << '\n';
}

}  // namespace abpole
