#pragma once

// Reference values computed independently of the library.

#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>

#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/beta.hpp>

namespace oracle {

inline double bisect(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-12) {
  double flo = f(lo);
  if (flo * f(hi) > 0.0) throw std::invalid_argument("bisect: no sign change");
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// First positive zero of J_nu inside the bracket [lo, hi].
inline double bessel_zero(double nu, double lo, double hi) {
  return bisect([nu](double x) { return boost::math::cyl_bessel_j(nu, x); }, lo, hi);
}

/// Minimum of the half-plane problem from its closed-form minimizer on the
/// free segment: k = 1 gives sqrt(1 - t), k = 3 gives sqrt(1 - t)(t + 1/2),
/// and the minimum is -1/2 of the load pairing (k/2) int t^{k/2-1} w dt.
inline double m_k(int k) {
  using boost::math::beta;
  if (k == 1) return -0.5 * 0.5 * beta(0.5, 1.5);
  if (k == 3) return -0.5 * 1.5 * (beta(2.5, 1.5) + 0.5 * beta(1.5, 1.5));
  throw std::invalid_argument("m_k oracle only for k = 1, 3");
}

}  // namespace oracle
