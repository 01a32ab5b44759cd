#include "wpn/special.hpp"

#include <cmath>
#include <numbers>

#include <boost/math/special_functions/bessel.hpp>

namespace wpn {

double log_bessel_i0_scaled(double x) {
  x = std::abs(x);
  if (x < 50.0) return std::log(boost::math::cyl_bessel_i(0, x)) - x;
  // Hankel expansion; the next term is below 1e-6 relative at x = 50
  const double t = 1.0 / x;
  return -0.5 * std::log(2.0 * std::numbers::pi * x) +
         std::log1p(t * (0.125 + t * (9.0 / 128.0 + t * 225.0 / 3072.0)));
}

double log_bessel_i0(double x) { return std::abs(x) + log_bessel_i0_scaled(x); }

double log_rice_pdf(double r, double r_in, double sigma_w_sq) {
  const double z = r * r_in / sigma_w_sq;
  const double d = r - r_in;
  // exp(-(r^2 + R^2) / 2s) I0(z) = exp(-(r - R)^2 / 2s) * [I0(z) e^{-z}]
  return std::log(r / sigma_w_sq) - d * d / (2.0 * sigma_w_sq) + log_bessel_i0_scaled(z);
}

double log_phase_averaged_emission(double y_abs, double r_in, double sigma_w_sq) {
  const double d = y_abs - r_in;
  return -std::log(2.0 * std::numbers::pi * sigma_w_sq) - d * d / (2.0 * sigma_w_sq) +
         log_bessel_i0_scaled(y_abs * r_in / sigma_w_sq);
}

}  // namespace wpn
