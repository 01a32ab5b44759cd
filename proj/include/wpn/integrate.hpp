#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <vector>

namespace wpn {

using Integrand = std::function<double(double)>;

constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct IntegrateOptions {
  double abs_tol = 1e-10;
  double rel_tol = 0.0;
  int max_intervals = 4000;
  // Decay rate beta of a Gaussian envelope exp(-beta x^2) bounding the
  // integrand. Used to truncate semi-infinite ranges analytically.
  std::optional<double> gaussian_rate;
  // Interior points where the integrand is known to be non-smooth.
  std::vector<double> breakpoints;
};

struct IntegrateResult {
  double value = 0.0;
  double error = 0.0;
  int evaluations = 0;
  int intervals = 0;
};

// Global adaptive Gauss-Kronrod (10/21) quadrature on [a, b]. b may be
// +infinity, in which case the range is truncated where the tail is negligible.
IntegrateResult integrate_adaptive(const Integrand& f, double a, double b,
                                   const IntegrateOptions& options = {});

// Convenience form with an absolute error target.
double integrate_1d(const Integrand& f, double a, double b, double tol);

// Upper limit T such that the Gaussian tail mass int_T^inf exp(-beta x^2) dx
// falls below `mass`.
double gaussian_truncation_point(double beta, double mass = 1e-14);

}  // namespace wpn
