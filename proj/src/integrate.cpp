#include "wpn/integrate.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <queue>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "wpn/error.hpp"

namespace wpn {

namespace {

using Kronrod = boost::math::quadrature::gauss_kronrod<double, 21>;
using Gauss = boost::math::quadrature::gauss<double, 10>;

struct Segment {
  double a;
  double b;
  double value;
  double error;
  bool operator<(const Segment& other) const { return error < other.error; }
};

Segment apply_rule(const Integrand& f, double a, double b, int& evaluations) {
  const auto& nodes = Kronrod::abscissa();
  const auto& kronrod_w = Kronrod::weights();
  const auto& gauss_w = Gauss::weights();
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);

  const double f0 = f(center);
  double kronrod = f0 * kronrod_w[0];
  double gauss = 0.0;
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    const double dx = half * nodes[i];
    const double pair = f(center - dx) + f(center + dx);
    kronrod += pair * kronrod_w[i];
    if (i % 2 == 1) gauss += pair * gauss_w[i / 2];
  }
  evaluations += 2 * static_cast<int>(nodes.size()) - 1;
  if (!std::isfinite(kronrod)) {
    throw Error(ErrorCode::NumericalFailure, "integrand is not finite on the integration range");
  }
  return {a, b, kronrod * half, std::abs((kronrod - gauss) * half)};
}

// Geometric search for a point past which |f| stays negligible.
double probe_truncation(const Integrand& f, double a, double tol) {
  double upper = std::max(1.0, 2.0 * std::abs(a)) + a;
  for (int i = 0; i < 60; ++i) {
    bool small = true;
    for (double s : {1.0, 1.25, 1.5, 2.0}) {
      const double x = a + s * (upper - a);
      if (std::abs(f(x)) * (x - a) > 1e-3 * tol) {
        small = false;
        break;
      }
    }
    if (small) return upper;
    upper = a + 2.0 * (upper - a);
  }
  throw Error(ErrorCode::NoConvergence, "integrand does not decay on the semi-infinite range");
}

}  // namespace

double gaussian_truncation_point(double beta, double mass) {
  if (!(beta > 0.0)) throw Error(ErrorCode::DomainError, "Gaussian rate must be positive");
  // tail = sqrt(pi / (4 beta)) erfc(sqrt(beta) T)
  const double scale = std::sqrt(std::numbers::pi / (4.0 * beta));
  double t = 1.0;
  while (scale * std::erfc(t) >= mass) t *= 1.1;
  return t / std::sqrt(beta);
}

IntegrateResult integrate_adaptive(const Integrand& f, double a, double b,
                                   const IntegrateOptions& options) {
  if (!(options.abs_tol > 0.0) && !(options.rel_tol > 0.0)) {
    throw Error(ErrorCode::InvalidInput, "tolerance must be positive");
  }
  if (std::isinf(b)) {
    if (b < 0.0) throw Error(ErrorCode::InvalidInput, "upper limit must be +infinity or finite");
    if (options.gaussian_rate) {
      b = std::max(a, 0.0) + gaussian_truncation_point(*options.gaussian_rate);
    } else {
      b = probe_truncation(f, a, options.abs_tol > 0.0 ? options.abs_tol : 1e-12);
    }
  }
  if (!std::isfinite(a) || !std::isfinite(b)) {
    throw Error(ErrorCode::InvalidInput, "integration limits must be finite or +infinity");
  }

  IntegrateResult result;
  if (a == b) return result;
  const double sign = b > a ? 1.0 : -1.0;
  if (b < a) std::swap(a, b);

  std::vector<double> cuts{a};
  for (double p : options.breakpoints) {
    if (p > a && p < b) cuts.push_back(p);
  }
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());

  std::priority_queue<Segment> heap;
  double total = 0.0;
  double total_error = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    Segment s = apply_rule(f, cuts[i], cuts[i + 1], result.evaluations);
    total += s.value;
    total_error += s.error;
    heap.push(s);
  }

  auto target = [&] { return std::max(options.abs_tol, options.rel_tol * std::abs(total)); };
  while (total_error > target()) {
    if (static_cast<int>(heap.size()) >= options.max_intervals) {
      throw Error(ErrorCode::NoConvergence, "adaptive quadrature exceeded its interval budget");
    }
    Segment worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {
      throw Error(ErrorCode::NoConvergence, "adaptive quadrature reached machine resolution");
    }
    Segment left = apply_rule(f, worst.a, mid, result.evaluations);
    Segment right = apply_rule(f, mid, worst.b, result.evaluations);
    total += left.value + right.value - worst.value;
    total_error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }

  // re-sum to shed the drift from incremental updates
  total = 0.0;
  total_error = 0.0;
  result.intervals = static_cast<int>(heap.size());
  while (!heap.empty()) {
    total += heap.top().value;
    total_error += heap.top().error;
    heap.pop();
  }
  result.value = sign * total;
  result.error = total_error;
  return result;
}

double integrate_1d(const Integrand& f, double a, double b, double tol) {
  if (!(tol > 0.0)) throw Error(ErrorCode::InvalidInput, "tolerance must be positive");
  IntegrateOptions options;
  options.abs_tol = tol;
  return integrate_adaptive(f, a, b, options).value;
}

}  // namespace wpn
