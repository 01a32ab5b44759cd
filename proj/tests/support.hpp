#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/quadrature/gauss.hpp>

#include "wpn/model.hpp"
#include "wpn/quad.hpp"
#include "wpn/sampler.hpp"

namespace wpn::testing {

inline double mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

inline double variance(const std::vector<double>& v) {
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

inline double correlation(const std::vector<double>& a, const std::vector<double>& b) {
  const double ma = mean(a), mb = mean(b);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

// Kolmogorov-Smirnov statistic of a sample against uniform on [0, width).
inline double ks_uniform(std::vector<double> v, double width) {
  std::sort(v.begin(), v.end());
  const double n = static_cast<double>(v.size());
  double d = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double f = v[i] / width;
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

// Asymptotic 1% critical value of the one-sample KS statistic.
inline double ks_critical_1pct(std::size_t n) { return 1.6276 / std::sqrt(static_cast<double>(n)); }

// Forward algorithm over a uniform grid of phase bins: per-use natural-log
// predictive densities log f(y_k | y^{k-1}, x^k), starting from a uniform
// phase. Reference for the particle filter.
inline std::vector<double> phase_grid_log_densities(const ChannelParams& params, const SymbolBlock& input,
                                                    const ReceivedBlock& output, int bins) {
  const double two_pi = 2.0 * std::numbers::pi;
  const double step = two_pi / bins;
  const double sd = std::sqrt(params.sigma_delta_sq());
  const double sw = params.sigma_w_sq();

  // wrapped-Gaussian transition kernel, truncated at 10 sigma
  const int half = std::min(bins / 2, static_cast<int>(std::ceil(10.0 * sd / step)) + 1);
  std::vector<double> kernel(2 * half + 1, 0.0);
  double ksum = 0.0;
  for (int d = -half; d <= half; ++d) {
    double v = 0.0;
    for (int wrap = -2; wrap <= 2; ++wrap) {
      const double x = d * step + wrap * two_pi;
      v += sd > 0.0 ? std::exp(-x * x / (2.0 * sd * sd)) : (x == 0.0 ? 1.0 : 0.0);
    }
    kernel[d + half] = v;
    ksum += v;
  }
  for (double& k : kernel) k /= ksum;

  std::vector<double> p(bins, 1.0 / bins), q(bins), loge(bins);
  std::vector<double> out(input.size());
  for (std::size_t k = 0; k < input.size(); ++k) {
    std::fill(q.begin(), q.end(), 0.0);
    for (int j = 0; j < bins; ++j) {
      if (p[j] == 0.0) continue;
      for (int d = -half; d <= half; ++d) q[((j + d) % bins + bins) % bins] += p[j] * kernel[d + half];
    }
    const std::complex<double> x = input.symbol(k), y = output.sample(k);
    double lmax = -1e300;
    for (int j = 0; j < bins; ++j) {
      loge[j] = -std::log(two_pi * sw) - std::norm(y - x * std::polar(1.0, j * step)) / (2.0 * sw);
      lmax = std::max(lmax, loge[j]);
    }
    double s = 0.0;
    for (int j = 0; j < bins; ++j) {
      p[j] = q[j] * std::exp(loge[j] - lmax);
      s += p[j];
    }
    for (double& v : p) v /= s;
    out[k] = lmax + std::log(s);
  }
  return out;
}

struct ChiSquare {
  double statistic = 0.0;
  int cells = 0;
  double critical = 0.0;  // 1% level
  bool pass() const { return statistic < critical; }
};

// Pearson goodness of fit of M = 2 amplitude blocks against f on a
// bins x bins grid over [0, 3 / sqrt(2 beta)]^2 plus one cell for the rest.
// Cells with fewer than 5 expected counts are pooled.
inline ChiSquare chi_square_m2(const ChannelParams& p, const InputDistParams& d,
                               const std::vector<double>& amplitudes, int bins = 30) {
  const std::size_t n_blocks = amplitudes.size() / 2;
  const double top = 3.0 / std::sqrt(2.0 * d.beta_l);
  const double w = top / bins;
  const auto cells = static_cast<std::size_t>(bins * bins);
  std::vector<double> observed(cells + 1, 0.0), expected(cells + 1, 0.0);
  for (std::size_t b = 0; b < n_blocks; ++b) {
    const double r1 = amplitudes[2 * b], r2 = amplitudes[2 * b + 1];
    if (r1 >= top || r2 >= top) {
      observed.back() += 1.0;
    } else {
      observed[static_cast<std::size_t>(r1 / w) * bins + static_cast<std::size_t>(r2 / w)] += 1.0;
    }
  }
  using Rule = boost::math::quadrature::gauss<double, 10>;
  double inside = 0.0;
  for (int i = 0; i < bins; ++i) {
    for (int j = 0; j < bins; ++j) {
      const double cell = Rule::integrate(
                              [&](double u) {
                                return Rule::integrate(
                                    [&](double v) {
                                      const double x[2] = {(i + 0.5 + 0.5 * u) * w, (j + 0.5 + 0.5 * v) * w};
                                      return f_input_density(p, d, x);
                                    },
                                    -1.0, 1.0);
                              },
                              -1.0, 1.0) *
                          0.25 * w * w;
      expected[static_cast<std::size_t>(i * bins + j)] = cell * static_cast<double>(n_blocks);
      inside += cell;
    }
  }
  expected.back() = (1.0 - inside) * static_cast<double>(n_blocks);

  ChiSquare out;
  double pool_o = 0.0, pool_e = 0.0;
  for (std::size_t c = 0; c < expected.size(); ++c) {
    if (expected[c] < 5.0) {
      pool_o += observed[c];
      pool_e += expected[c];
      continue;
    }
    out.statistic += (observed[c] - expected[c]) * (observed[c] - expected[c]) / expected[c];
    ++out.cells;
  }
  if (pool_e > 0.0) {
    out.statistic += (pool_o - pool_e) * (pool_o - pool_e) / pool_e;
    ++out.cells;
  }
  out.critical = boost::math::quantile(boost::math::chi_squared(out.cells - 1), 0.99);
  return out;
}

}  // namespace wpn::testing
