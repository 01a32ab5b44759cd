#include "wpn/quad.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "wpn/error.hpp"
#include "wpn/integrate.hpp"
#include "wpn/random.hpp"
#include "wpn/sampler.hpp"

namespace wpn {

namespace {

constexpr double kBracketLo = 1e-6;
constexpr double kBracketHi = 10.0;
constexpr double kBracketLoLimit = 1e-9;
constexpr double kBracketHiLimit = 1e3;
constexpr int kMonotoneGrid = 24;

double q_kernel(const ChannelParams& params, double mu, double beta, double r) {
  const double shifted = r + mu;
  if (shifted <= 0.0) return 0.0;
  const double sw = params.sigma_w_sq();
  // 1 / sqrt(sw / s^2 + sd) = s / sqrt(sw + sd s^2), finite at s = 0
  return shifted * std::exp(-beta * r * r) /
         std::sqrt(sw + params.sigma_delta_sq() * shifted * shifted);
}

struct Moments {
  double m0 = 0.0;
  double m2 = 0.0;
};

Moments aux_moments(const ChannelParams& params, double mu, double beta, double rel_tol) {
  IntegrateOptions options;
  options.abs_tol = 1e-300;
  options.rel_tol = rel_tol;
  options.gaussian_rate = beta;
  // the shape changes where sigma_w / (r + mu) ~ sigma_delta
  if (params.sigma_delta_sq() > 0.0) {
    const double knee = std::sqrt(params.sigma_w_sq() / params.sigma_delta_sq()) - mu;
    if (knee > 0.0) options.breakpoints.push_back(knee);
  }
  options.breakpoints.push_back(1.0 / std::sqrt(beta));
  Moments out;
  out.m0 = integrate_adaptive([&](double r) { return q_kernel(params, mu, beta, r); }, 0.0,
                              kInfinity, options)
               .value;
  out.m2 = integrate_adaptive([&](double r) { return r * r * q_kernel(params, mu, beta, r); },
                              0.0, kInfinity, options)
               .value;
  return out;
}

// Two-dimensional unnormalized input kernel integrated as an iterated
// product of adaptive rules.
Moments input_moments_m2(const ChannelParams& params, double beta, double rel_tol) {
  const double upper = gaussian_truncation_point(beta, 1e-16);
  IntegrateOptions inner;
  inner.abs_tol = 1e-300;
  inner.rel_tol = rel_tol * 0.1;
  IntegrateOptions outer;
  outer.abs_tol = 1e-300;
  outer.rel_tol = rel_tol;
  if (params.sigma_delta_sq() > 0.0) {
    const double knee = std::sqrt(params.sigma_w_sq() / params.sigma_delta_sq());
    if (knee < upper) {
      inner.breakpoints.push_back(knee);
      outer.breakpoints.push_back(knee);
    }
  }
  const double sd = params.sigma_delta_sq();
  const double sw = params.sigma_w_sq();

  auto kernel = [&](double r1, double r2, int power) {
    if (r1 <= 0.0 || r2 <= 0.0) return 0.0;
    const double a = r1 * r1;
    const double b = r2 * r2;
    // exp(-beta |R|^2) / g_b with g_b = sd + sw/a + sw/b
    const double value = std::exp(-beta * (a + b)) * a * b / (sd * a * b + sw * (a + b));
    return power == 0 ? value : value * (a + b);
  };
  auto nested = [&](int power) {
    return integrate_adaptive(
               [&](double r1) {
                 return integrate_adaptive([&](double r2) { return kernel(r1, r2, power); }, 0.0,
                                           upper, inner)
                     .value;
               },
               0.0, upper, outer)
        .value;
  };
  return {nested(0), nested(2)};
}

// Squared half-normal draws shared across all beta evaluations so that the
// Monte-Carlo moment ratio is a smooth function of beta.
class HalfNormalBank {
 public:
  static constexpr std::size_t kChunk = 1 << 20;

  HalfNormalBank(std::size_t samples, int dim, std::uint64_t seed)
      : samples_(samples), dim_(dim), squares_(samples * static_cast<std::size_t>(dim)) {
    for (std::size_t start = 0, chunk = 0; start < samples; start += kChunk, ++chunk) {
      Rng rng = make_rng(seed, chunk);
      NormalSource normal;
      const std::size_t end = std::min(samples, start + kChunk) * static_cast<std::size_t>(dim);
      for (std::size_t i = start * static_cast<std::size_t>(dim); i < end; ++i) {
        const double z = normal(rng);
        squares_[i] = static_cast<float>(z * z);
      }
    }
  }

  std::size_t samples() const { return samples_; }
  const float* row(std::size_t i) const { return &squares_[i * static_cast<std::size_t>(dim_)]; }

 private:
  std::size_t samples_;
  int dim_;
  std::vector<float> squares_;
};

struct McMoments {
  double mean_w = 0.0;
  double mean_w_norm = 0.0;
  double rel_se_w = 0.0;
  double rel_se_w_norm = 0.0;
};

// E over R_i = |z_i| / sqrt(2 beta) of g_b^{-3/2} and |R|^2 g_b^{-3/2}.
McMoments input_moments_m3(const ChannelParams& params, double beta, const HalfNormalBank& bank) {
  const double sd = params.sigma_delta_sq();
  const double sw = params.sigma_w_sq();
  const double scale = 1.0 / (2.0 * beta);  // R^2 = z^2 * scale
  const double sw_over = sw / scale;
  const std::size_t n = bank.samples();

  double s0 = 0.0, s2 = 0.0, q0 = 0.0, q2 = 0.0;
  constexpr std::size_t kBlock = 4096;
  for (std::size_t start = 0; start < n; start += kBlock) {
    double b0 = 0.0, b2 = 0.0, c0 = 0.0, c2 = 0.0;
    const std::size_t end = std::min(n, start + kBlock);
    for (std::size_t i = start; i < end; ++i) {
      const float* z = bank.row(i);
      if (z[0] == 0.0f || z[1] == 0.0f || z[2] == 0.0f) continue;
      // block order (R_{n-2}, R_{n-1}, R_n) = (z0, z1, z2)
      const double a = sw_over / z[2];
      const double b = sw_over / z[1];
      const double c = sw_over / z[0];
      const double g = sd + a + b * (sd + c) / (sd + b + c);
      const double w = 1.0 / (g * std::sqrt(g));
      const double wn = w * (static_cast<double>(z[0]) + z[1] + z[2]) * scale;
      b0 += w;
      b2 += wn;
      c0 += w * w;
      c2 += wn * wn;
    }
    s0 += b0;
    s2 += b2;
    q0 += c0;
    q2 += c2;
  }
  const double nn = static_cast<double>(n);
  McMoments out;
  out.mean_w = s0 / nn;
  out.mean_w_norm = s2 / nn;
  auto rel_se = [nn](double sum, double sum_sq) {
    const double mean = sum / nn;
    const double var = std::max(0.0, sum_sq / nn - mean * mean);
    return std::sqrt(var / nn) / mean;
  };
  out.rel_se_w = rel_se(s0, q0);
  out.rel_se_w_norm = rel_se(s2, q2);
  return out;
}

}  // namespace

double aux_moment_target(const ChannelParams& params, AuxMomentTarget target) {
  switch (target) {
    case AuxMomentTarget::kTabulated: return params.es() + params.sigma_w_sq();
    case AuxMomentTarget::kReceivedPower: return params.es() + 2.0 * params.sigma_w_sq();
  }
  return params.es() + params.sigma_w_sq();
}

double q_density(const ChannelParams& params, const AuxOutputParams& aux, double r) {
  if (!(r > 0.0)) throw Error(ErrorCode::DomainError, "q(r) is defined for r > 0");
  const double shifted = r + aux.mu;
  return aux.alpha_u * std::exp(-aux.beta_u * r * r) /
         std::sqrt(params.sigma_w_sq() / (shifted * shifted) + params.sigma_delta_sq());
}

BetaSolve solve_decreasing_ratio(const std::function<double(double)>& ratio, double target,
                                 double rel_tol, int max_iterations) {
  double lo = kBracketLo;
  double hi = kBracketHi;
  double r_lo = ratio(lo);
  double r_hi = ratio(hi);
  while (!(r_lo > target) && lo > kBracketLoLimit) {
    lo = std::max(kBracketLoLimit, lo * 0.1);
    r_lo = ratio(lo);
  }
  while (!(r_hi < target) && hi < kBracketHiLimit) {
    hi = std::min(kBracketHiLimit, hi * 10.0);
    r_hi = ratio(hi);
  }
  if (!(r_lo > target) || !(r_hi < target)) {
    throw Error(ErrorCode::NoBracket, "moment ratio does not bracket the target on [1e-9, 1e3]");
  }

  double previous = r_lo;
  const double log_lo = std::log(lo);
  const double log_hi = std::log(hi);
  for (int i = 1; i <= kMonotoneGrid; ++i) {
    const double beta = std::exp(log_lo + (log_hi - log_lo) * i / kMonotoneGrid);
    const double value = i == kMonotoneGrid ? r_hi : ratio(beta);
    if (!(value < previous)) {
      throw Error(ErrorCode::NoBracket, "moment ratio is not strictly decreasing in beta");
    }
    previous = value;
  }

  BetaSolve out;
  for (int it = 1; it <= max_iterations; ++it) {
    const double mid = std::sqrt(lo * hi);
    const double value = ratio(mid);
    out = {mid, value, it};
    if (std::abs(value - target) / target < rel_tol) return out;
    if (value > target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  throw Error(ErrorCode::NoConvergence, "bisection on beta did not converge");
}

AuxOutputParams solve_aux_params(const ChannelParams& params, double mu,
                                 const AuxSolveOptions& options) {
  if (!(mu >= 0.0) || !std::isfinite(mu)) throw Error(ErrorCode::InvalidInput, "mu must be >= 0");
  const double target = aux_moment_target(params, options.target);
  const auto solve = solve_decreasing_ratio(
      [&](double beta) {
        const Moments m = aux_moments(params, mu, beta, options.quad_rel_tol);
        return m.m2 / m.m0;
      },
      target, options.ratio_tol, options.max_iterations);

  const Moments m = aux_moments(params, mu, solve.beta, options.quad_rel_tol);
  AuxOutputParams out;
  out.mu = mu;
  out.beta_u = solve.beta;
  out.alpha_u = 1.0 / m.m0;
  out.residuals = {out.alpha_u * m.m0 - 1.0, (out.alpha_u * m.m2 - target) / target};
  out.target = options.target;
  out.moment_target = target;
  out.iterations = solve.iterations;
  return out;
}

InputDistParams solve_input_params(const ChannelParams& params, int m,
                                   const InputSolveOptions& options) {
  if (m != 2 && m != 3) throw Error(ErrorCode::InvalidInput, "M must be 2 or 3");
  if (!(params.sigma_delta_sq() > 0.0)) {
    throw Error(ErrorCode::DomainError, "input density needs sigma_delta^2 > 0");
  }
  const double target = m * params.es();
  InputDistParams out;
  out.m = m;

  if (m == 2) {
    const auto solve = solve_decreasing_ratio(
        [&](double beta) {
          const Moments mm = input_moments_m2(params, beta, options.quad_rel_tol);
          return mm.m2 / mm.m0;
        },
        target, options.ratio_tol_quadrature, options.max_iterations);
    const Moments mm = input_moments_m2(params, solve.beta, options.quad_rel_tol);
    out.beta_l = solve.beta;
    out.alpha_l = 1.0 / mm.m0;
    out.residuals = {out.alpha_l * mm.m0 - 1.0, (out.alpha_l * mm.m2 - target) / target};
    out.iterations = solve.iterations;
    out.method = "quadrature";
    return out;
  }

  if (options.mc_samples < 1000) throw Error(ErrorCode::InvalidInput, "too few Monte-Carlo samples");
  const HalfNormalBank bank(options.mc_samples, 3, options.seed);
  const auto solve = solve_decreasing_ratio(
      [&](double beta) {
        const McMoments mc = input_moments_m3(params, beta, bank);
        return mc.mean_w_norm / mc.mean_w;
      },
      target, options.ratio_tol_monte_carlo, options.max_iterations);
  const McMoments mc = input_moments_m3(params, solve.beta, bank);
  if (mc.rel_se_w > options.max_rel_std_err || mc.rel_se_w_norm > options.max_rel_std_err) {
    throw Error(ErrorCode::InsufficientPrecision,
                "Monte-Carlo relative standard error exceeds the precision budget");
  }
  // proposal density prod 2 sqrt(beta/pi) exp(-beta R_i^2) cancels the Gaussian factor
  const double volume = std::pow(std::numbers::pi / (4.0 * solve.beta), 1.5);
  const double integral0 = volume * mc.mean_w;
  const double integral2 = volume * mc.mean_w_norm;
  out.beta_l = solve.beta;
  out.alpha_l = 1.0 / integral0;
  out.residuals = {out.alpha_l * integral0 - 1.0, (out.alpha_l * integral2 - target) / target};
  out.iterations = solve.iterations;
  out.method = "monte-carlo";
  out.seed = options.seed;
  out.mc_samples = options.mc_samples;
  out.rel_std_err = {mc.rel_se_w, mc.rel_se_w_norm};
  return out;
}

}  // namespace wpn
