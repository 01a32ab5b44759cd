#include "wpn/bounds_upper.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>

#include "wpn/entropy.hpp"
#include "wpn/error.hpp"
#include "wpn/integrate.hpp"
#include "wpn/random.hpp"
#include "wpn/special.hpp"

namespace wpn {

namespace {

constexpr std::uint64_t kNoiseStream = 0x6f72;

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw Error(ErrorCode::NumericalFailure, std::string("nonfinite ") + what);
}

}  // namespace

double g_term_integral(const ChannelParams& params, double r_in, double mu) {
  if (!(r_in >= 0.0) || !std::isfinite(r_in)) throw Error(ErrorCode::DomainError, "R must be finite and >= 0");
  if (!(mu >= 0.0) || !std::isfinite(mu)) throw Error(ErrorCode::DomainError, "mu must be finite and >= 0");
  const double sw = params.sigma_w_sq();
  const double sd = params.sigma_delta_sq();
  const double s = std::sqrt(sw);

  // Rotating (w_par, w_perp) leaves the Gaussian invariant, so the 2-D
  // expectation only depends on r = |R + w|, which is Rice(R, sigma_w).
  auto integrand = [&](double r) {
    if (r <= 0.0) return 0.0;
    const double inner = sw / ((r + mu) * (r + mu)) + sd;
    const double log_pdf = r_in > 0.0 ? log_rice_pdf(r, r_in, sw)
                                      : std::log(r / sw) - r * r / (2.0 * sw);
    return std::exp(log_pdf) * 0.5 * std::log2(inner);
  };
  const double lo = std::max(0.0, r_in - 12.0 * s);
  const double hi = r_in + 12.0 * s;
  IntegrateOptions opts;
  opts.abs_tol = 1e-9;
  opts.rel_tol = 1e-10;
  if (r_in > lo && r_in < hi) opts.breakpoints = {r_in};
  const double v = integrate_adaptive(integrand, lo, hi, opts).value;
  require_finite(v, "G(R) integral term");
  return v;
}

GofR g_of_r(const ChannelParams& params, double r_in, double mu, std::size_t n_samples,
            std::uint64_t seed) {
  if (n_samples < 10) throw Error(ErrorCode::InvalidInput, "too few entropy samples");
  GofR out;
  out.r = r_in;
  out.mu = mu;
  out.n_samples = n_samples;
  out.seed = seed;
  out.term_integral = g_term_integral(params, r_in, mu);

  const double s = std::sqrt(params.sigma_w_sq());
  const double sd = std::sqrt(params.sigma_delta_sq());
  Rng rng = make_rng(seed, kNoiseStream);
  NormalSource normal;
  std::vector<double> amp(n_samples), ang(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) {
    const double wp = s * normal(rng);
    const double wq = s * normal(rng);
    const double delta = sd * normal(rng);
    amp[i] = std::hypot(r_in + wp, wq);
    ang[i] = std::atan(wq / (r_in + wp)) + delta;
  }
  const EntropySample joint = EntropySample::pairs(amp, ang);
  const double h_joint = knn_entropy(joint);
  out.term_h_r = knn_entropy(joint.marginal(0));
  out.term_h_cond = h_joint - out.term_h_r;
  out.value = out.term_integral - out.term_h_r - out.term_h_cond;
  require_finite(out.value, "G(R)");
  return out;
}

double g_limit(const ChannelParams& params) {
  return -std::log2(2.0 * std::numbers::pi * std::numbers::e) - 0.5 * std::log2(params.sigma_w_sq());
}

double aux_penalty(const ChannelParams& params, const AuxOutputParams& aux) {
  return -std::log2(aux.alpha_u / (2.0 * std::numbers::pi)) +
         aux.beta_u / std::numbers::ln2 * (params.es() + 2.0 * params.sigma_w_sq());
}

std::vector<double> default_r_grid(const ChannelParams& params) {
  constexpr int kPoints = 60;
  const double scale = std::sqrt(params.es());
  const double lo = std::log(1e-3), hi = std::log(30.0);
  std::vector<double> grid(kPoints);
  for (int i = 0; i < kPoints; ++i) grid[i] = scale * std::exp(lo + (hi - lo) * i / (kPoints - 1));
  return grid;
}

std::vector<double> default_mu_grid(const ChannelParams& params) {
  const double scale = std::sqrt(params.es());
  return {0.0, 0.05 * scale, 0.1 * scale, 0.5 * scale, 1.0 * scale};
}

UpperBoundResult upper_bound_cu(const ChannelParams& params, const std::vector<double>& mu_grid,
                                const std::vector<double>& r_grid, std::size_t n_samples,
                                std::uint64_t seed, const AuxSolveOptions& aux_options) {
  if (mu_grid.empty() || r_grid.empty()) throw Error(ErrorCode::InvalidInput, "empty grid");
  if (!std::is_sorted(mu_grid.begin(), mu_grid.end()) || !std::is_sorted(r_grid.begin(), r_grid.end())) {
    throw Error(ErrorCode::InvalidInput, "grids must be sorted ascending");
  }
  if (mu_grid.front() < 0.0) throw Error(ErrorCode::InvalidInput, "mu must be >= 0");
  if (r_grid.front() < 0.0) throw Error(ErrorCode::InvalidInput, "R must be >= 0");

  UpperBoundResult res;
  res.snr_db = snr_db(params);
  res.r_grid = r_grid;
  res.mu_grid = mu_grid;
  res.n_samples = n_samples;
  res.seed = seed;

  // The sampled entropy terms do not depend on mu: estimate them once per R
  // and share them across the mu grid (common random numbers).
  std::vector<GofR> base(r_grid.size());
  for (std::size_t j = 0; j < r_grid.size(); ++j) {
    base[j] = g_of_r(params, r_grid[j], mu_grid.front(), n_samples,
                     derive_seed(seed, std::bit_cast<std::uint64_t>(r_grid[j])));
  }

  res.c_u = std::numeric_limits<double>::infinity();
  for (double mu : mu_grid) {
    UpperBoundGridPoint pt;
    pt.mu = mu;
    pt.aux = solve_aux_params(params, mu, aux_options);
    pt.penalty = aux_penalty(params, pt.aux);
    pt.max_g = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < r_grid.size(); ++j) {
      GofR g = base[j];
      g.mu = mu;
      if (mu != mu_grid.front()) {
        g.term_integral = g_term_integral(params, g.r, mu);
        g.value = g.term_integral - g.term_h_r - g.term_h_cond;
      }
      if (g.value > pt.max_g) {
        pt.max_g = g.value;
        pt.argmax_r = g.r;
      }
      res.evaluations.push_back(g);
    }
    pt.bound = pt.penalty + pt.max_g;
    if (pt.bound < res.c_u) {
      res.c_u = pt.bound;
      res.argmin_mu = mu;
      res.argmax_r = pt.argmax_r;
      res.aux = pt.aux;
    }
    res.per_mu.push_back(pt);
  }
  require_finite(res.c_u, "C_U");

  const AuxOutputParams at_zero =
      mu_grid.front() == 0.0 ? res.per_mu.front().aux : solve_aux_params(params, 0.0, aux_options);
  res.c_u_tilde = upper_bound_cu_tilde(params, at_zero);
  return res;
}

double upper_bound_cu_tilde(const ChannelParams& params, const AuxOutputParams& aux) {
  if (aux.mu != 0.0) throw Error(ErrorCode::InvalidInput, "closed form needs the mu = 0 solution");
  const double e = std::numbers::e;
  const double v = aux.beta_u / std::numbers::ln2 * (params.es() + 2.0 * params.sigma_w_sq()) -
                   0.5 * std::log2(params.sigma_w_sq() * e * e * aux.alpha_u * aux.alpha_u);
  require_finite(v, "closed-form bound");
  return v;
}

double upper_bound_cu_tilde(const ChannelParams& params, const AuxSolveOptions& aux_options) {
  return upper_bound_cu_tilde(params, solve_aux_params(params, 0.0, aux_options));
}

}  // namespace wpn
