#pragma once

#include <cstdint>
#include <vector>

#include "wpn/model.hpp"
#include "wpn/quad.hpp"

namespace wpn {

// G(R) = term_integral - term_h_r - term_h_cond, all in bits.
struct GofR {
  double r = 0.0;
  double mu = 0.0;
  double term_integral = 0.0;  // (1/2) E[log2(sigma_w^2 / (r + mu)^2 + sigma_delta^2)]
  double term_h_r = 0.0;       // h(r)
  double term_h_cond = 0.0;    // h(N + Delta | r)
  double value = 0.0;
  std::size_t n_samples = 0;
  std::uint64_t seed = 0;
};

constexpr std::size_t kDefaultEntropySamples = 100'000;

// Deterministic part of G(R): expectation over the Rice-distributed output
// amplitude r = |R + w|, computed by adaptive quadrature.
double g_term_integral(const ChannelParams& params, double r_in, double mu);

// Entropy terms are estimated from n_samples draws of (w_par, w_perp, Delta).
GofR g_of_r(const ChannelParams& params, double r_in, double mu,
            std::size_t n_samples = kDefaultEntropySamples, std::uint64_t seed = 1);

// lim_{R -> inf} G(R) = -log2(2 pi e) - (1/2) log2(sigma_w^2)
double g_limit(const ChannelParams& params);

// -log2(alpha_U / 2 pi) + beta_U (E_s + 2 sigma_w^2) / ln 2
double aux_penalty(const ChannelParams& params, const AuxOutputParams& aux);

struct UpperBoundGridPoint {
  double mu = 0.0;
  AuxOutputParams aux;
  double penalty = 0.0;
  double max_g = 0.0;
  double argmax_r = 0.0;
  double bound = 0.0;
};

struct UpperBoundResult {
  double snr_db = 0.0;
  double c_u = 0.0;
  double c_u_tilde = 0.0;
  double argmax_r = 0.0;
  double argmin_mu = 0.0;
  AuxOutputParams aux;  // at argmin_mu
  std::vector<double> r_grid;
  std::vector<double> mu_grid;
  std::vector<UpperBoundGridPoint> per_mu;
  std::vector<GofR> evaluations;  // row-major, mu outer, R inner
  std::size_t n_samples = 0;
  std::uint64_t seed = 0;
};

// 60 log-spaced points on [1e-3, 30] sqrt(E_s).
std::vector<double> default_r_grid(const ChannelParams& params);
// {0, 0.05, 0.1, 0.5, 1} sqrt(E_s)
std::vector<double> default_mu_grid(const ChannelParams& params);

UpperBoundResult upper_bound_cu(const ChannelParams& params, const std::vector<double>& mu_grid,
                                const std::vector<double>& r_grid,
                                std::size_t n_samples = kDefaultEntropySamples,
                                std::uint64_t seed = 1, const AuxSolveOptions& aux_options = {});

// High-SNR closed form:
//   beta_U(0) (E_s + 2 sigma_w^2) / ln 2 - (1/2) log2(sigma_w^2 e^2 alpha_U(0)^2)
double upper_bound_cu_tilde(const ChannelParams& params, const AuxOutputParams& aux_at_zero);
double upper_bound_cu_tilde(const ChannelParams& params, const AuxSolveOptions& aux_options = {});

}  // namespace wpn
