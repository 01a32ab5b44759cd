#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>

#include "wpn/model.hpp"

namespace wpn {

// Second-moment target for the auxiliary output density q(r).
//   kTabulated:     E_s + sigma_w^2   (the convention behind the published
//                                      alpha_U / beta_U table)
//   kReceivedPower: E_s + 2 sigma_w^2 (the received power E[r^2])
enum class AuxMomentTarget { kTabulated, kReceivedPower };

double aux_moment_target(const ChannelParams& params, AuxMomentTarget target);

struct AuxOutputParams {
  double mu = 0.0;
  double alpha_u = 0.0;
  double beta_u = 0.0;
  // {int q - 1, (int r^2 q - target) / target}
  std::array<double, 2> residuals{};
  AuxMomentTarget target = AuxMomentTarget::kTabulated;
  double moment_target = 0.0;
  int iterations = 0;
};

// q(r) = alpha_U exp(-beta_U r^2) / sqrt(sigma_w^2 / (r + mu)^2 + sigma_delta^2)
double q_density(const ChannelParams& params, const AuxOutputParams& aux, double r);

struct AuxSolveOptions {
  AuxMomentTarget target = AuxMomentTarget::kTabulated;
  double ratio_tol = 1e-8;
  double quad_rel_tol = 1e-12;
  int max_iterations = 200;
};

AuxOutputParams solve_aux_params(const ChannelParams& params, double mu,
                                 const AuxSolveOptions& options = {});

struct InputDistParams {
  int m = 2;
  double alpha_l = 0.0;
  double beta_l = 0.0;
  // {int f - 1, (int |R|^2 f - M E_s) / (M E_s)}
  std::array<double, 2> residuals{};
  int iterations = 0;
  std::string method;  // "quadrature" (M = 2) or "monte-carlo" (M = 3)
  // Monte-Carlo provenance, zero for quadrature solves.
  std::uint64_t seed = 0;
  std::size_t mc_samples = 0;
  std::array<double, 2> rel_std_err{};
};

struct InputSolveOptions {
  double ratio_tol_quadrature = 1e-8;
  double ratio_tol_monte_carlo = 1e-4;
  double quad_rel_tol = 1e-11;
  std::size_t mc_samples = 20'000'000;
  std::uint64_t seed = 0x1f2e3d4c;
  double max_rel_std_err = 1e-3;
  int max_iterations = 200;
};

InputDistParams solve_input_params(const ChannelParams& params, int m,
                                   const InputSolveOptions& options = {});

// Bisection for the root of ratio(beta) = target where ratio is strictly
// decreasing. The bracket starts at [1e-6, 10] and may grow to [1e-9, 1e3];
// monotonicity is checked on a log-spaced grid before bisecting.
struct BetaSolve {
  double beta = 0.0;
  double ratio = 0.0;
  int iterations = 0;
};

BetaSolve solve_decreasing_ratio(const std::function<double(double)>& ratio, double target,
                                 double rel_tol, int max_iterations);

}  // namespace wpn
