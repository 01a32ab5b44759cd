#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "wpn/model.hpp"
#include "wpn/quad.hpp"
#include "wpn/random.hpp"

namespace wpn {

// Conditional-covariance determinant ratio |Sigma_n| / |Sigma_{n-1}| of the
// differenced phase noise given a block of amplitudes.
struct GbEval {
  int m = 0;
  std::vector<double> amplitudes;  // block in time order, R_{n-M+1} ... R_n
  double value = 0.0;
};

// sigma_delta^2 + sigma_w^2 / r_n^2 + sigma_w^2 / r_{n-1}^2
double gb_m2(const ChannelParams& params, double r_n, double r_nm1);

// M = 3 ratio; evaluated without the cancelling subtraction.
double gb_m3(const ChannelParams& params, double r_n, double r_nm1, double r_nm2);

// Dispatch on block length (2 or 3). `block` is in time order so that the
// last entry is R_n.
double gb(const ChannelParams& params, std::span<const double> block);

GbEval evaluate_gb(const ChannelParams& params, std::span<const double> block);

// f(R) = alpha_L g_b(R)^{-M/2} exp(-beta_L |R|^2)
double f_input_density(const ChannelParams& params, const InputDistParams& dist,
                       std::span<const double> block);
double log_f_input_density(const ChannelParams& params, const InputDistParams& dist,
                           std::span<const double> block);

struct SamplerStats {
  std::size_t proposed = 0;
  std::size_t accepted = 0;
  double acceptance_rate() const {
    return proposed == 0 ? 0.0 : static_cast<double>(accepted) / static_cast<double>(proposed);
  }
  // acceptance below 1e-4: the proposal is a poor match for this regime
  bool inefficient() const { return acceptance_rate() < 1e-4; }
};

// Draws n_blocks i.i.d. amplitude blocks from f(R) by rejection against a
// product half-normal proposal (scale 1/sqrt(2 beta_L)) and i.i.d. uniform
// phases. Returns M * n_blocks symbols.
SymbolBlock draw_input_block(const ChannelParams& params, const InputDistParams& dist,
                             std::size_t n_blocks, std::uint64_t seed,
                             SamplerStats* stats = nullptr);

// Amplitudes only; shared by draw_input_block and the rate estimator.
std::vector<double> draw_input_amplitudes(const ChannelParams& params,
                                          const InputDistParams& dist, std::size_t n_blocks,
                                          Rng& rng, SamplerStats* stats = nullptr);

}  // namespace wpn
