#include "wpn/sampler.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "wpn/error.hpp"

namespace wpn {

namespace {

void require_positive(double r) {
  if (!(r > 0.0) || !std::isfinite(r)) {
    throw Error(ErrorCode::DomainError, "amplitudes must be positive and finite");
  }
}

}  // namespace

double gb_m2(const ChannelParams& params, double r_n, double r_nm1) {
  require_positive(r_n);
  require_positive(r_nm1);
  const double sw = params.sigma_w_sq();
  // grouped so swapping the amplitudes is bitwise symmetric
  return params.sigma_delta_sq() + (sw / (r_n * r_n) + sw / (r_nm1 * r_nm1));
}

double gb_m3(const ChannelParams& params, double r_n, double r_nm1, double r_nm2) {
  require_positive(r_n);
  require_positive(r_nm1);
  require_positive(r_nm2);
  const double sd = params.sigma_delta_sq();
  const double sw = params.sigma_w_sq();
  const double a = sw / (r_n * r_n);
  const double b = sw / (r_nm1 * r_nm1);
  const double c = sw / (r_nm2 * r_nm2);
  // sd + a + b - b^2 / (sd + b + c), rearranged
  return sd + a + b * (sd + c) / (sd + b + c);
}

double gb(const ChannelParams& params, std::span<const double> block) {
  switch (block.size()) {
    case 2: return gb_m2(params, block[1], block[0]);
    case 3: return gb_m3(params, block[2], block[1], block[0]);
    default: throw Error(ErrorCode::InvalidInput, "block length must be 2 or 3");
  }
}

GbEval evaluate_gb(const ChannelParams& params, std::span<const double> block) {
  GbEval eval;
  eval.m = static_cast<int>(block.size());
  eval.amplitudes.assign(block.begin(), block.end());
  eval.value = gb(params, block);
  return eval;
}

double log_f_input_density(const ChannelParams& params, const InputDistParams& dist,
                           std::span<const double> block) {
  if (static_cast<int>(block.size()) != dist.m) {
    throw Error(ErrorCode::InvalidInput, "block length does not match the distribution");
  }
  double norm_sq = 0.0;
  for (double r : block) norm_sq += r * r;
  const double g = gb(params, block);
  return std::log(dist.alpha_l) - 0.5 * dist.m * std::log(g) - dist.beta_l * norm_sq;
}

double f_input_density(const ChannelParams& params, const InputDistParams& dist,
                       std::span<const double> block) {
  return std::exp(log_f_input_density(params, dist, block));
}

std::vector<double> draw_input_amplitudes(const ChannelParams& params,
                                          const InputDistParams& dist, std::size_t n_blocks,
                                          Rng& rng, SamplerStats* stats) {
  if (n_blocks == 0) throw Error(ErrorCode::InvalidInput, "n_blocks must be >= 1");
  if (dist.m != 2 && dist.m != 3) throw Error(ErrorCode::InvalidInput, "M must be 2 or 3");
  if (!(params.sigma_delta_sq() > 0.0)) {
    throw Error(ErrorCode::DomainError, "rejection envelope needs sigma_delta^2 > 0");
  }
  if (!(dist.beta_l > 0.0)) throw Error(ErrorCode::InvalidInput, "beta_L must be positive");

  const std::size_t m = static_cast<std::size_t>(dist.m);
  const double scale = 1.0 / std::sqrt(2.0 * dist.beta_l);
  const double sd = params.sigma_delta_sq();
  const double half_m = 0.5 * static_cast<double>(m);

  NormalSource normal;
  SamplerStats local;
  std::vector<double> out;
  out.reserve(m * n_blocks);
  std::array<double, 3> block{};
  while (out.size() < m * n_blocks) {
    ++local.proposed;
    bool zero = false;
    for (std::size_t i = 0; i < m; ++i) {
      block[i] = std::abs(normal(rng)) * scale;
      zero = zero || block[i] == 0.0;
    }
    const double u = uniform01(rng);
    if (zero) continue;
    // target / (envelope * proposal) = (sigma_delta^2 / g_b)^{M/2} <= 1
    const double ratio = std::pow(sd / gb(params, std::span<const double>(block.data(), m)), half_m);
    if (ratio > 1.0 + 1e-12) {
      throw Error(ErrorCode::EnvelopeError, "g_b fell below sigma_delta^2");
    }
    if (u < ratio) {
      ++local.accepted;
      out.insert(out.end(), block.begin(), block.begin() + static_cast<std::ptrdiff_t>(m));
    }
  }
  if (stats) *stats = local;
  return out;
}

SymbolBlock draw_input_block(const ChannelParams& params, const InputDistParams& dist,
                             std::size_t n_blocks, std::uint64_t seed, SamplerStats* stats) {
  Rng rng = make_rng(seed, 0xb10c);
  SymbolBlock out;
  out.amplitudes = draw_input_amplitudes(params, dist, n_blocks, rng, stats);
  out.phases.resize(out.amplitudes.size());
  for (double& phase : out.phases) phase = 2.0 * std::numbers::pi * uniform01(rng);
  return out;
}

}  // namespace wpn
