#include "wpn/refs.hpp"

#include <cmath>
#include <numbers>

#include "wpn/error.hpp"

namespace wpn {

double c_awgn(const ChannelParams& params) { return std::log2(1.0 + params.snr()); }

double c_lapidoth(const ChannelParams& params) {
  if (!(params.sigma_delta_sq() > 0.0)) {
    throw Error(ErrorCode::DomainError, "phase-noise asymptote needs sigma_delta^2 > 0");
  }
  return 0.5 * std::log2(1.0 + params.es() / (4.0 * params.sigma_w_sq())) -
         0.5 * std::log2(std::numbers::e * params.sigma_delta_sq() / (2.0 * std::numbers::pi));
}

double crossover_snr_db(const ChannelParams& params) {
  const double sd = params.sigma_delta_sq();
  if (!(sd > 0.0 && sd < 1.0)) throw Error(ErrorCode::DomainError, "sigma_delta^2 must lie in (0, 1)");
  auto gap = [&](double snr) {
    const ChannelParams p = ChannelParams::from_snr_db(snr, sd, params.es());
    return c_awgn(p) - c_lapidoth(p);
  };
  double lo = -20.0, hi = 80.0;
  double g_lo = gap(lo);
  const double g_hi = gap(hi);
  if (g_lo * g_hi > 0.0) throw Error(ErrorCode::NoCrossover, "no sign change on [-20, 80] dB");
  for (int it = 0; it < 200 && hi - lo > 1e-9; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double g = gap(mid);
    if ((g < 0.0) == (g_lo < 0.0)) {
      lo = mid;
      g_lo = g;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace wpn
