#pragma once

#include "wpn/model.hpp"

namespace wpn {

// log2(1 + E_s / (2 sigma_w^2))
double c_awgn(const ChannelParams& params);

// High-SNR asymptote of the Wiener phase-noise channel:
//   (1/2) log2(1 + E_s / (4 sigma_w^2)) - (1/2) log2(e sigma_delta^2 / (2 pi))
double c_lapidoth(const ChannelParams& params);

// SNR (dB) where c_awgn and c_lapidoth intersect, sweeping sigma_w^2 at the
// params' E_s and sigma_delta^2. Searched on [-20, 80] dB.
double crossover_snr_db(const ChannelParams& params);

}  // namespace wpn
