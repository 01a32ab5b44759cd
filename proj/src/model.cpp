#include "wpn/model.hpp"

#include <cmath>
#include <numbers>

#include "wpn/error.hpp"
#include "wpn/random.hpp"

namespace wpn {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_finite(double value, const char* name) {
  if (!std::isfinite(value)) {
    throw Error(ErrorCode::InvalidInput, std::string(name) + " must be finite");
  }
}

}  // namespace

ChannelParams::ChannelParams(double sigma_w_sq, double sigma_delta_sq, double es)
    : sigma_w_sq_(sigma_w_sq), sigma_delta_sq_(sigma_delta_sq), es_(es) {
  require_finite(sigma_w_sq, "sigma_w_sq");
  require_finite(sigma_delta_sq, "sigma_delta_sq");
  require_finite(es, "es");
  if (sigma_w_sq <= 0.0) throw Error(ErrorCode::InvalidInput, "sigma_w_sq must be > 0");
  if (sigma_delta_sq < 0.0) throw Error(ErrorCode::InvalidInput, "sigma_delta_sq must be >= 0");
  if (es <= 0.0) throw Error(ErrorCode::InvalidInput, "es must be > 0");
}

ChannelParams ChannelParams::from_linewidth(double sigma_w_sq, double f3db_hz,
                                            double symbol_period_s, double es) {
  return ChannelParams(sigma_w_sq, 4.0 * std::numbers::pi * f3db_hz * symbol_period_s, es);
}

ChannelParams ChannelParams::from_snr_db(double snr_db, double sigma_delta_sq, double es) {
  require_finite(snr_db, "snr_db");
  return ChannelParams(es / (2.0 * std::pow(10.0, snr_db / 10.0)), sigma_delta_sq, es);
}

double snr_db(const ChannelParams& params) { return 10.0 * std::log10(params.snr()); }

double wrap_phase(double angle) {
  double wrapped = std::fmod(angle, kTwoPi);
  if (wrapped < 0.0) wrapped += kTwoPi;
  // fmod of a tiny negative value can round up to exactly 2 pi
  if (wrapped >= kTwoPi) wrapped = 0.0;
  return wrapped;
}

ReceivedBlock simulate(const ChannelParams& params, const SymbolBlock& input, std::uint64_t seed,
                       std::optional<double> phi0) {
  const std::size_t n = input.size();
  if (n == 0) throw Error(ErrorCode::InvalidInput, "input block is empty");
  if (input.phases.size() != n) {
    throw Error(ErrorCode::InvalidInput, "amplitude and phase arrays differ in length");
  }
  if (phi0 && !std::isfinite(*phi0)) throw Error(ErrorCode::InvalidInput, "phi0 must be finite");

  Rng rng = make_rng(seed, 0x5eed);
  NormalSource normal;
  const double start = phi0 ? *phi0 : kTwoPi * uniform01(rng);
  const double sigma_w = std::sqrt(params.sigma_w_sq());
  const double sigma_delta = std::sqrt(params.sigma_delta_sq());

  ReceivedBlock out;
  out.amplitudes.resize(n);
  out.phases.resize(n);
  out.phase_path.resize(n);
  out.inphase_noise.resize(n);
  out.quadrature_noise.resize(n);

  double phi = start;
  for (std::size_t k = 0; k < n; ++k) {
    const double amplitude = input.amplitudes[k];
    if (!(amplitude >= 0.0) || !std::isfinite(amplitude)) {
      throw Error(ErrorCode::InvalidInput, "amplitudes must be finite and nonnegative");
    }
    phi += sigma_delta * normal(rng);
    const double w_par = sigma_w * normal(rng);
    const double w_perp = sigma_w * normal(rng);
    const double along = amplitude + w_par;
    out.amplitudes[k] = std::hypot(along, w_perp);
    out.phases[k] = wrap_phase(input.phases[k] + std::atan2(w_perp, along) + phi);
    out.phase_path[k] = phi;
    out.inphase_noise[k] = w_par;
    out.quadrature_noise[k] = w_perp;
  }
  return out;
}

std::vector<std::complex<double>> complex_output(const SymbolBlock& input,
                                                 const ReceivedBlock& received) {
  std::vector<std::complex<double>> y(input.size());
  for (std::size_t k = 0; k < y.size(); ++k) {
    const auto rotation = std::polar(1.0, input.phases[k] + received.phase_path[k]);
    const std::complex<double> noise(received.inphase_noise[k], received.quadrature_noise[k]);
    y[k] = input.symbol(k) * std::polar(1.0, received.phase_path[k]) + noise * rotation;
  }
  return y;
}

}  // namespace wpn
