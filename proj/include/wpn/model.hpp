#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

namespace wpn {

// Discrete-time Wiener phase-noise channel y_k = x_k e^{j phi_k} + w_k, with
// w_k ~ CN(0, 2 sigma_w^2) and phi_k = phi_{k-1} + Delta_k, Delta_k ~ N(0, sigma_delta^2).
class ChannelParams {
 public:
  ChannelParams(double sigma_w_sq, double sigma_delta_sq, double es = 1.0);

  // Phase-innovation variance from the oscillator 3 dB linewidth and the
  // symbol period: sigma_delta^2 = 4 pi f_3dB T_s.
  static ChannelParams from_linewidth(double sigma_w_sq, double f3db_hz, double symbol_period_s,
                                      double es = 1.0);

  // Fixes E_s and picks sigma_w^2 so that E_s / (2 sigma_w^2) hits the SNR.
  static ChannelParams from_snr_db(double snr_db, double sigma_delta_sq, double es = 1.0);

  double sigma_w_sq() const noexcept { return sigma_w_sq_; }
  double sigma_delta_sq() const noexcept { return sigma_delta_sq_; }
  double es() const noexcept { return es_; }

  double snr() const noexcept { return es_ / (2.0 * sigma_w_sq_); }

 private:
  double sigma_w_sq_;
  double sigma_delta_sq_;
  double es_;
};

double snr_db(const ChannelParams& params);

struct SymbolBlock {
  std::vector<double> amplitudes;  // R_k >= 0
  std::vector<double> phases;      // Theta_k in [0, 2 pi)

  std::size_t size() const noexcept { return amplitudes.size(); }
  std::complex<double> symbol(std::size_t k) const { return std::polar(amplitudes[k], phases[k]); }
};

struct ReceivedBlock {
  std::vector<double> amplitudes;       // r_k
  std::vector<double> phases;           // theta_k, wrapped to [0, 2 pi)
  std::vector<double> phase_path;       // phi_k, unwrapped
  std::vector<double> inphase_noise;    // w_{k,par}
  std::vector<double> quadrature_noise; // w_{k,perp}

  std::size_t size() const noexcept { return amplitudes.size(); }
  std::complex<double> sample(std::size_t k) const { return std::polar(amplitudes[k], phases[k]); }
};

double wrap_phase(double angle);

// Draws noise and phase path from `seed`. When phi0 is empty the initial
// phase is drawn uniformly on [0, 2 pi) from the same seed.
ReceivedBlock simulate(const ChannelParams& params, const SymbolBlock& input, std::uint64_t seed,
                       std::optional<double> phi0 = std::nullopt);

// Complex-form output x_k e^{j phi_k} + w_k rebuilt from the stored
// noise components; used to cross-check the polar representation.
std::vector<std::complex<double>> complex_output(const SymbolBlock& input,
                                                 const ReceivedBlock& received);

}  // namespace wpn
