#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wpn/model.hpp"
#include "wpn/quad.hpp"
#include "wpn/random.hpp"

namespace wpn {

// Amplitude law of a block-independent, circularly symmetric input. Blocks of
// block_size() amplitudes are i.i.d.; phases are i.i.d. uniform.
class InputLaw {
 public:
  virtual ~InputLaw() = default;
  virtual int block_size() const = 0;
  virtual double log_density(std::span<const double> block) const = 0;
  virtual void sample(Rng& rng, std::span<double> block) const = 0;
  // Per-coordinate half-normal scale covering the bulk of the law.
  virtual double broad_scale() const = 0;
  virtual std::string label() const = 0;
};

// The optimized block law f(R) for M = 2 or 3.
std::unique_ptr<InputLaw> optimized_input_law(const ChannelParams& params, const InputDistParams& dist);
// Circularly symmetric complex Gaussian with E|x|^2 = E_s (Rayleigh amplitude).
std::unique_ptr<InputLaw> gaussian_input_law(double es);
// Half-normal amplitude, i.e. |x|^2 Gamma(1/2)-distributed, E|x|^2 = E_s.
std::unique_ptr<InputLaw> gamma_input_law(double es);

struct ParticleCloud {
  std::vector<double> phases;
  std::vector<double> log_weights;  // normalized: logsumexp = 0
  double ess = 0.0;
  // Optional per-particle amplitude hypotheses, used when x_k is unknown.
  std::vector<double> amplitudes;

  std::size_t size() const noexcept { return phases.size(); }
  static ParticleCloud uniform(std::size_t n, Rng& rng);
  static ParticleCloud at(std::size_t n, double phase);
};

struct StepResult {
  double log2_density = 0.0;
  bool collapsed = false;
  bool resampled = false;
};

// One forward step: propagate phases by N(0, sigma_delta^2), weigh by the
// emission of y_k, return log2 of the predictive density, and resample
// systematically when ess < P / 2. With x_k absent, each particle's attached
// amplitude is used with the phase-averaged emission.
StepResult log_pred_density(ParticleCloud& cloud, std::complex<double> y,
                            std::optional<std::complex<double>> x, const ChannelParams& params,
                            Rng& rng);

struct RateOptions {
  // Known initial phase phi_0; the channel draws it uniformly otherwise and
  // the receiver starts from a uniform cloud.
  std::optional<double> initial_phase;
  std::size_t segment_length = 100;
  std::size_t bootstrap_resamples = 1000;
  // Importance samples per block in the marginal pass; 0 means n_particles.
  std::size_t marginal_samples = 0;
};

struct RateEstimate {
  double bits_per_use = 0.0;
  double std_err = 0.0;
  std::size_t n_uses = 0;
  std::size_t n_particles = 0;
  std::string input_label;
  std::uint64_t seed = 0;
  double conditional_bits = 0.0;  // (1/n) log2 f(y^n | x^n)
  double marginal_bits = 0.0;     // (1/n) log2 f(y^n)
  std::size_t collapses = 0;
  std::size_t resamples = 0;
  bool unreliable = false;
};

// Conditional pass alone: per-use log (natural) predictive densities
// log f(y_k | y^{k-1}, x^k) from a particle filter over the phase.
std::vector<double> conditional_log_densities(const ChannelParams& params, const SymbolBlock& input,
                                              const ReceivedBlock& output, std::size_t n_particles,
                                              std::uint64_t seed, std::optional<double> initial_phase,
                                              std::size_t* collapses = nullptr,
                                              std::size_t* resamples = nullptr);

// Marginal pass: per-block log f(y_block), by importance sampling over the
// block amplitudes with the input phase integrated out analytically.
std::vector<double> marginal_log_densities(const ChannelParams& params, const InputLaw& law,
                                           const ReceivedBlock& output, std::size_t n_samples,
                                           std::uint64_t seed);

// n_uses is rounded up to a multiple of the block length.
RateEstimate estimate_rate(const ChannelParams& params, const InputLaw& law, std::size_t n_uses,
                           std::size_t n_particles, std::uint64_t seed,
                           const RateOptions& options = {});

}  // namespace wpn
