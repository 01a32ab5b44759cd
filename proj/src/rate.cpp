#include "wpn/rate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "wpn/error.hpp"
#include "wpn/sampler.hpp"
#include "wpn/special.hpp"

namespace wpn {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
// exp() underflows below this; a cloud whose best emission is smaller has
// lost track of the phase.
constexpr double kCollapseLogEmission = -708.0;

double log_sum_exp(std::span<const double> v) {
  const double m = *std::max_element(v.begin(), v.end());
  if (!std::isfinite(m)) return m;
  double acc = 0.0;
  for (double x : v) acc += std::exp(x - m);
  return m + std::log(acc);
}

class OptimizedLaw final : public InputLaw {
 public:
  OptimizedLaw(const ChannelParams& params, const InputDistParams& dist) : params_(params), dist_(dist) {
    if (dist.m != 2 && dist.m != 3) throw Error(ErrorCode::InvalidInput, "block length must be 2 or 3");
  }
  int block_size() const override { return dist_.m; }
  double log_density(std::span<const double> block) const override {
    return log_f_input_density(params_, dist_, block);
  }
  void sample(Rng& rng, std::span<double> block) const override {
    const std::vector<double> r = draw_input_amplitudes(params_, dist_, 1, rng);
    std::copy(r.begin(), r.end(), block.begin());
  }
  double broad_scale() const override { return 1.0 / std::sqrt(2.0 * dist_.beta_l); }
  std::string label() const override { return "optimized-m" + std::to_string(dist_.m); }

 private:
  ChannelParams params_;
  InputDistParams dist_;
};

class GaussianLaw final : public InputLaw {
 public:
  explicit GaussianLaw(double es) : es_(es) {
    if (!(es > 0.0)) throw Error(ErrorCode::InvalidInput, "E_s must be > 0");
  }
  int block_size() const override { return 1; }
  double log_density(std::span<const double> block) const override {
    const double r = block[0];
    if (!(r > 0.0)) return -std::numeric_limits<double>::infinity();
    return std::log(2.0 * r / es_) - r * r / es_;
  }
  void sample(Rng& rng, std::span<double> block) const override {
    double u = 0.0;
    do {
      u = uniform01(rng);
    } while (u <= 0.0);
    block[0] = std::sqrt(-es_ * std::log(u));
  }
  double broad_scale() const override { return std::sqrt(es_); }
  std::string label() const override { return "gaussian"; }

 private:
  double es_;
};

class GammaLaw final : public InputLaw {
 public:
  explicit GammaLaw(double es) : es_(es) {
    if (!(es > 0.0)) throw Error(ErrorCode::InvalidInput, "E_s must be > 0");
  }
  int block_size() const override { return 1; }
  double log_density(std::span<const double> block) const override {
    const double r = block[0];
    if (!(r >= 0.0)) return -std::numeric_limits<double>::infinity();
    return 0.5 * std::log(2.0 / (std::numbers::pi * es_)) - r * r / (2.0 * es_);
  }
  void sample(Rng& rng, std::span<double> block) const override {
    NormalSource normal;
    block[0] = std::abs(normal(rng)) * std::sqrt(es_);
  }
  double broad_scale() const override { return 1.25 * std::sqrt(es_); }
  std::string label() const override { return "gamma"; }

 private:
  double es_;
};

void systematic_resample(ParticleCloud& cloud, Rng& rng) {
  const std::size_t n = cloud.size();
  const double step = 1.0 / static_cast<double>(n);
  double u = uniform01(rng) * step;
  double cum = 0.0;
  std::vector<double> phases(n);
  std::vector<double> amps(cloud.amplitudes.empty() ? 0 : n);
  std::size_t src = 0;
  for (std::size_t i = 0; i < n; ++i, u += step) {
    while (src + 1 < n && cum + std::exp(cloud.log_weights[src]) < u) {
      cum += std::exp(cloud.log_weights[src]);
      ++src;
    }
    phases[i] = cloud.phases[src];
    if (!amps.empty()) amps[i] = cloud.amplitudes[src];
  }
  cloud.phases = std::move(phases);
  if (!amps.empty()) cloud.amplitudes = std::move(amps);
  std::fill(cloud.log_weights.begin(), cloud.log_weights.end(), -std::log(static_cast<double>(n)));
  cloud.ess = static_cast<double>(n);
}

}  // namespace

std::unique_ptr<InputLaw> optimized_input_law(const ChannelParams& params, const InputDistParams& dist) {
  return std::make_unique<OptimizedLaw>(params, dist);
}

std::unique_ptr<InputLaw> gaussian_input_law(double es) { return std::make_unique<GaussianLaw>(es); }

std::unique_ptr<InputLaw> gamma_input_law(double es) { return std::make_unique<GammaLaw>(es); }

ParticleCloud ParticleCloud::uniform(std::size_t n, Rng& rng) {
  if (n == 0) throw Error(ErrorCode::InvalidInput, "cloud needs at least one particle");
  ParticleCloud c;
  c.phases.resize(n);
  for (double& p : c.phases) p = kTwoPi * uniform01(rng);
  c.log_weights.assign(n, -std::log(static_cast<double>(n)));
  c.ess = static_cast<double>(n);
  return c;
}

ParticleCloud ParticleCloud::at(std::size_t n, double phase) {
  if (n == 0) throw Error(ErrorCode::InvalidInput, "cloud needs at least one particle");
  ParticleCloud c;
  c.phases.assign(n, phase);
  c.log_weights.assign(n, -std::log(static_cast<double>(n)));
  c.ess = static_cast<double>(n);
  return c;
}

StepResult log_pred_density(ParticleCloud& cloud, std::complex<double> y,
                            std::optional<std::complex<double>> x, const ChannelParams& params,
                            Rng& rng) {
  const std::size_t n = cloud.size();
  if (n == 0 || cloud.log_weights.size() != n) throw Error(ErrorCode::InvalidInput, "malformed particle cloud");
  if (!x && cloud.amplitudes.size() != n) {
    throw Error(ErrorCode::InvalidInput, "unknown input needs per-particle amplitudes");
  }
  const double sw = params.sigma_w_sq();
  const double sd = std::sqrt(params.sigma_delta_sq());

  if (sd > 0.0) {
    NormalSource normal;
    for (double& p : cloud.phases) p += sd * normal(rng);
  }

  const double log_norm = -std::log(kTwoPi * sw);
  std::vector<double> emission(n);
  auto weigh = [&] {
    if (x) {
      const std::complex<double> c = y * std::conj(*x);
      const double base = std::norm(y) + std::norm(*x);
      const double mag = std::abs(c);
      const double arg = std::arg(c);
      for (std::size_t i = 0; i < n; ++i) {
        emission[i] = log_norm - (base - 2.0 * mag * std::cos(arg - cloud.phases[i])) / (2.0 * sw);
      }
    } else {
      const double ya = std::abs(y);
      for (std::size_t i = 0; i < n; ++i) {
        emission[i] = log_phase_averaged_emission(ya, cloud.amplitudes[i], sw);
      }
    }
  };
  weigh();

  StepResult out;
  if (*std::max_element(emission.begin(), emission.end()) < kCollapseLogEmission) {
    // re-anchor: forget the phase history and restart from a uniform cloud
    out.collapsed = true;
    for (double& p : cloud.phases) p = kTwoPi * uniform01(rng);
    std::fill(cloud.log_weights.begin(), cloud.log_weights.end(), -std::log(static_cast<double>(n)));
    weigh();
  }

  for (std::size_t i = 0; i < n; ++i) emission[i] += cloud.log_weights[i];
  const double lse = log_sum_exp(emission);
  if (!std::isfinite(lse)) throw Error(ErrorCode::WeightCollapse, "particle weights vanished");
  double sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    cloud.log_weights[i] = emission[i] - lse;
    sq += std::exp(2.0 * cloud.log_weights[i]);
  }
  cloud.ess = 1.0 / sq;
  if (cloud.ess < 0.5 * static_cast<double>(n)) {
    systematic_resample(cloud, rng);
    out.resampled = true;
  }
  out.log2_density = lse / std::numbers::ln2;
  return out;
}

std::vector<double> conditional_log_densities(const ChannelParams& params, const SymbolBlock& input,
                                              const ReceivedBlock& output, std::size_t n_particles,
                                              std::uint64_t seed, std::optional<double> initial_phase,
                                              std::size_t* collapses, std::size_t* resamples) {
  if (input.size() != output.size()) throw Error(ErrorCode::InvalidInput, "input/output length mismatch");
  if (n_particles == 0) throw Error(ErrorCode::InvalidInput, "need at least one particle");
  Rng rng = make_rng(seed, 0xc0d);
  ParticleCloud cloud = initial_phase ? ParticleCloud::at(n_particles, *initial_phase)
                                      : ParticleCloud::uniform(n_particles, rng);
  std::vector<double> out(input.size());
  std::size_t n_collapse = 0, n_resample = 0;
  for (std::size_t k = 0; k < input.size(); ++k) {
    const StepResult step = log_pred_density(cloud, output.sample(k), input.symbol(k), params, rng);
    out[k] = step.log2_density * std::numbers::ln2;
    n_collapse += step.collapsed;
    n_resample += step.resampled;
  }
  if (collapses) *collapses = n_collapse;
  if (resamples) *resamples = n_resample;
  return out;
}

std::vector<double> marginal_log_densities(const ChannelParams& params, const InputLaw& law,
                                           const ReceivedBlock& output, std::size_t n_samples,
                                           std::uint64_t seed) {
  const auto m = static_cast<std::size_t>(law.block_size());
  if (output.size() % m != 0) throw Error(ErrorCode::InvalidInput, "output length is not a whole number of blocks");
  if (n_samples == 0) throw Error(ErrorCode::InvalidInput, "need at least one importance sample");
  const double sw = params.sigma_w_sq();
  const double broad = law.broad_scale();
  // narrow component: amplitude near |y|, slightly wider than the noise
  const double tau = 1.25 * std::sqrt(sw);
  const double log_broad_norm = std::log(2.0 / (broad * std::sqrt(kTwoPi)));
  const double log_tau_norm = -0.5 * std::log(kTwoPi * tau * tau);

  Rng rng = make_rng(seed, 0x3a7);
  NormalSource normal;
  std::vector<double> z(m), log_w(n_samples), log_trunc(m);
  std::vector<double> out(output.size() / m);
  for (std::size_t b = 0; b < out.size(); ++b) {
    const double* yy = output.amplitudes.data() + b * m;
    for (std::size_t j = 0; j < m; ++j) {
      log_trunc[j] = std::log(0.5 * std::erfc(-yy[j] / (tau * std::numbers::sqrt2)));
    }
    for (std::size_t i = 0; i < n_samples; ++i) {
      const bool use_broad = uniform01(rng) < 0.5;
      double lq_broad = 0.0, lq_narrow = 0.0, log_emit = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        if (use_broad) {
          do {
            z[j] = broad * std::abs(normal(rng));
          } while (z[j] <= 0.0);
        } else {
          do {
            z[j] = yy[j] + tau * normal(rng);
          } while (z[j] <= 0.0);
        }
        lq_broad += log_broad_norm - z[j] * z[j] / (2.0 * broad * broad);
        const double d = z[j] - yy[j];
        lq_narrow += log_tau_norm - d * d / (2.0 * tau * tau) - log_trunc[j];
        log_emit += log_phase_averaged_emission(yy[j], z[j], sw);
      }
      const double hi = std::max(lq_broad, lq_narrow);
      const double lq = std::log(0.5) + hi + std::log1p(std::exp(std::min(lq_broad, lq_narrow) - hi));
      log_w[i] = law.log_density(z) + log_emit - lq;
    }
    out[b] = log_sum_exp(log_w) - std::log(static_cast<double>(n_samples));
  }
  return out;
}

RateEstimate estimate_rate(const ChannelParams& params, const InputLaw& law, std::size_t n_uses,
                           std::size_t n_particles, std::uint64_t seed, const RateOptions& options) {
  if (n_uses == 0) throw Error(ErrorCode::InvalidInput, "need at least one channel use");
  if (n_particles < 2) throw Error(ErrorCode::InvalidInput, "need at least two particles");
  if (options.segment_length == 0) throw Error(ErrorCode::InvalidInput, "segment length must be positive");
  const auto m = static_cast<std::size_t>(law.block_size());
  const std::size_t n_blocks = (n_uses + m - 1) / m;
  const std::size_t n = n_blocks * m;

  SymbolBlock input;
  input.amplitudes.resize(n);
  input.phases.resize(n);
  Rng input_rng = make_rng(seed, 1);
  for (std::size_t b = 0; b < n_blocks; ++b) {
    law.sample(input_rng, std::span<double>(input.amplitudes.data() + b * m, m));
  }
  for (double& t : input.phases) t = kTwoPi * uniform01(input_rng);
  const ReceivedBlock output = simulate(params, input, derive_seed(seed, 2), options.initial_phase);

  RateEstimate est;
  est.n_uses = n;
  est.n_particles = n_particles;
  est.input_label = law.label();
  est.seed = seed;

  const std::vector<double> cond = conditional_log_densities(
      params, input, output, n_particles, derive_seed(seed, 3), options.initial_phase, &est.collapses,
      &est.resamples);
  const std::vector<double> marg = marginal_log_densities(
      params, law, output, options.marginal_samples ? options.marginal_samples : n_particles,
      derive_seed(seed, 4));

  std::vector<double> per_use(n);
  double sum_c = 0.0, sum_m = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double mk = marg[k / m] / static_cast<double>(m);
    per_use[k] = (cond[k] - mk) / std::numbers::ln2;
    sum_c += cond[k];
    sum_m += mk;
  }
  const double nn = static_cast<double>(n);
  est.conditional_bits = sum_c / nn / std::numbers::ln2;
  est.marginal_bits = sum_m / nn / std::numbers::ln2;
  est.bits_per_use = est.conditional_bits - est.marginal_bits;

  // block bootstrap over consecutive segments
  std::size_t len = options.segment_length;
  if (n / len < 2) len = 1;
  const std::size_t n_seg = n / len;
  std::vector<double> seg(n_seg, 0.0);
  for (std::size_t s = 0; s < n_seg; ++s) {
    for (std::size_t k = s * len; k < (s + 1) * len; ++k) seg[s] += per_use[k];
    seg[s] /= static_cast<double>(len);
  }
  Rng boot = make_rng(seed, 5);
  double s1 = 0.0, s2 = 0.0;
  const std::size_t reps = std::max<std::size_t>(2, options.bootstrap_resamples);
  for (std::size_t r = 0; r < reps; ++r) {
    double mean = 0.0;
    for (std::size_t s = 0; s < n_seg; ++s) {
      mean += seg[std::min(n_seg - 1, static_cast<std::size_t>(uniform01(boot) * static_cast<double>(n_seg)))];
    }
    mean /= static_cast<double>(n_seg);
    s1 += mean;
    s2 += mean * mean;
  }
  const double rr = static_cast<double>(reps);
  est.std_err = std::sqrt(std::max(0.0, (s2 - s1 * s1 / rr) / (rr - 1.0)));
  est.unreliable = static_cast<double>(est.collapses) > 0.01 * nn;
  return est;
}

}  // namespace wpn
