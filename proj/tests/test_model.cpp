#include "doctest.h"

#include <cmath>
#include <limits>
#include <numbers>

#include "support.hpp"
#include "wpn/error.hpp"
#include "wpn/model.hpp"
#include "wpn/random.hpp"

using namespace wpn;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

SymbolBlock unit_block(std::size_t n) {
  SymbolBlock b;
  b.amplitudes.assign(n, 1.0);
  b.phases.assign(n, 0.0);
  return b;
}

SymbolBlock random_block(std::size_t n, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  NormalSource normal;
  SymbolBlock b;
  for (std::size_t i = 0; i < n; ++i) {
    b.amplitudes.push_back(std::hypot(normal(rng), normal(rng)) / std::numbers::sqrt2);
    b.phases.push_back(kTwoPi * uniform01(rng));
  }
  return b;
}

double circular_gap(double a, double b) {
  const double d = std::fmod(std::abs(a - b), kTwoPi);
  return std::min(d, kTwoPi - d);
}

}  // namespace

TEST_CASE("snr in dB") {
  CHECK(snr_db(ChannelParams(0.5, 1e-3, 1.0)) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(snr_db(ChannelParams(5e-3, 1e-3, 1.0)) == doctest::Approx(20.0).epsilon(1e-12));
  CHECK(snr_db(ChannelParams(5e-6, 1e-3, 1.0)) == doctest::Approx(50.0).epsilon(1e-12));
  CHECK(ChannelParams::from_snr_db(30.0, 1e-3).sigma_w_sq() == doctest::Approx(5e-4).epsilon(1e-12));
}

TEST_CASE("linewidth conversion") {
  const auto p = ChannelParams::from_linewidth(5e-3, 100e3, 1e-9);
  CHECK(p.sigma_delta_sq() == doctest::Approx(4.0 * std::numbers::pi * 100e3 * 1e-9).epsilon(1e-14));
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(ChannelParams(0.0, 1e-3), Error);
  CHECK_THROWS_AS(ChannelParams(1e-3, -1.0), Error);
  CHECK_THROWS_AS(ChannelParams(1e-3, 1e-3, 0.0), Error);
  CHECK_THROWS_AS(ChannelParams(std::numeric_limits<double>::quiet_NaN(), 1e-3), Error);
  CHECK_THROWS_AS(ChannelParams(1e-3, std::numeric_limits<double>::infinity()), Error);
  try {
    ChannelParams(-1.0, 1e-3);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidInput);
  }
}

TEST_CASE("noise-free identity") {
  const ChannelParams p(1e-300, 0.0);
  const auto out = simulate(p, unit_block(1), 7, 0.0);
  CHECK(out.amplitudes[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(circular_gap(out.phases[0], 0.0) < 1e-12);
}

TEST_CASE("zero innovation keeps the phase constant") {
  const ChannelParams p(5e-3, 0.0);
  const auto out = simulate(p, unit_block(1000), 11, 0.7);
  for (double phi : out.phase_path) CHECK(phi == 0.7);
}

TEST_CASE("phase increments have the innovation variance") {
  const ChannelParams p(5e-3, 1e-3);
  const std::size_t n = 100'000;
  const auto out = simulate(p, unit_block(n), 3, 0.0);
  std::vector<double> inc;
  double prev = 0.0;
  for (double phi : out.phase_path) {
    inc.push_back(phi - prev);
    prev = phi;
  }
  const double var = testing::variance(inc);
  const double se = 1e-3 * std::sqrt(2.0 / static_cast<double>(n - 1));
  CHECK(std::abs(var - 1e-3) < 3.0 * se);
}

TEST_CASE("polar and complex forms agree") {
  const ChannelParams p(5e-2, 1e-2);
  const auto in = random_block(20'000, 5);
  const auto out = simulate(p, in, 9);
  const auto y = complex_output(in, out);
  for (std::size_t k = 0; k < in.size(); ++k) {
    CHECK(std::abs(y[k]) == doctest::Approx(out.amplitudes[k]).epsilon(1e-10));
    CHECK(circular_gap(std::arg(y[k]), out.phases[k]) < 1e-10);
    const double rebuilt = std::hypot(in.amplitudes[k] + out.inphase_noise[k], out.quadrature_noise[k]);
    CHECK(rebuilt == out.amplitudes[k]);
    const double n_k = std::atan2(out.quadrature_noise[k], in.amplitudes[k] + out.inphase_noise[k]);
    CHECK(circular_gap(out.phases[k] - in.phases[k] - out.phase_path[k], n_k) < 1e-9);
    CHECK(out.phases[k] >= 0.0);
    CHECK(out.phases[k] < kTwoPi);
  }
}

TEST_CASE("uniform input phases give uniform output phases") {
  const ChannelParams p(5e-3, 1e-3);
  const std::size_t n = 100'000;
  const auto out = simulate(p, random_block(n, 21), 22);
  CHECK(testing::ks_uniform(out.phases, kTwoPi) < testing::ks_critical_1pct(n));
}

TEST_CASE("same seed, same output") {
  const ChannelParams p(5e-3, 1e-3);
  const auto in = random_block(500, 2);
  const auto a = simulate(p, in, 42, 0.3);
  const auto b = simulate(p, in, 42, 0.3);
  CHECK(a.amplitudes == b.amplitudes);
  CHECK(a.phases == b.phases);
  CHECK(a.phase_path == b.phase_path);
  CHECK(a.inphase_noise == b.inphase_noise);
  CHECK(a.quadrature_noise == b.quadrature_noise);
  const auto c = simulate(p, in, 43, 0.3);
  CHECK(a.amplitudes != c.amplitudes);
}

TEST_CASE("simulate rejects bad input") {
  const ChannelParams p(5e-3, 1e-3);
  CHECK_THROWS_AS(simulate(p, SymbolBlock{}, 1), Error);
  CHECK_THROWS_AS(simulate(p, unit_block(3), 1, std::numeric_limits<double>::infinity()), Error);
  SymbolBlock bad = unit_block(3);
  bad.amplitudes[1] = -1.0;
  CHECK_THROWS_AS(simulate(p, bad, 1), Error);
  bad = unit_block(3);
  bad.phases.pop_back();
  CHECK_THROWS_AS(simulate(p, bad, 1), Error);
}
