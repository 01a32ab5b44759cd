#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "wpn/bounds_upper.hpp"
#include "wpn/quad.hpp"
#include "wpn/rate.hpp"

namespace wpn {

// One [section] of a sweep file:
//
//   [fig1]
//   snr_db = 0, 10, 20, 30, 40
//   sigma_delta_sq = 1e-3
//   bounds = cu, cu_tilde, lb_m2
//
// Keys before the first section header belong to a sweep named "sweep".
struct SweepConfig {
  std::string name = "sweep";
  std::vector<double> snr_db;
  double sigma_delta_sq = 1e-3;
  double es = 1.0;
  bool want_cu = true;
  bool want_cu_tilde = true;
  bool want_lb_m2 = true;
  bool want_lb_m3 = false;
  std::size_t particles = 10'000;
  std::size_t uses = 1'000;
  std::size_t samples = kDefaultEntropySamples;
  std::uint64_t seed = 1;
  std::size_t mc_samples = InputSolveOptions{}.mc_samples;
  AuxMomentTarget moment = AuxMomentTarget::kTabulated;
  unsigned jobs = 1;
};

std::vector<SweepConfig> parse_sweep_config(std::istream& in);
std::vector<SweepConfig> load_sweep_config(const std::filesystem::path& path);

struct RateSummary {
  double bits = 0.0;
  double std_err = 0.0;
};

struct SweepRow {
  double snr_db = 0.0;
  double c_awgn = 0.0;
  std::optional<double> c_lapidoth;
  std::optional<double> c_u;
  std::optional<double> c_u_tilde;
  std::optional<RateSummary> lb_m2;
  std::optional<RateSummary> lb_m3;

  // provenance, JSON only
  std::uint64_t seed = 0;
  std::optional<double> argmax_r;
  std::optional<double> argmin_mu;
  std::optional<AuxOutputParams> aux_at_zero;
  std::optional<InputDistParams> dist_m2;
  std::optional<InputDistParams> dist_m3;
  std::optional<RateEstimate> rate_m2;
  std::optional<RateEstimate> rate_m3;
  std::vector<std::string> notes;  // errors that left a value absent
  double wall_seconds = 0.0;
};

SweepRow run_sweep_row(const SweepConfig& config, double snr_db);

struct SweepRun {
  SweepConfig config;
  std::vector<SweepRow> rows;  // ordered by SNR as listed
  double wall_seconds = 0.0;
};

SweepRun run_sweep(const SweepConfig& config);

extern const char* const kSweepCsvHeader;

void write_csv(std::ostream& out, const std::vector<SweepRow>& rows);
std::vector<SweepRow> parse_csv(std::istream& in);

// Writes <dir>/<name>.csv and <dir>/<name>.json; returns the CSV path.
std::filesystem::path write_sweep_outputs(const SweepRun& run, const std::filesystem::path& dir);

}  // namespace wpn
