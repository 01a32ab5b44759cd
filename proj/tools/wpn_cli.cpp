// Command-line front end: parameter solvers, bounds, sampling and sweeps.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "wpn/bounds_upper.hpp"
#include "wpn/error.hpp"
#include "wpn/quad.hpp"
#include "wpn/rate.hpp"
#include "wpn/refs.hpp"
#include "wpn/sampler.hpp"
#include "wpn/serialize.hpp"
#include "wpn/sweep.hpp"

namespace {

using namespace wpn;

constexpr int kModuleError = 1;
constexpr int kConfigError = 2;

// Raised for bad flag combinations; maps to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::optional<double> sigma_w_sq;
  std::optional<double> snr_db;
  double sigma_delta_sq = 1e-3;
  double es = 1.0;
  std::uint64_t seed = 1;
  std::string out;
  std::string format = "json";

  ChannelParams params() const {
    if (sigma_w_sq && snr_db) throw ConfigError("give either --sigma-w-sq or --snr-db, not both");
    if (!sigma_w_sq && !snr_db) throw ConfigError("one of --sigma-w-sq or --snr-db is required");
    try {
      return sigma_w_sq ? ChannelParams(*sigma_w_sq, sigma_delta_sq, es)
                        : ChannelParams::from_snr_db(*snr_db, sigma_delta_sq, es);
    } catch (const Error& e) {
      throw ConfigError(e.what());
    }
  }
};

void add_channel_flags(CLI::App* cmd, Common& c, bool need_noise = true) {
  if (need_noise) {
    cmd->add_option("--sigma-w-sq", c.sigma_w_sq, "per-component noise variance");
    cmd->add_option("--snr-db", c.snr_db, "SNR E_s/(2 sigma_w^2) in dB");
  }
  cmd->add_option("--sigma-delta-sq", c.sigma_delta_sq, "phase innovation variance (rad^2)")->capture_default_str();
  cmd->add_option("--es", c.es, "average symbol power")->capture_default_str();
}

void add_output_flags(CLI::App* cmd, Common& c) {
  cmd->add_option("--out", c.out, "output file (stdout if omitted)");
  cmd->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
}

void emit(const Common& c, const std::string& text) {
  if (c.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(c.out);
  if (!f) throw ConfigError("cannot write " + c.out);
  f << text;
}

std::string csv(const std::vector<std::pair<std::string, double>>& fields) {
  std::string head, row;
  char buf[32];
  for (const auto& [k, v] : fields) {
    head += (head.empty() ? "" : ",") + k;
    std::snprintf(buf, sizeof buf, "%.9g", v);
    row += (row.empty() ? "" : ",") + std::string(buf);
  }
  return head + "\n" + row + "\n";
}

std::string as_json(const json& j) { return j.dump(2) + "\n"; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Capacity bounds for the AWGN channel with Wiener phase noise"};
  app.require_subcommand(1);
  Common c;

  double mu = 0.0;
  std::string moment = "tabulated";
  int m = 2;
  std::size_t particles = 10'000, uses = 1'000, samples = kDefaultEntropySamples, blocks = 1'000;
  std::optional<std::size_t> mc_samples;
  std::vector<double> mu_grid;
  std::string input = "optimized";
  std::string config_path;
  std::vector<double> sweep_snr;

  auto* solve_aux = app.add_subcommand("solve-aux", "solve alpha_U, beta_U of the auxiliary output density");
  add_channel_flags(solve_aux, c);
  add_output_flags(solve_aux, c);
  solve_aux->add_option("--mu", mu, "offset mu >= 0")->capture_default_str();
  solve_aux->add_option("--moment", moment, "second-moment target: tabulated (E_s+sigma_w^2) or received (E_s+2 sigma_w^2)")
      ->check(CLI::IsMember({"tabulated", "received"}))->capture_default_str();

  auto* solve_input = app.add_subcommand("solve-input", "solve alpha_L, beta_L of the block input density");
  add_channel_flags(solve_input, c);
  add_output_flags(solve_input, c);
  solve_input->add_option("--m", m, "block length (2 or 3)")->check(CLI::IsMember({2, 3}))->capture_default_str();
  solve_input->add_option("--samples", mc_samples, "Monte-Carlo samples for M = 3");
  solve_input->add_option("--seed", c.seed, "Monte-Carlo seed");

  auto* upper = app.add_subcommand("upper-bound", "Monte-Carlo upper bound C_U and closed form");
  add_channel_flags(upper, c);
  add_output_flags(upper, c);
  upper->add_option("--samples", samples, "entropy samples per R")->capture_default_str();
  upper->add_option("--seed", c.seed)->capture_default_str();
  upper->add_option("--mu", mu_grid, "mu grid (default 0, .05, .1, .5, 1 times sqrt(E_s))");
  upper->add_option("--moment", moment)->check(CLI::IsMember({"tabulated", "received"}))->capture_default_str();

  auto* lower = app.add_subcommand("lower-bound", "achievable rate by particle simulation");
  add_channel_flags(lower, c);
  add_output_flags(lower, c);
  lower->add_option("--m", m, "block length of the optimized input (2 or 3)")->check(CLI::IsMember({2, 3}))->capture_default_str();
  lower->add_option("--input", input, "optimized, gaussian or gamma")
      ->check(CLI::IsMember({"optimized", "gaussian", "gamma"}))->capture_default_str();
  lower->add_option("--particles", particles)->capture_default_str();
  lower->add_option("--uses", uses)->capture_default_str();
  lower->add_option("--seed", c.seed)->capture_default_str();

  auto* sample = app.add_subcommand("sample-input", "draw input blocks from the optimized density (CSV)");
  add_channel_flags(sample, c);
  sample->add_option("--out", c.out, "output file (stdout if omitted)");
  sample->add_option("--m", m)->check(CLI::IsMember({2, 3}))->capture_default_str();
  sample->add_option("--blocks", blocks)->capture_default_str();
  sample->add_option("--seed", c.seed)->capture_default_str();

  auto* refs = app.add_subcommand("refs", "AWGN capacity and the high-SNR phase-noise asymptote");
  add_channel_flags(refs, c);
  add_output_flags(refs, c);

  auto* cross = app.add_subcommand("crossover", "SNR where the AWGN capacity meets the phase-noise asymptote");
  add_channel_flags(cross, c, false);
  add_output_flags(cross, c);

  auto* sweep = app.add_subcommand("sweep", "SNR sweep writing <out>/<name>.csv and .json");
  sweep->add_option("--config", config_path, "sweep file with one [section] per sweep");
  sweep->add_option("--snr-db", sweep_snr, "SNR grid when no config file is given");
  sweep->add_option("--sigma-delta-sq", c.sigma_delta_sq)->capture_default_str();
  sweep->add_option("--es", c.es)->capture_default_str();
  sweep->add_option("--particles", particles)->capture_default_str();
  sweep->add_option("--uses", uses)->capture_default_str();
  sweep->add_option("--samples", samples)->capture_default_str();
  sweep->add_option("--seed", c.seed)->capture_default_str();
  sweep->add_option("--out", c.out, "output directory")->default_str(".");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kConfigError;
  }

  try {
    if (*solve_aux) {
      const ChannelParams p = c.params();
      AuxSolveOptions opts;
      opts.target = parse_moment_target(moment);
      const AuxOutputParams aux = solve_aux_params(p, mu, opts);
      emit(c, c.format == "json" ? as_json({{"params", p}, {"aux", aux}})
                                 : csv({{"mu", aux.mu}, {"alpha_u", aux.alpha_u}, {"beta_u", aux.beta_u}}));
    } else if (*solve_input) {
      const ChannelParams p = c.params();
      InputSolveOptions opts;
      if (mc_samples) opts.mc_samples = *mc_samples;
      if (solve_input->count("--seed")) opts.seed = c.seed;
      const InputDistParams d = solve_input_params(p, m, opts);
      emit(c, c.format == "json" ? as_json({{"params", p}, {"input", d}})
                                 : csv({{"m", d.m}, {"alpha_l", d.alpha_l}, {"beta_l", d.beta_l}}));
    } else if (*upper) {
      const ChannelParams p = c.params();
      AuxSolveOptions opts;
      opts.target = parse_moment_target(moment);
      const UpperBoundResult r = upper_bound_cu(p, mu_grid.empty() ? default_mu_grid(p) : mu_grid,
                                                default_r_grid(p), samples, c.seed, opts);
      emit(c, c.format == "json" ? as_json({{"params", p}, {"upper_bound", r}})
                                 : csv({{"snr_db", r.snr_db}, {"c_u", r.c_u}, {"c_u_tilde", r.c_u_tilde},
                                        {"argmax_r", r.argmax_r}, {"argmin_mu", r.argmin_mu}}));
    } else if (*lower) {
      const ChannelParams p = c.params();
      std::unique_ptr<InputLaw> law;
      json extra;
      if (input == "optimized") {
        const InputDistParams d = solve_input_params(p, m);
        extra = d;
        law = optimized_input_law(p, d);
      } else if (input == "gaussian") {
        law = gaussian_input_law(p.es());
      } else {
        law = gamma_input_law(p.es());
      }
      const RateEstimate r = estimate_rate(p, *law, uses, particles, c.seed);
      json j{{"params", p}, {"rate", r}};
      if (!extra.is_null()) j["input"] = extra;
      emit(c, c.format == "json" ? as_json(j)
                                 : csv({{"snr_db", snr_db(p)}, {"bits_per_use", r.bits_per_use},
                                        {"std_err", r.std_err}}));
    } else if (*sample) {
      const ChannelParams p = c.params();
      const InputDistParams d = solve_input_params(p, m);
      SamplerStats stats;
      const SymbolBlock b = draw_input_block(p, d, blocks, c.seed, &stats);
      std::ostringstream out;
      out << "block,position,amplitude,phase\n";
      char buf[96];
      for (std::size_t k = 0; k < b.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%zu,%zu,%.9g,%.9g\n", k / static_cast<std::size_t>(m),
                      k % static_cast<std::size_t>(m), b.amplitudes[k], b.phases[k]);
        out << buf;
      }
      emit(c, out.str());
      std::fprintf(stderr, "acceptance rate %.4g%s\n", stats.acceptance_rate(),
                   stats.inefficient() ? " (inefficient proposal)" : "");
    } else if (*refs) {
      const ChannelParams p = c.params();
      std::vector<std::pair<std::string, double>> f{{"snr_db", snr_db(p)}, {"c_awgn", c_awgn(p)}};
      if (p.sigma_delta_sq() > 0.0) f.emplace_back("c_lapidoth", c_lapidoth(p));
      json j{{"params", p}};
      for (const auto& [k, v] : f) j[k] = v;
      emit(c, c.format == "json" ? as_json(j) : csv(f));
    } else if (*cross) {
      ChannelParams p(0.5, c.sigma_delta_sq, c.es);
      const double x = crossover_snr_db(p);
      emit(c, c.format == "json" ? as_json({{"sigma_delta_sq", c.sigma_delta_sq}, {"crossover_snr_db", x}})
                                 : csv({{"sigma_delta_sq", c.sigma_delta_sq}, {"crossover_snr_db", x}}));
    } else if (*sweep) {
      std::vector<SweepConfig> configs;
      if (!config_path.empty()) {
        configs = load_sweep_config(config_path);
      } else {
        SweepConfig sc;
        sc.snr_db = sweep_snr;
        sc.sigma_delta_sq = c.sigma_delta_sq;
        sc.es = c.es;
        sc.particles = particles;
        sc.uses = uses;
        sc.samples = samples;
        sc.seed = c.seed;
        if (sc.snr_db.empty()) throw Error(ErrorCode::InvalidConfig, "empty SNR grid");
        configs.push_back(sc);
      }
      for (const auto& sc : configs) {
        const SweepRun run = run_sweep(sc);
        const auto path = write_sweep_outputs(run, c.out.empty() ? "." : c.out);
        for (const auto& row : run.rows) {
          for (const auto& note : row.notes) std::fprintf(stderr, "%s @ %g dB: %s\n", sc.name.c_str(), row.snr_db, note.c_str());
        }
        std::printf("%s\n", path.string().c_str());
      }
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kConfigError;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return e.code() == ErrorCode::InvalidConfig ? kConfigError : kModuleError;
  }
  return 0;
}
