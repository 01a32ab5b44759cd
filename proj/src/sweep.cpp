#include "wpn/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include "wpn/error.hpp"
#include "wpn/refs.hpp"
#include "wpn/serialize.hpp"

namespace wpn {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_double(const std::string& text, const std::string& key) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
    throw Error(ErrorCode::InvalidConfig, key + ": not a number: '" + text + "'");
  }
  return v;
}

std::uint64_t parse_count(const std::string& text, const std::string& key) {
  // accept 1e5 style counts as well as plain integers
  const double v = parse_double(text, key);
  if (v < 0.0 || v != std::floor(v) || v > 1e18) {
    throw Error(ErrorCode::InvalidConfig, key + ": expected a nonnegative integer");
  }
  return static_cast<std::uint64_t>(v);
}

void apply(SweepConfig& c, const std::string& key, const std::string& value) {
  if (key == "snr_db") {
    c.snr_db.clear();
    for (const auto& v : split(value, ',')) c.snr_db.push_back(parse_double(v, key));
  } else if (key == "sigma_delta_sq") {
    c.sigma_delta_sq = parse_double(value, key);
  } else if (key == "es") {
    c.es = parse_double(value, key);
  } else if (key == "bounds") {
    c.want_cu = c.want_cu_tilde = c.want_lb_m2 = c.want_lb_m3 = false;
    for (const auto& b : split(value, ',')) {
      if (b == "cu" || b == "c_u") c.want_cu = true;
      else if (b == "cu_tilde" || b == "c_u_tilde") c.want_cu_tilde = true;
      else if (b == "lb_m2") c.want_lb_m2 = true;
      else if (b == "lb_m3") c.want_lb_m3 = true;
      else throw Error(ErrorCode::InvalidConfig, "unknown bound '" + b + "'");
    }
  } else if (key == "particles") {
    c.particles = parse_count(value, key);
  } else if (key == "uses") {
    c.uses = parse_count(value, key);
  } else if (key == "samples") {
    c.samples = parse_count(value, key);
  } else if (key == "seed") {
    c.seed = parse_count(value, key);
  } else if (key == "mc_samples") {
    c.mc_samples = parse_count(value, key);
  } else if (key == "moment") {
    c.moment = parse_moment_target(value);
  } else if (key == "jobs") {
    c.jobs = static_cast<unsigned>(std::max<std::uint64_t>(1, parse_count(value, key)));
  } else {
    throw Error(ErrorCode::InvalidConfig, "unknown key '" + key + "'");
  }
}

void validate(const SweepConfig& c) {
  if (c.snr_db.empty()) throw Error(ErrorCode::InvalidConfig, "[" + c.name + "] empty SNR grid");
  if (!(c.sigma_delta_sq >= 0.0)) throw Error(ErrorCode::InvalidConfig, "sigma_delta_sq must be >= 0");
  if (!(c.es > 0.0)) throw Error(ErrorCode::InvalidConfig, "es must be > 0");
  if (c.particles < 2) throw Error(ErrorCode::InvalidConfig, "particles must be >= 2");
  if (c.uses < 1) throw Error(ErrorCode::InvalidConfig, "uses must be >= 1");
  if (c.samples < 10) throw Error(ErrorCode::InvalidConfig, "samples must be >= 10");
}

std::string format_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string format_optional(const std::optional<double>& v) { return v ? format_value(*v) : std::string(); }

std::optional<double> parse_optional(const std::string& field) {
  if (field.empty()) return std::nullopt;
  return parse_double(field, "csv field");
}

template <typename F>
void attempt(SweepRow& row, const char* what, F&& f) {
  try {
    f();
  } catch (const Error& e) {
    row.notes.push_back(std::string(what) + ": " + e.what());
  }
}

}  // namespace

std::vector<SweepConfig> parse_sweep_config(std::istream& in) {
  std::vector<SweepConfig> out;
  SweepConfig current;
  bool has_keys = false;
  bool in_section = false;
  std::string line;
  int lineno = 0;
  auto flush = [&] {
    if (in_section || has_keys) {
      validate(current);
      out.push_back(current);
    }
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw Error(ErrorCode::InvalidConfig, "line " + std::to_string(lineno) + ": bad section header");
      flush();
      current = SweepConfig{};
      current.name = trim(std::string_view(line).substr(1, line.size() - 2));
      if (current.name.empty()) throw Error(ErrorCode::InvalidConfig, "line " + std::to_string(lineno) + ": empty section name");
      in_section = true;
      has_keys = false;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::InvalidConfig, "line " + std::to_string(lineno) + ": expected key = value");
    apply(current, trim(std::string_view(line).substr(0, eq)), trim(std::string_view(line).substr(eq + 1)));
    has_keys = true;
  }
  flush();
  if (out.empty()) throw Error(ErrorCode::InvalidConfig, "no sweep defined");
  return out;
}

std::vector<SweepConfig> load_sweep_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidConfig, "cannot open " + path.string());
  return parse_sweep_config(in);
}

SweepRow run_sweep_row(const SweepConfig& config, double snr) {
  const auto t0 = std::chrono::steady_clock::now();
  const ChannelParams params = ChannelParams::from_snr_db(snr, config.sigma_delta_sq, config.es);
  SweepRow row;
  row.snr_db = snr;
  row.seed = derive_seed(config.seed, std::bit_cast<std::uint64_t>(snr));
  row.c_awgn = c_awgn(params);
  attempt(row, "c_lapidoth", [&] { row.c_lapidoth = c_lapidoth(params); });

  AuxSolveOptions aux_opts;
  aux_opts.target = config.moment;
  if (config.want_cu) {
    attempt(row, "c_u", [&] {
      const UpperBoundResult ub = upper_bound_cu(params, default_mu_grid(params), default_r_grid(params),
                                                 config.samples, derive_seed(row.seed, 1), aux_opts);
      row.c_u = ub.c_u;
      row.argmax_r = ub.argmax_r;
      row.argmin_mu = ub.argmin_mu;
      row.aux_at_zero = ub.per_mu.front().aux;
      if (config.want_cu_tilde) row.c_u_tilde = ub.c_u_tilde;
    });
  }
  if (config.want_cu_tilde && !row.c_u_tilde) {
    attempt(row, "c_u_tilde", [&] {
      row.aux_at_zero = solve_aux_params(params, 0.0, aux_opts);
      row.c_u_tilde = upper_bound_cu_tilde(params, *row.aux_at_zero);
    });
  }
  auto lower = [&](int m, std::optional<InputDistParams>& dist, std::optional<RateEstimate>& rate,
                   std::optional<RateSummary>& summary) {
    InputSolveOptions in_opts;
    in_opts.mc_samples = config.mc_samples;
    dist = solve_input_params(params, m, in_opts);
    const auto law = optimized_input_law(params, *dist);
    rate = estimate_rate(params, *law, config.uses, config.particles, derive_seed(row.seed, 10 + m));
    summary = RateSummary{rate->bits_per_use, rate->std_err};
    if (rate->unreliable) row.notes.push_back("lb_m" + std::to_string(m) + ": more than 1% of steps re-anchored");
  };
  if (config.want_lb_m2) attempt(row, "lb_m2", [&] { lower(2, row.dist_m2, row.rate_m2, row.lb_m2); });
  if (config.want_lb_m3) attempt(row, "lb_m3", [&] { lower(3, row.dist_m3, row.rate_m3, row.lb_m3); });
  row.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return row;
}

SweepRun run_sweep(const SweepConfig& config) {
  validate(config);
  const auto t0 = std::chrono::steady_clock::now();
  SweepRun run;
  run.config = config;
  run.rows.resize(config.snr_db.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < run.rows.size(); i = next++) run.rows[i] = run_sweep_row(config, config.snr_db[i]);
  };
  const unsigned n_threads = std::min<unsigned>(config.jobs, static_cast<unsigned>(run.rows.size()));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }
  run.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return run;
}

const char* const kSweepCsvHeader = "snr_db,c_awgn,c_lapidoth,c_u,c_u_tilde,lb_m2,lb_m2_stderr,lb_m3,lb_m3_stderr";

void write_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << kSweepCsvHeader << '\n';
  for (const auto& r : rows) {
    auto bits = [](const std::optional<RateSummary>& s) { return s ? std::optional<double>(s->bits) : std::nullopt; };
    auto err = [](const std::optional<RateSummary>& s) { return s ? std::optional<double>(s->std_err) : std::nullopt; };
    out << format_value(r.snr_db) << ',' << format_value(r.c_awgn) << ',' << format_optional(r.c_lapidoth) << ','
        << format_optional(r.c_u) << ',' << format_optional(r.c_u_tilde) << ',' << format_optional(bits(r.lb_m2))
        << ',' << format_optional(err(r.lb_m2)) << ',' << format_optional(bits(r.lb_m3)) << ','
        << format_optional(err(r.lb_m3)) << '\n';
  }
}

std::vector<SweepRow> parse_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != kSweepCsvHeader) {
    throw Error(ErrorCode::InvalidInput, "missing or unexpected CSV header");
  }
  std::vector<SweepRow> rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::size_t pos = 0;
    for (;;) {
      const auto comma = line.find(',', pos);
      f.push_back(line.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos));
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (f.size() != 9) throw Error(ErrorCode::InvalidInput, "CSV row needs 9 fields: " + line);
    SweepRow r;
    r.snr_db = parse_double(f[0], "snr_db");
    r.c_awgn = parse_double(f[1], "c_awgn");
    r.c_lapidoth = parse_optional(f[2]);
    r.c_u = parse_optional(f[3]);
    r.c_u_tilde = parse_optional(f[4]);
    auto rate = [&](const std::string& b, const std::string& e) -> std::optional<RateSummary> {
      const auto bits = parse_optional(b);
      const auto err = parse_optional(e);
      if (bits.has_value() != err.has_value()) throw Error(ErrorCode::InvalidInput, "rate without its standard error");
      if (!bits) return std::nullopt;
      return RateSummary{*bits, *err};
    };
    r.lb_m2 = rate(f[5], f[6]);
    r.lb_m3 = rate(f[7], f[8]);
    rows.push_back(r);
  }
  return rows;
}

std::filesystem::path write_sweep_outputs(const SweepRun& run, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto csv_path = dir / (run.config.name + ".csv");
  const auto json_path = dir / (run.config.name + ".json");
  {
    std::ofstream out(csv_path);
    if (!out) throw Error(ErrorCode::InvalidConfig, "cannot write " + csv_path.string());
    write_csv(out, run.rows);
  }
  std::ofstream out(json_path);
  if (!out) throw Error(ErrorCode::InvalidConfig, "cannot write " + json_path.string());
  out << json(run).dump(2) << '\n';
  return csv_path;
}

}  // namespace wpn
