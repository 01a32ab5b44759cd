// End-to-end acceptance run: one PASS/FAIL line per criterion, nonzero exit
// if any criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "../support.hpp"
#include "wpn/bounds_upper.hpp"
#include "wpn/entropy.hpp"
#include "wpn/error.hpp"
#include "wpn/quad.hpp"
#include "wpn/rate.hpp"
#include "wpn/refs.hpp"
#include "wpn/sampler.hpp"
#include "wpn/sweep.hpp"

using namespace wpn;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
  void note(const std::string& what) { info += (info.empty() ? "" : "; ") + what; }
  std::string info;
};

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

const double kSnrPoints[] = {0.0, 10.0, 20.0, 30.0, 40.0};

// ---------------------------------------------------------------------------

Outcome aux_params() {
  struct Row { double sd, sw, alpha, beta; };
  const Row rows[] = {
      {1e-2, 5e-2, 0.43, 0.88}, {1e-2, 5e-3, 0.17, 0.73}, {1e-2, 5e-4, 0.10, 0.59},
      {1e-2, 5e-5, 0.09, 0.53}, {1e-2, 5e-6, 0.08, 0.51}, {1e-3, 5e-2, 0.43, 0.94},
      {1e-3, 5e-3, 0.14, 0.92}, {1e-3, 5e-4, 0.05, 0.73}, {1e-3, 5e-5, 0.03, 0.59},
      {1e-3, 5e-6, 0.03, 0.53},
  };
  Outcome o;
  const auto t0 = Clock::now();
  double worst = 0.0;
  for (const Row& r : rows) {
    const auto aux = solve_aux_params(ChannelParams(r.sw, r.sd), 0.0);
    const double err = std::max(std::abs(aux.alpha_u - r.alpha), std::abs(aux.beta_u - r.beta));
    worst = std::max(worst, err);
    o.require(err <= 0.01, fmt("sd=%g sw=%g got (%.4f, %.4f)", r.sd, r.sw, aux.alpha_u, aux.beta_u));
  }
  const double t = seconds_since(t0);
  o.require(t < 10.0, fmt("took %.1f s", t));
  o.note(fmt("10 rows, worst abs error %.4f, %.2f s", worst, t));
  return o;
}

// Relative tolerance implied by the number of printed significant digits.
double printed_tolerance(int digits) { return digits <= 1 ? 0.5 : digits == 2 ? 0.1 : 0.02; }

Outcome input_params() {
  struct Row { double sw; int m; double alpha; int alpha_digits; double beta; };
  const Row rows[] = {
      {5e-2, 2, 0.509, 3, 0.997},   {5e-3, 2, 0.051, 2, 0.967},   {5e-4, 2, 0.006, 1, 0.825},
      {5e-5, 2, 0.001, 1, 0.634},   {5e-6, 2, 0.001, 1, 0.544},   {5e-2, 3, 0.12500, 5, 0.991},
      {5e-3, 3, 0.00400, 3, 0.936}, {5e-4, 3, 0.00020, 2, 0.756}, {5e-5, 3, 0.00003, 1, 0.598},
      {5e-6, 3, 0.00002, 1, 0.533},
  };
  Outcome o;
  const auto t0 = Clock::now();
  for (const Row& r : rows) {
    const auto d = solve_input_params(ChannelParams(r.sw, 1e-3), r.m);
    const double alpha_tol = printed_tolerance(r.alpha_digits);
    const double ea = std::abs(d.alpha_l - r.alpha) / r.alpha;
    const double eb = std::abs(d.beta_l - r.beta) / r.beta;
    o.require(ea <= alpha_tol && eb <= 0.02,
              fmt("M=%d sw=%g got (%.5g, %.4f) rel err (%.3f, %.4f) tol (%.2f, 0.02)", r.m, r.sw, d.alpha_l,
                  d.beta_l, ea, eb, alpha_tol));
  }
  const double t = seconds_since(t0);
  o.require(t < 300.0, fmt("took %.0f s", t));
  o.note(fmt("10 rows, %.0f s", t));
  return o;
}

Outcome closed_forms() {
  Outcome o;
  auto rel = [](double a, double b) { return std::abs(a - b) / std::abs(b); };
  const double e = std::numbers::e, ln2 = std::log(2.0);

  const double awgn_20 = std::log(101.0) / ln2;
  o.require(rel(c_awgn(ChannelParams(5e-3, 1e-3)), awgn_20) < 1e-9, "c_awgn at 20 dB");
  o.require(rel(c_awgn(ChannelParams(0.5, 1e-3)), 1.0) < 1e-9, "c_awgn at 0 dB");

  const double lap = (std::log(501.0) + std::log(2.0 * std::numbers::pi) - std::log(e * 1e-3)) / (2.0 * ln2);
  o.require(rel(c_lapidoth(ChannelParams(5e-4, 1e-3)), lap) < 1e-9, "c_lapidoth");
  o.require(std::abs(lap - 10.07) < 0.01, fmt("c_lapidoth value %.4f", lap));

  struct Tilde { double sw, sd, alpha, beta, approx; };
  for (const Tilde& t : {Tilde{5e-4, 1e-3, 0.05, 0.73, 9.42}, Tilde{5e-2, 1e-2, 0.43, 0.88, 3.34}}) {
    AuxOutputParams aux;
    aux.alpha_u = t.alpha;
    aux.beta_u = t.beta;
    const double hand = t.beta * (1.0 + 2.0 * t.sw) / ln2 - std::log2(std::sqrt(t.sw)) - std::log2(e) - std::log2(t.alpha);
    const double got = upper_bound_cu_tilde(ChannelParams(t.sw, t.sd), aux);
    o.require(rel(got, hand) < 1e-9, fmt("closed-form bound sw=%g: %.12g vs %.12g", t.sw, got, hand));
    o.require(std::abs(hand - t.approx) < 0.01, fmt("closed-form bound value %.4f", hand));
  }
  o.note(fmt("c_awgn(20dB)=%.4f c_lapidoth=%.4f", awgn_20, lap));
  return o;
}

Outcome crossover() {
  Outcome o;
  const double a = crossover_snr_db(ChannelParams(0.5, 1e-3));
  const double b = crossover_snr_db(ChannelParams(0.5, 1e-2));
  o.require(a >= 27.0 && a <= 33.0, fmt("sd=1e-3 at %.3f dB", a));
  o.require(b >= 17.0 && b <= 23.0, fmt("sd=1e-2 at %.3f dB", b));
  o.note(fmt("%.3f dB and %.3f dB", a, b));
  return o;
}

Outcome entropy_oracles() {
  Outcome o;
  const std::size_t n = 100'000;
  struct Law { const char* name; double truth; std::function<double(Rng&, NormalSource&)> draw; };
  const Law laws[] = {
      {"uniform", 0.0, [](Rng& r, NormalSource&) { return uniform01(r); }},
      {"gaussian", 0.5 * std::log2(2.0 * std::numbers::pi * std::numbers::e), [](Rng& r, NormalSource& g) { return g(r); }},
      {"exponential", 1.0 / std::numbers::ln2, [](Rng& r, NormalSource&) { return -std::log1p(-uniform01(r)); }},
  };
  for (const Law& law : laws) {
    std::vector<double> est;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      Rng rng = make_rng(seed, 0xe7);
      NormalSource g;
      std::vector<double> v(n);
      for (double& x : v) x = law.draw(rng, g);
      est.push_back(knn_entropy(EntropySample::scalar(std::move(v)), 4));
    }
    const double med = testing::median(est);
    o.require(std::abs(med - law.truth) <= 0.02, fmt("%s median %.4f vs %.4f", law.name, med, law.truth));
    o.note(fmt("%s %+.4f", law.name, med - law.truth));
  }
  return o;
}

Outcome g_asymptote() {
  Outcome o;
  const ChannelParams p(5e-4, 1e-3);
  const auto g = g_of_r(p, 1000.0, 0.0);
  const double lim = g_limit(p);
  o.require(std::abs(g.value - lim) <= 0.1, fmt("G=%.4f limit=%.4f", g.value, lim));
  o.note(fmt("G(1000)=%.4f, limit %.4f", g.value, lim));
  return o;
}

Outcome upper_bound_agreement() {
  Outcome o;
  for (double snr : {20.0, 30.0, 40.0}) {
    const auto t0 = Clock::now();
    const ChannelParams p = ChannelParams::from_snr_db(snr, 1e-3);
    const auto r = upper_bound_cu(p, default_mu_grid(p), default_r_grid(p), 100'000, 1);
    const double t = seconds_since(t0);
    const double gap = std::abs(r.c_u - r.c_u_tilde);
    o.require(gap <= 0.3, fmt("%g dB: c_u=%.4f c_u_tilde=%.4f", snr, r.c_u, r.c_u_tilde));
    o.require(t < 900.0, fmt("%g dB took %.0f s", snr, t));
    o.note(fmt("%g dB gap %.3f (%.0f s)", snr, gap, t));
  }
  return o;
}

Outcome rate_oracles() {
  Outcome o;
  {
    const ChannelParams p = ChannelParams::from_snr_db(10.0, 0.0);
    RateOptions opt;
    opt.initial_phase = 0.0;
    const auto r = estimate_rate(p, *gaussian_input_law(1.0), 10'000, 10'000, 3, opt);
    const double err = r.bits_per_use - std::log2(11.0);
    o.require(std::abs(err) <= 0.1, fmt("AWGN rate %.4f vs %.4f", r.bits_per_use, std::log2(11.0)));
    o.note(fmt("AWGN %+.4f", err));
  }
  {
    const ChannelParams p = ChannelParams::from_snr_db(20.0, 1e-3);
    const auto d = solve_input_params(p, 2);
    const auto in = draw_input_block(p, d, 500, 4);
    const auto out = simulate(p, in, 5);
    const auto pf = conditional_log_densities(p, in, out, 10'000, 6, std::nullopt);
    const auto grid = testing::phase_grid_log_densities(p, in, out, 512);
    const double diff = (testing::mean(pf) - testing::mean(grid)) / std::numbers::ln2;
    o.require(std::abs(diff) <= 0.05, fmt("particle vs grid differ by %.4f bits", diff));
    o.note(fmt("particle-grid %+.4f", diff));
  }
  return o;
}

Outcome bound_curves() {
  Outcome o;
  SweepConfig cfg;
  cfg.name = "acceptance";
  cfg.snr_db.assign(std::begin(kSnrPoints), std::end(kSnrPoints));
  cfg.sigma_delta_sq = 1e-3;
  cfg.particles = 10'000;
  cfg.uses = 1'000;
  const auto t0 = Clock::now();
  const SweepRun run = run_sweep(cfg);
  const double t = seconds_since(t0);
  for (const SweepRow& row : run.rows) {
    if (!row.c_u || !row.c_u_tilde || !row.lb_m2) {
      o.require(false, fmt("%g dB: missing values", row.snr_db));
      continue;
    }
    const double lb = row.lb_m2->bits, se = row.lb_m2->std_err;
    const double cap = std::min(*row.c_u, row.c_awgn);
    o.require(lb <= cap + 2.0 * se, fmt("%g dB: lb %.3f above min(c_u, c_awgn) %.3f", row.snr_db, lb, cap));
    if (row.snr_db <= 10.0) {
      o.require(lb >= row.c_awgn - 1.0, fmt("%g dB: lb %.3f vs c_awgn %.3f", row.snr_db, lb, row.c_awgn));
    }
    if (row.snr_db >= 30.0) {
      o.require(std::abs(lb - *row.c_u_tilde) <= 1.5,
                fmt("%g dB: lb %.3f vs c_u_tilde %.3f", row.snr_db, lb, *row.c_u_tilde));
    }
    o.note(fmt("%g dB lb %.2f±%.2f c_u %.2f c_awgn %.2f", row.snr_db, lb, se, *row.c_u, row.c_awgn));
  }
  o.require(t < 3600.0, fmt("took %.0f s", t));
  o.note(fmt("%.0f s", t));
  return o;
}

Outcome sampler_fidelity() {
  Outcome o;
  const ChannelParams p(5e-4, 1e-3);
  const auto d = solve_input_params(p, 2);
  const std::size_t n_blocks = 100'000;
  const auto blk = draw_input_block(p, d, n_blocks, 77);
  const auto chi = testing::chi_square_m2(p, d, blk.amplitudes);
  o.require(chi.pass(), fmt("chi-square %.1f >= %.1f", chi.statistic, chi.critical));

  std::vector<double> power(n_blocks), a(n_blocks), b(n_blocks);
  for (std::size_t i = 0; i < n_blocks; ++i) {
    a[i] = blk.amplitudes[2 * i];
    b[i] = blk.amplitudes[2 * i + 1];
    power[i] = 0.5 * (a[i] * a[i] + b[i] * b[i]);
  }
  const double se = std::sqrt(testing::variance(power) / static_cast<double>(n_blocks));
  const double mean_power = testing::mean(power);
  o.require(std::abs(mean_power - p.es()) <= 3.0 * se, fmt("block power %.5f ± %.5f", mean_power, se));
  const double rho = testing::correlation(a, b);
  const double bar = 3.0 / std::sqrt(static_cast<double>(n_blocks));
  o.require(std::abs(rho) > bar, fmt("within-block correlation %.4f", rho));
  o.note(fmt("chi2 %.0f/%.0f, power %.4f, rho %.3f", chi.statistic, chi.critical, mean_power, rho));
  return o;
}

}  // namespace

int main() {
  struct Criterion { int id; const char* name; Outcome (*run)(); };
  const Criterion criteria[] = {
      {1, "auxiliary density parameters", aux_params},
      {2, "input density parameters", input_params},
      {3, "closed-form spot checks", closed_forms},
      {4, "AWGN / high-SNR crossover", crossover},
      {5, "entropy estimator oracles", entropy_oracles},
      {6, "G(R) large-R limit", g_asymptote},
      {7, "C_U vs closed-form bound", upper_bound_agreement},
      {8, "rate estimator oracles", rate_oracles},
      {9, "bound curves at desk scale", bound_curves},
      {10, "input sampler fidelity", sampler_fidelity},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failed += !o.pass;
    std::printf("[%s] %2d %-30s %s%s%s (%.1f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.info.c_str(),
                o.detail.empty() ? "" : " | ", o.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(std::size(criteria)) - failed, std::size(criteria));
  return failed == 0 ? 0 : 1;
}
