#include "wpn/serialize.hpp"

#include "wpn/error.hpp"

namespace wpn {

namespace {

template <typename T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

}  // namespace

std::string to_string(AuxMomentTarget target) {
  return target == AuxMomentTarget::kTabulated ? "tabulated" : "received";
}

AuxMomentTarget parse_moment_target(const std::string& text) {
  if (text == "tabulated") return AuxMomentTarget::kTabulated;
  if (text == "received") return AuxMomentTarget::kReceivedPower;
  throw Error(ErrorCode::InvalidConfig, "moment must be 'tabulated' or 'received', got '" + text + "'");
}

void to_json(json& j, const ChannelParams& p) {
  j = json{{"sigma_w_sq", p.sigma_w_sq()},
           {"sigma_delta_sq", p.sigma_delta_sq()},
           {"es", p.es()},
           {"snr_db", snr_db(p)}};
}

void to_json(json& j, const AuxOutputParams& a) {
  j = json{{"mu", a.mu},
           {"alpha_u", a.alpha_u},
           {"beta_u", a.beta_u},
           {"residuals", a.residuals},
           {"moment", to_string(a.target)},
           {"moment_target", a.moment_target},
           {"iterations", a.iterations}};
}

void to_json(json& j, const InputDistParams& d) {
  j = json{{"m", d.m},
           {"alpha_l", d.alpha_l},
           {"beta_l", d.beta_l},
           {"residuals", d.residuals},
           {"iterations", d.iterations},
           {"method", d.method}};
  if (d.mc_samples > 0) {
    j["seed"] = d.seed;
    j["mc_samples"] = d.mc_samples;
    j["rel_std_err"] = d.rel_std_err;
  }
}

void to_json(json& j, const GofR& g) {
  j = json{{"r", g.r},
           {"mu", g.mu},
           {"term_integral", g.term_integral},
           {"term_h_r", g.term_h_r},
           {"term_h_cond", g.term_h_cond},
           {"value", g.value},
           {"n_samples", g.n_samples},
           {"seed", g.seed}};
}

void to_json(json& j, const UpperBoundGridPoint& p) {
  j = json{{"mu", p.mu},          {"aux", p.aux},           {"penalty", p.penalty},
           {"max_g", p.max_g},    {"argmax_r", p.argmax_r}, {"bound", p.bound}};
}

void to_json(json& j, const UpperBoundResult& r) {
  j = json{{"snr_db", r.snr_db},     {"c_u", r.c_u},           {"c_u_tilde", r.c_u_tilde},
           {"argmax_r", r.argmax_r}, {"argmin_mu", r.argmin_mu}, {"aux", r.aux},
           {"r_grid", r.r_grid},     {"mu_grid", r.mu_grid},   {"per_mu", r.per_mu},
           {"evaluations", r.evaluations}, {"n_samples", r.n_samples}, {"seed", r.seed}};
}

void to_json(json& j, const RateEstimate& r) {
  j = json{{"bits_per_use", r.bits_per_use},
           {"std_err", r.std_err},
           {"n_uses", r.n_uses},
           {"n_particles", r.n_particles},
           {"input_label", r.input_label},
           {"seed", r.seed},
           {"conditional_bits", r.conditional_bits},
           {"marginal_bits", r.marginal_bits},
           {"collapses", r.collapses},
           {"resamples", r.resamples},
           {"unreliable", r.unreliable}};
}

void to_json(json& j, const RateSummary& r) { j = json{{"bits", r.bits}, {"std_err", r.std_err}}; }

void to_json(json& j, const SweepConfig& c) {
  j = json{{"name", c.name},
           {"snr_db", c.snr_db},
           {"sigma_delta_sq", c.sigma_delta_sq},
           {"es", c.es},
           {"bounds", {{"c_u", c.want_cu}, {"c_u_tilde", c.want_cu_tilde}, {"lb_m2", c.want_lb_m2}, {"lb_m3", c.want_lb_m3}}},
           {"particles", c.particles},
           {"uses", c.uses},
           {"samples", c.samples},
           {"seed", c.seed},
           {"mc_samples", c.mc_samples},
           {"moment", to_string(c.moment)},
           {"jobs", c.jobs}};
}

void to_json(json& j, const SweepRow& r) {
  j = json{{"snr_db", r.snr_db},
           {"c_awgn", r.c_awgn},
           {"c_lapidoth", optional_json(r.c_lapidoth)},
           {"c_u", optional_json(r.c_u)},
           {"c_u_tilde", optional_json(r.c_u_tilde)},
           {"lb_m2", optional_json(r.lb_m2)},
           {"lb_m3", optional_json(r.lb_m3)},
           {"seed", r.seed},
           {"argmax_r", optional_json(r.argmax_r)},
           {"argmin_mu", optional_json(r.argmin_mu)},
           {"aux_at_zero", optional_json(r.aux_at_zero)},
           {"input_m2", optional_json(r.dist_m2)},
           {"input_m3", optional_json(r.dist_m3)},
           {"rate_m2", optional_json(r.rate_m2)},
           {"rate_m3", optional_json(r.rate_m3)},
           {"notes", r.notes},
           {"wall_seconds", r.wall_seconds}};
}

void to_json(json& j, const SweepRun& r) {
  const ChannelParams probe(0.5, r.config.sigma_delta_sq, r.config.es);
  j = json{{"config", r.config},
           {"r_grid", default_r_grid(probe)},
           {"mu_grid", default_mu_grid(probe)},
           {"rows", r.rows},
           {"wall_seconds", r.wall_seconds}};
}

}  // namespace wpn
