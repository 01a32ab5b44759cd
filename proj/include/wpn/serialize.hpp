#pragma once

#include "json.hpp"

#include "wpn/bounds_upper.hpp"
#include "wpn/model.hpp"
#include "wpn/quad.hpp"
#include "wpn/rate.hpp"
#include "wpn/sweep.hpp"

namespace wpn {

using nlohmann::json;

std::string to_string(AuxMomentTarget target);
AuxMomentTarget parse_moment_target(const std::string& text);

void to_json(json& j, const ChannelParams& p);
void to_json(json& j, const AuxOutputParams& a);
void to_json(json& j, const InputDistParams& d);
void to_json(json& j, const GofR& g);
void to_json(json& j, const UpperBoundGridPoint& p);
void to_json(json& j, const UpperBoundResult& r);
void to_json(json& j, const RateEstimate& r);
void to_json(json& j, const RateSummary& r);
void to_json(json& j, const SweepConfig& c);
void to_json(json& j, const SweepRow& r);
void to_json(json& j, const SweepRun& r);

}  // namespace wpn
