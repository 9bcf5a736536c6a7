#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "geofence/mission.hpp"

namespace geofence {

/// Mission plan from JSON:
/// {"waypoints": [{"lat": .., "lon": .., "alt": ..?}, ...], "speed": .., "tick": ..,
///  "override_redirect": .., "replan": .., "max_duration": .., "noise_m": .., "noise_seed": ..}.
/// Only `waypoints` is required.
inline MissionPlan parse_plan(std::string_view text)
{
    using nlohmann::json;
    const json doc = json::parse(text.begin(), text.end(), nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) throw Error(ErrorCode::Parse, "plan must be a JSON object");
    if (!doc.contains("waypoints") || !doc["waypoints"].is_array()) {
        throw Error(ErrorCode::Parse, "plan needs a waypoints array");
    }
    MissionPlan plan;
    try {
        for (const auto& w : doc["waypoints"]) {
            GeoPoint g{w.at("lat").get<double>(), w.at("lon").get<double>()};
            if (w.contains("alt") && !w["alt"].is_null()) g.alt = w["alt"].get<double>();
            plan.waypoints.push_back(g);
        }
        plan.speed = doc.value("speed", plan.speed);
        plan.tick = doc.value("tick", plan.tick);
        plan.override_redirect = doc.value("override_redirect", plan.override_redirect);
        plan.replan_enabled = doc.value("replan", plan.replan_enabled);
        if (doc.contains("max_duration") && !doc["max_duration"].is_null()) {
            plan.max_duration = doc["max_duration"].get<double>();
        }
        plan.noise_m = doc.value("noise_m", plan.noise_m);
        plan.noise_seed = doc.value("noise_seed", plan.noise_seed);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::Parse, std::string("malformed plan: ") + e.what());
    }
    return plan;
}

}  // namespace geofence
