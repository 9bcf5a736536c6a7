#pragma once

#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "geofence/repository.hpp"

namespace geofence {

/// Seeded benchmark fixture: `n` concave star polygons (8 to 40 vertices,
/// radii 60 to 400 m) scattered uniformly in a 20 km square centred on
/// `center`, each tagged military=danger_area.
struct SyntheticFixture {
    std::uint64_t seed = 1;
    GeoPoint center{51.43, -0.56};
    double box_m = 20'000.0;
    double r_min = 60.0;
    double r_max = 400.0;
};

inline std::vector<FeatureRecord> synthetic_features(std::size_t n, const SyntheticFixture& fx = {})
{
    std::mt19937_64 rng(fx.seed);
    const LocalProjection proj(fx.center);
    const double half = fx.box_m / 2.0;
    std::uniform_real_distribution<double> pos(-half + fx.r_max, half - fx.r_max);
    std::uniform_int_distribution<int> vertices(8, 40);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    std::uniform_real_distribution<double> outer(0.6, 1.0);
    std::uniform_real_distribution<double> scale(fx.r_min, fx.r_max);

    std::vector<FeatureRecord> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const PlanarPoint c{pos(rng), pos(rng)};
        const double r = scale(rng);
        const int k = vertices(rng);
        std::vector<double> angles(static_cast<std::size_t>(k));
        for (auto& a : angles) a = angle(rng);
        std::sort(angles.begin(), angles.end());
        std::vector<GeoPoint> ring;
        for (std::size_t j = 0; j < angles.size(); ++j) {
            // alternate deep and shallow vertices so the outline is concave
            const double rr = r * (j % 2 == 0 ? outer(rng) : 0.25 + 0.3 * outer(rng));
            ring.push_back(proj.unproject({c.x + rr * std::cos(angles[j]), c.y + rr * std::sin(angles[j])}));
        }
        FeatureRecord f;
        f.index = i;
        f.osm_id = "synthetic-" + std::to_string(i);
        f.name = "synthetic zone " + std::to_string(i);
        f.feature_type = "multipolygon";
        f.tags["military"] = "danger_area";
        f.rings.push_back(std::move(ring));
        out.push_back(std::move(f));
    }
    return out;
}

/// The same fixture as a GeoJSON FeatureCollection.
inline std::string synthetic_geojson(std::size_t n, const SyntheticFixture& fx = {})
{
    using nlohmann::json;
    json features = json::array();
    for (const auto& f : synthetic_features(n, fx)) {
        json ring = json::array();
        for (const auto& g : f.rings.front()) ring.push_back(json::array({g.lon, g.lat}));
        ring.push_back(ring.front());
        json props = {{"osm_id", f.osm_id}, {"name", *f.name}, {"type", f.feature_type}};
        for (const auto& [k, v] : f.tags) props[k] = v ? json(*v) : json();
        features.push_back({{"type", "Feature"},
                            {"properties", props},
                            {"geometry", {{"type", "MultiPolygon"}, {"coordinates", json::array({json::array({ring})})}}}});
    }
    return json{{"type", "FeatureCollection"}, {"features", features}}.dump() + "\n";
}

}  // namespace geofence
