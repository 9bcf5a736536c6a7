#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include <json.hpp>

#include "geofence/database.hpp"
#include "geofence/mission.hpp"
#include "geofence/voronoi.hpp"

namespace geofence {

namespace detail {

using nlohmann::json;

inline json position(const GeoPoint& g)
{
    json p = json::array({g.lon, g.lat});
    if (g.alt) p.push_back(*g.alt);
    return p;
}

inline json closed_ring(const LocalProjection& proj, const std::vector<PlanarPoint>& ring)
{
    json out = json::array();
    for (const auto& v : ring) out.push_back(position(proj.unproject(v)));
    if (!ring.empty()) out.push_back(out.front());
    return out;
}

inline std::vector<PlanarPoint> ellipse_ring(const Elliptical& e, int n = 64)
{
    std::vector<PlanarPoint> ring;
    const double t = e.heading * kDegToRad;
    for (int k = 0; k < n; ++k) {
        const double u = 2.0 * std::numbers::pi * k / n;
        const double lx = e.semi_major * std::cos(u), ly = e.semi_minor * std::sin(u);
        ring.push_back({e.center.x + lx * std::cos(t) - ly * std::sin(t), e.center.y + lx * std::sin(t) + ly * std::cos(t)});
    }
    return ring;
}

inline json feature(json geometry, json properties)
{
    return {{"type", "Feature"}, {"geometry", std::move(geometry)}, {"properties", std::move(properties)}};
}

inline json line_string(const LocalProjection& proj, const std::vector<PlanarPoint>& pts)
{
    json coords = json::array();
    for (const auto& p : pts) coords.push_back(position(proj.unproject(p)));
    return {{"type", "LineString"}, {"coordinates", std::move(coords)}};
}

}  // namespace detail

inline nlohmann::json feature_collection(nlohmann::json features = nlohmann::json::array())
{
    return {{"type", "FeatureCollection"}, {"features", std::move(features)}};
}

/// One feature per zone. Ring geometries become Polygon or MultiPolygon;
/// circles, spheres and cylinders become a Point with a `radius_m` property;
/// ellipses are approximated by a 64-gon.
inline nlohmann::json zone_feature(const Zone& z, const LocalProjection& proj)
{
    using nlohmann::json;
    json props = {{"id", z.id},
                  {"name", z.name},
                  {"category", z.category},
                  {"mode", std::string(to_string(z.mode))},
                  {"warning_buffer", z.warning_buffer},
                  {"termination_buffer", z.termination_buffer}};
    json geometry = std::visit(
        [&](const auto& g) -> json {
            using G = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<G, Polygonal> || std::is_same_v<G, AlphaZone>) {
                const auto& rings = detail::rings_of(z.geometry);
                if (rings.size() == 1) {
                    return {{"type", "Polygon"},
                            {"coordinates", json::array({detail::closed_ring(proj, rings[0].vertices())})}};
                }
                json polys = json::array();
                for (const auto& r : rings) polys.push_back(json::array({detail::closed_ring(proj, r.vertices())}));
                return {{"type", "MultiPolygon"}, {"coordinates", std::move(polys)}};
            } else if constexpr (std::is_same_v<G, Elliptical>) {
                return {{"type", "Polygon"},
                        {"coordinates", json::array({detail::closed_ring(proj, detail::ellipse_ring(g))})}};
            } else {
                props["radius_m"] = g.radius;
                if constexpr (std::is_same_v<G, Spherical>) props["center_alt"] = g.center_alt;
                if constexpr (std::is_same_v<G, Cylindrical>) {
                    props["alt_min"] = g.alt_min;
                    props["alt_max"] = g.alt_max;
                }
                return {{"type", "Point"}, {"coordinates", detail::position(proj.unproject(g.center))}};
            }
        },
        z.geometry);
    return detail::feature(std::move(geometry), std::move(props));
}

inline nlohmann::json zones_geojson(const CompiledDatabase& db)
{
    auto features = nlohmann::json::array();
    for (const auto& z : db.zones()) features.push_back(zone_feature(z, db.projection));
    return feature_collection(std::move(features));
}

/// Corridor edges as LineString features tagged `kind: corridor`.
inline nlohmann::json corridor_features(const CorridorGraph& g, const LocalProjection& proj)
{
    auto out = nlohmann::json::array();
    for (const auto& e : g.edges) {
        out.push_back(detail::feature(detail::line_string(proj, {g.nodes[e.a], g.nodes[e.b]}),
                                      {{"kind", "corridor"}, {"weight", e.weight}}));
    }
    return out;
}

inline nlohmann::json path_feature(const Path& p, const LocalProjection& proj)
{
    return detail::feature(detail::line_string(proj, p.waypoints),
                           {{"kind", "path"}, {"total_length", p.total_length}, {"weight", p.weight}});
}

/// Corridor graph over every zone of `db`, framed by the database extent.
/// Returns an empty graph when the database holds no zones.
inline CorridorGraph database_corridor(const CompiledDatabase& db, double clearance)
{
    std::vector<PlanarPoint> sites;
    for (const auto& z : db.zones()) detail::zone_sites(z, clearance, sites);
    if (sites.empty()) return {};
    PlanarPoint lo = sites.front(), hi = sites.front();
    for (const auto& s : sites) {
        lo = {std::min(lo.x, s.x), std::min(lo.y, s.y)};
        hi = {std::max(hi.x, s.x), std::max(hi.y, s.y)};
    }
    const double margin = std::max(300.0, 6.0 * clearance);
    lo = {lo.x - margin, lo.y - margin};
    hi = {hi.x + margin, hi.y + margin};
    const double spacing = std::max(clearance, margin / 4.0);
    for (double x = lo.x; x <= hi.x; x += spacing) {
        sites.push_back({x, lo.y});
        sites.push_back({x, hi.y});
    }
    for (double y = lo.y + spacing; y < hi.y; y += spacing) {
        sites.push_back({lo.x, y});
        sites.push_back({hi.x, y});
    }
    const BoundingBox clip({lo.x - margin, lo.y - margin}, {hi.x + margin, hi.y + margin});
    return build_corridor(voronoi(PointSet(sites), clip), db.zones(), clearance);
}

/// Flight track as a LineString plus one Point per event.
inline nlohmann::json trace_geojson(const MissionTrace& trace)
{
    using nlohmann::json;
    json features = json::array();
    json coords = json::array();
    for (const auto& s : trace.states) coords.push_back(detail::position(s.position));
    features.push_back(detail::feature({{"type", "LineString"}, {"coordinates", std::move(coords)}},
                                       {{"kind", "track"},
                                        {"completed", trace.summary.completed},
                                        {"worst_status", std::string(to_string(trace.summary.worst_status))},
                                        {"total_distance", trace.summary.total_distance}}));
    for (const auto& e : trace.events) {
        features.push_back(detail::feature({{"type", "Point"}, {"coordinates", detail::position(e.position)}},
                                           {{"kind", std::string(to_string(e.kind))},
                                            {"time", e.time},
                                            {"zone_id", e.zone_id ? json(*e.zone_id) : json()},
                                            {"detail", e.detail}}));
    }
    return feature_collection(std::move(features));
}

}  // namespace geofence
