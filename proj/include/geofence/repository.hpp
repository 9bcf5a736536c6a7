#pragma once

#include <algorithm>
#include <cstdlib>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <json.hpp>

#include "geofence/alphashape.hpp"
#include "geofence/database.hpp"

namespace geofence {

/// One OSM-derived area feature. `rings` holds outer rings only, closing
/// position removed; `tags` keeps null-valued keys as absent values.
struct FeatureRecord {
    std::size_t index = 0;
    std::string osm_id;
    std::optional<std::string> name;
    std::string feature_type;
    std::map<std::string, std::optional<std::string>> tags;
    std::vector<std::vector<GeoPoint>> rings;

    [[nodiscard]] std::optional<std::string> tag(const std::string& key) const
    {
        const auto it = tags.find(key);
        return it == tags.end() ? std::nullopt : it->second;
    }
};

struct Diagnostic {
    std::size_t feature_index = 0;
    std::string osm_id;
    std::string reason;
};

inline std::string format_diagnostics(const std::vector<Diagnostic>& diags)
{
    std::ostringstream out;
    for (const auto& d : diags) {
        out << "feature " << d.feature_index << '\t' << (d.osm_id.empty() ? "-" : d.osm_id) << '\t' << d.reason << '\n';
    }
    return out.str();
}

struct ParseResult {
    std::vector<FeatureRecord> records;
    std::vector<Diagnostic> diagnostics;
    std::size_t skipped = 0;
};

namespace detail {

using nlohmann::json;

inline std::optional<std::string> json_scalar_string(const json& v)
{
    if (v.is_null()) return std::nullopt;
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
    if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
    return v.dump();
}

/// Parses an osm2pgsql/ogr style hstore string: "k"=>"v","k2"=>NULL.
inline std::map<std::string, std::optional<std::string>> parse_hstore(std::string_view s)
{
    std::map<std::string, std::optional<std::string>> out;
    std::size_t i = 0;
    auto skip_ws = [&] {
        while (i < s.size() && (s[i] == ' ' || s[i] == ',' || s[i] == '\t' || s[i] == '\n')) ++i;
    };
    auto quoted = [&]() -> std::optional<std::string> {
        if (i >= s.size() || s[i] != '"') return std::nullopt;
        ++i;
        std::string v;
        while (i < s.size() && s[i] != '"') {
            if (s[i] == '\\' && i + 1 < s.size()) ++i;
            v.push_back(s[i++]);
        }
        if (i >= s.size()) return std::nullopt;
        ++i;
        return v;
    };
    while (true) {
        skip_ws();
        if (i >= s.size()) break;
        const auto key = quoted();
        if (!key) break;
        skip_ws();
        if (s.substr(i, 2) != "=>") break;
        i += 2;
        skip_ws();
        if (s.substr(i, 4) == "NULL") {
            i += 4;
            out[*key] = std::nullopt;
            continue;
        }
        const auto value = quoted();
        if (!value) break;
        out[*key] = *value;
    }
    return out;
}

inline std::vector<GeoPoint> parse_ring(const json& ring)
{
    if (!ring.is_array()) throw Error(ErrorCode::InvalidGeometry, "ring is not an array");
    std::vector<GeoPoint> pts;
    pts.reserve(ring.size());
    for (const auto& pos : ring) {
        if (!pos.is_array() || pos.size() < 2 || !pos[0].is_number() || !pos[1].is_number()) {
            throw Error(ErrorCode::InvalidGeometry, "position is not [lon, lat]");
        }
        GeoPoint g{pos[1].get<double>(), pos[0].get<double>()};
        if (!g.valid()) throw Error(ErrorCode::InvalidCoordinate, "coordinate out of range");
        pts.push_back(g);
    }
    if (pts.size() < 4) throw Error(ErrorCode::InvalidGeometry, "ring has fewer than 4 positions");
    if (pts.front().lat != pts.back().lat || pts.front().lon != pts.back().lon) {
        throw Error(ErrorCode::InvalidGeometry, "ring is not closed");
    }
    pts.pop_back();
    return pts;
}

inline const std::vector<std::string_view>& reserved_properties()
{
    static const std::vector<std::string_view> keys{"osm_id", "osm_way_id", "name", "type", "other_tags"};
    return keys;
}

/// Converts one GeoJSON Feature; returns nullopt (with diagnostics) when it is skipped.
inline std::optional<FeatureRecord> parse_feature(const json& f, std::size_t index, ParseResult& out)
{
    auto skip = [&](std::string osm_id, std::string reason) {
        out.diagnostics.push_back({index, std::move(osm_id), std::move(reason)});
        ++out.skipped;
        return std::nullopt;
    };
    if (!f.is_object() || f.value("type", json()) != "Feature") return skip("", "not a Feature object");
    const json props = f.contains("properties") && f["properties"].is_object() ? f["properties"] : json::object();

    FeatureRecord rec;
    rec.index = index;
    for (const char* key : {"osm_id", "osm_way_id"}) {
        if (props.contains(key)) {
            if (auto v = json_scalar_string(props[key]); v && !v->empty()) {
                rec.osm_id = *v;
                break;
            }
        }
    }
    if (rec.osm_id.empty() && f.contains("id")) {
        if (auto v = json_scalar_string(f["id"]); v && !v->empty()) rec.osm_id = *v;
    }
    if (rec.osm_id.empty()) return skip("", "missing osm_id");

    if (props.contains("name")) rec.name = json_scalar_string(props["name"]);
    for (const auto& [key, value] : props.items()) {
        if (std::find(reserved_properties().begin(), reserved_properties().end(), key) != reserved_properties().end()) {
            continue;
        }
        rec.tags[key] = json_scalar_string(value);
    }
    if (props.contains("other_tags") && props["other_tags"].is_string()) {
        for (auto& [key, value] : parse_hstore(props["other_tags"].get<std::string>())) {
            auto& slot = rec.tags[key];
            if (!slot) slot = std::move(value);
        }
    }

    const json geom = f.contains("geometry") ? f["geometry"] : json();
    const std::string gtype = geom.is_object() && geom.contains("type") && geom["type"].is_string()
                                  ? geom["type"].get<std::string>()
                                  : std::string("null");
    rec.feature_type = props.contains("type") && props["type"].is_string() ? props["type"].get<std::string>() : gtype;
    if (gtype != "Polygon" && gtype != "MultiPolygon") {
        return skip(rec.osm_id, "unsupported geometry type " + gtype);
    }
    const json& coords = geom.contains("coordinates") ? geom["coordinates"] : json();
    if (!coords.is_array()) return skip(rec.osm_id, "geometry without coordinates");

    std::vector<json> polygons;
    if (gtype == "Polygon") {
        polygons.push_back(coords);
    } else {
        for (const auto& p : coords) polygons.push_back(p);
    }
    std::size_t holes = 0;
    for (const auto& poly : polygons) {
        if (!poly.is_array() || poly.empty()) continue;
        try {
            rec.rings.push_back(parse_ring(poly[0]));
        } catch (const Error& e) {
            out.diagnostics.push_back({index, rec.osm_id, std::string("ring dropped: ") + e.what()});
        }
        holes += poly.size() - 1;
    }
    if (holes > 0) out.diagnostics.push_back({index, rec.osm_id, std::to_string(holes) + " inner ring(s) dropped"});
    if (rec.rings.empty()) return skip(rec.osm_id, "no valid outer ring");
    return rec;
}

inline void collect_features(const json& doc, std::size_t& next_index, ParseResult& out)
{
    if (doc.is_object() && doc.value("type", json()) == "FeatureCollection") {
        if (!doc.contains("features") || !doc["features"].is_array()) {
            throw Error(ErrorCode::Parse, "FeatureCollection without a features array");
        }
        for (const auto& f : doc["features"]) {
            const std::size_t index = next_index++;
            try {
                if (auto rec = parse_feature(f, index, out)) out.records.push_back(std::move(*rec));
            } catch (const json::exception& e) {
                out.diagnostics.push_back({index, "", std::string("malformed feature: ") + e.what()});
                ++out.skipped;
            }
        }
        return;
    }
    const std::size_t index = next_index++;
    try {
        if (auto rec = parse_feature(doc, index, out)) out.records.push_back(std::move(*rec));
    } catch (const json::exception& e) {
        out.diagnostics.push_back({index, "", std::string("malformed feature: ") + e.what()});
        ++out.skipped;
    }
}

}  // namespace detail

/// Reads a GeoJSON FeatureCollection, a single Feature, or newline-delimited
/// Features. Non-area features and features without an id are skipped with a
/// diagnostic; an unreadable document raises a Parse error naming the line.
inline ParseResult parse_features(std::string_view text)
{
    using nlohmann::json;
    ParseResult out;
    std::size_t next = 0;
    json doc = json::parse(text.begin(), text.end(), nullptr, false);
    if (!doc.is_discarded()) {
        detail::collect_features(doc, next, out);
        return out;
    }
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t end = std::min(text.find('\n', start), text.size());
        ++line_no;
        const std::string_view line = text.substr(start, end - start);
        if (line.find_first_not_of(" \t\r") != std::string_view::npos) {
            json f = json::parse(line.begin(), line.end(), nullptr, false);
            if (f.is_discarded()) {
                throw Error(ErrorCode::Parse, "malformed GeoJSON at line " + std::to_string(line_no) + " (feature "
                                                  + std::to_string(next) + ")");
            }
            detail::collect_features(f, next, out);
        }
        start = end + 1;
    }
    if (next == 0) throw Error(ErrorCode::Parse, "empty or malformed GeoJSON document");
    return out;
}

/// `value` absent means any non-null value; otherwise a glob where * matches
/// any run of characters.
struct CategoryRule {
    std::string key;
    std::optional<std::string> value;
    std::string category;
};

struct CategoryFilter {
    std::vector<CategoryRule> rules;

    static CategoryFilter default_profile()
    {
        return {{
            {"military", std::nullopt, "military"},
            {"aeroway", std::nullopt, "aeroway"},
            {"amenity", "prison", "prison"},
            {"building", "school", "school"},
            {"landuse", "military", "military"},
            {"power", "plant", "power"},
        }};
    }

    /// Rules from JSON: [{"key": "...", "value": "..." | null, "category": "..."}].
    static CategoryFilter from_json(std::string_view text)
    {
        using nlohmann::json;
        const json doc = json::parse(text.begin(), text.end(), nullptr, false);
        if (doc.is_discarded() || !doc.is_array()) throw Error(ErrorCode::Parse, "filter profile must be a JSON array");
        CategoryFilter f;
        for (const auto& r : doc) {
            if (!r.is_object() || !r.contains("key") || !r["key"].is_string() || !r.contains("category")
                || !r["category"].is_string()) {
                throw Error(ErrorCode::Parse, "filter rule needs string key and category");
            }
            CategoryRule rule{r["key"].get<std::string>(), std::nullopt, r["category"].get<std::string>()};
            if (r.contains("value") && r["value"].is_string()) rule.value = r["value"].get<std::string>();
            f.rules.push_back(std::move(rule));
        }
        if (f.rules.empty()) throw Error(ErrorCode::Parse, "filter profile has no rules");
        return f;
    }
};

namespace detail {

inline bool glob_match(std::string_view pattern, std::string_view text)
{
    std::size_t p = 0, t = 0, star = std::string_view::npos, mark = 0;
    while (t < text.size()) {
        if (p < pattern.size() && pattern[p] == '*') {
            star = p++;
            mark = t;
        } else if (p < pattern.size() && pattern[p] == text[t]) {
            ++p;
            ++t;
        } else if (star != std::string_view::npos) {
            p = star + 1;
            t = ++mark;
        } else {
            return false;
        }
    }
    while (p < pattern.size() && pattern[p] == '*') ++p;
    return p == pattern.size();
}

}  // namespace detail

/// First matching rule wins; no match means the feature is not restricted.
inline std::optional<std::string> classify(const FeatureRecord& f, const CategoryFilter& filter)
{
    for (const auto& rule : filter.rules) {
        const auto v = f.tag(rule.key);
        if (!v) continue;
        if (!rule.value || detail::glob_match(*rule.value, *v)) return rule.category;
    }
    return std::nullopt;
}

struct CompileResult {
    CompiledDatabase db;
    std::vector<Diagnostic> diagnostics;
};

namespace detail {

inline constexpr double kFallbackPaddingM = 5.0;

inline GeoPoint coordinate_centroid(std::span<const FeatureRecord> features)
{
    double lat = 0.0, lon = 0.0;
    std::size_t n = 0;
    for (const auto& f : features) {
        for (const auto& ring : f.rings) {
            for (const auto& g : ring) {
                lat += g.lat;
                lon += g.lon;
                ++n;
            }
        }
    }
    if (n == 0) return {0.0, 0.0};
    return {lat / static_cast<double>(n), lon / static_cast<double>(n)};
}

inline Circular fallback_circle(const std::vector<PlanarPoint>& pts)
{
    PlanarPoint c{0.0, 0.0};
    for (const auto& p : pts) c = c + p;
    c = c * (1.0 / static_cast<double>(pts.size()));
    double r = 0.0;
    for (const auto& p : pts) r = std::max(r, distance(c, p));
    return {c, r + kFallbackPaddingM};
}

struct FeatureOutcome {
    std::optional<Zone> zone;
    std::vector<Diagnostic> diagnostics;
};

inline FeatureOutcome compile_feature(const FeatureRecord& f, const std::string& category, const LocalProjection& proj,
                                      const CompileConfig& config)
{
    FeatureOutcome out;
    auto note = [&](std::string reason) { out.diagnostics.push_back({f.index, f.osm_id, std::move(reason)}); };

    std::vector<std::vector<PlanarPoint>> rings;
    std::vector<PlanarPoint> all;
    for (const auto& ring : f.rings) {
        auto& r = rings.emplace_back();
        for (const auto& g : ring) r.push_back(proj.project(g));
        all.insert(all.end(), r.begin(), r.end());
    }

    Zone z;
    z.id = "osm:" + f.osm_id;
    z.name = f.name.value_or("");
    z.category = category;
    z.mode = f.tag("geofence_mode") == std::optional<std::string>("keep-in") ? ZoneMode::KeepIn : ZoneMode::KeepOut;
    z.warning_buffer = config.warning_buffer;
    z.termination_buffer = config.termination_buffer;
    for (const auto& [k, v] : f.tags) {
        if (v) z.properties[k] = *v;
    }

    auto fallback = [&](const std::string& why) {
        note(why + "; compiled as circular fallback");
        z.geometry = fallback_circle(all);
    };

    try {
        const PointSet pts(all);
        switch (config.mode) {
        case GeometryMode::Alpha: {
            const auto tri = delaunay(pts);
            const double alpha = config.alpha ? *config.alpha : auto_alpha(tri);
            auto shape = alpha_shape(tri, alpha);
            if (shape.boundary.empty()) {
                fallback("alpha-shape is empty at alpha " + std::to_string(alpha));
            } else {
                z.geometry = AlphaZone{std::move(shape)};
            }
            break;
        }
        case GeometryMode::Polygonal: {
            Polygonal poly;
            for (const auto& r : rings) {
                try {
                    poly.rings.emplace_back(r);
                } catch (const Error& e) {
                    try {
                        poly.rings.push_back(convex_hull(PointSet(r)));
                        note(std::string("invalid ring replaced by its convex hull: ") + e.what());
                    } catch (const Error&) {
                        note(std::string("degenerate ring dropped: ") + e.what());
                    }
                }
            }
            if (poly.rings.empty()) {
                fallback("no usable polygon ring");
            } else {
                z.geometry = std::move(poly);
            }
            break;
        }
        case GeometryMode::Hull:
            z.geometry = Polygonal{{convex_hull(pts)}};
            break;
        }
    } catch (const Error& e) {
        if (e.code() != ErrorCode::DegenerateInput && e.code() != ErrorCode::InvalidGeometry) throw;
        fallback(std::string("degenerate point set (") + e.what() + ")");
    }
    out.zone = std::move(z);
    return out;
}

inline std::int64_t resolve_timestamp(const CompileConfig& config)
{
    if (config.timestamp) return *config.timestamp;
    if (const char* env = std::getenv("SOURCE_DATE_EPOCH")) {
        char* end = nullptr;
        const long long v = std::strtoll(env, &end, 10);
        if (end != env && *end == '\0') return v;
    }
    return 0;
}

}  // namespace detail

/// Builds the zone database from parsed features. Per-feature problems become
/// diagnostics; output is independent of `config.threads`.
inline CompileResult compile(std::span<const FeatureRecord> features, const CategoryFilter& filter,
                             const CompileConfig& config, std::string source_digest = "")
{
    if (!(config.termination_buffer >= 0.0) || !(config.warning_buffer >= config.termination_buffer)) {
        throw Error(ErrorCode::InvalidInput, "need warning buffer >= termination buffer >= 0");
    }
    if (config.alpha) detail::require_alpha(*config.alpha);

    CompileResult result;
    const LocalProjection proj(detail::coordinate_centroid(features));

    std::vector<std::pair<const FeatureRecord*, std::string>> restricted;
    std::map<std::string, std::size_t> seen_ids;
    for (const auto& f : features) {
        auto category = classify(f, filter);
        if (!category) continue;
        if (seen_ids.contains(f.osm_id)) {
            result.diagnostics.push_back({f.index, f.osm_id, "duplicate osm_id; feature " +
                                                                   std::to_string(seen_ids[f.osm_id]) + " kept"});
            continue;
        }
        seen_ids[f.osm_id] = f.index;
        restricted.emplace_back(&f, std::move(*category));
    }

    std::vector<detail::FeatureOutcome> outcomes(restricted.size());
    unsigned threads = config.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : config.threads;
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(restricted.size(), 1)));
    auto work = [&](std::size_t begin, std::size_t stride) {
        for (std::size_t i = begin; i < restricted.size(); i += stride) {
            const auto& f = *restricted[i].first;
            try {
                outcomes[i] = detail::compile_feature(f, restricted[i].second, proj, config);
            } catch (const std::exception& e) {
                outcomes[i] = {std::nullopt, {{f.index, f.osm_id, std::string("feature not compiled: ") + e.what()}}};
            }
        }
    };
    if (threads <= 1) {
        work(0, 1);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t, threads);
    }

    std::vector<Zone> zones;
    zones.reserve(outcomes.size());
    for (auto& o : outcomes) {
        result.diagnostics.insert(result.diagnostics.end(), o.diagnostics.begin(), o.diagnostics.end());
        if (o.zone) zones.push_back(std::move(*o.zone));
    }
    std::stable_sort(result.diagnostics.begin(), result.diagnostics.end(),
                     [](const Diagnostic& a, const Diagnostic& b) { return a.feature_index < b.feature_index; });

    auto& db = result.db;
    db.projection = proj;
    db.compile_config = config;
    db.provenance = {std::move(source_digest), detail::resolve_timestamp(config)};
    db.set_zones(std::move(zones));
    return result;
}

}  // namespace geofence
