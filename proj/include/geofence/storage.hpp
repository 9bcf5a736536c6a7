#pragma once

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include <json.hpp>
#include <openssl/evp.h>

#include "geofence/database.hpp"

namespace geofence {

inline std::string sha256_hex(std::string_view data)
{
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md.data(), &len, EVP_sha256(), nullptr) != 1) {
        throw Error(ErrorCode::Integrity, "sha256 computation failed");
    }
    std::string hex;
    hex.reserve(len * 2);
    char buf[3];
    for (unsigned int i = 0; i < len; ++i) {
        std::snprintf(buf, sizeof buf, "%02x", md[i]);
        hex += buf;
    }
    return hex;
}

namespace detail {

using nlohmann::json;

inline json point_json(PlanarPoint p) { return json::array({p.x, p.y}); }

inline json ring_json(const Polygon& poly)
{
    json r = json::array();
    for (const auto& v : poly.vertices()) r.push_back(point_json(v));
    return r;
}

inline PlanarPoint point_from(const json& j)
{
    if (!j.is_array() || j.size() != 2) throw Error(ErrorCode::Integrity, "point must be [x, y]");
    return {j.at(0).get<double>(), j.at(1).get<double>()};
}

inline std::vector<Polygon> rings_from(const json& j)
{
    std::vector<Polygon> rings;
    for (const auto& r : j) {
        std::vector<PlanarPoint> v;
        for (const auto& p : r) v.push_back(point_from(p));
        rings.emplace_back(std::move(v));
    }
    return rings;
}

inline json geometry_json(const ZoneGeometry& g)
{
    return std::visit(
        [](const auto& x) -> json {
            using G = std::decay_t<decltype(x)>;
            json out;
            if constexpr (std::is_same_v<G, Polygonal>) {
                out["type"] = "polygonal";
                out["rings"] = json::array();
                for (const auto& r : x.rings) out["rings"].push_back(ring_json(r));
            } else if constexpr (std::is_same_v<G, AlphaZone>) {
                out["type"] = "alpha";
                out["alpha"] = x.shape.alpha;
                out["boundary"] = json::array();
                for (const auto& r : x.shape.boundary) out["boundary"].push_back(ring_json(r));
                out["source"] = json::array();
                for (const auto& p : x.shape.source.points()) out["source"].push_back(point_json(p));
                out["complex"] = json::array();
                for (const auto& t : x.shape.complex) out["complex"].push_back(json::array({t[0], t[1], t[2]}));
            } else if constexpr (std::is_same_v<G, Circular>) {
                out["type"] = "circular";
                out["center"] = point_json(x.center);
                out["radius"] = x.radius;
            } else if constexpr (std::is_same_v<G, Spherical>) {
                out["type"] = "spherical";
                out["center"] = point_json(x.center);
                out["center_alt"] = x.center_alt;
                out["radius"] = x.radius;
            } else if constexpr (std::is_same_v<G, Cylindrical>) {
                out["type"] = "cylindrical";
                out["center"] = point_json(x.center);
                out["radius"] = x.radius;
                out["alt_min"] = x.alt_min;
                out["alt_max"] = x.alt_max;
            } else {
                out["type"] = "elliptical";
                out["center"] = point_json(x.center);
                out["semi_major"] = x.semi_major;
                out["semi_minor"] = x.semi_minor;
                out["heading"] = x.heading;
            }
            return out;
        },
        g);
}

inline ZoneGeometry geometry_from(const json& j)
{
    const auto type = j.at("type").get<std::string>();
    if (type == "polygonal") return Polygonal{rings_from(j.at("rings"))};
    if (type == "alpha") {
        AlphaShape s;
        s.alpha = j.at("alpha").get<double>();
        s.boundary = rings_from(j.at("boundary"));
        std::vector<PlanarPoint> src;
        for (const auto& p : j.at("source")) src.push_back(point_from(p));
        s.source = PointSet(src);
        for (const auto& t : j.at("complex")) {
            s.complex.push_back({t.at(0).get<std::size_t>(), t.at(1).get<std::size_t>(), t.at(2).get<std::size_t>()});
        }
        return AlphaZone{std::move(s)};
    }
    const PlanarPoint c = point_from(j.at("center"));
    if (type == "circular") return Circular{c, j.at("radius").get<double>()};
    if (type == "spherical") return Spherical{c, j.at("center_alt").get<double>(), j.at("radius").get<double>()};
    if (type == "cylindrical") {
        return Cylindrical{c, j.at("radius").get<double>(), j.at("alt_min").get<double>(), j.at("alt_max").get<double>()};
    }
    if (type == "elliptical") {
        return Elliptical{c, j.at("semi_major").get<double>(), j.at("semi_minor").get<double>(),
                          j.at("heading").get<double>()};
    }
    throw Error(ErrorCode::Integrity, "unknown geometry type " + type);
}

inline json zone_json(const Zone& z)
{
    return {{"id", z.id},
            {"name", z.name},
            {"category", z.category},
            {"mode", std::string(to_string(z.mode))},
            {"geometry", geometry_json(z.geometry)},
            {"warning_buffer", z.warning_buffer},
            {"termination_buffer", z.termination_buffer},
            {"dynamic", z.dynamic},
            {"difficulty", z.difficulty},
            {"properties", z.properties}};
}

inline Zone zone_from(const json& j)
{
    Zone z;
    z.id = j.at("id").get<std::string>();
    z.name = j.at("name").get<std::string>();
    z.category = j.at("category").get<std::string>();
    const auto mode = parse_zone_mode(j.at("mode").get<std::string>());
    if (!mode) throw Error(ErrorCode::Integrity, "unknown zone mode");
    z.mode = *mode;
    z.geometry = geometry_from(j.at("geometry"));
    z.warning_buffer = j.at("warning_buffer").get<double>();
    z.termination_buffer = j.at("termination_buffer").get<double>();
    z.dynamic = j.at("dynamic").get<bool>();
    z.difficulty = j.at("difficulty").get<double>();
    z.properties = j.at("properties").get<std::map<std::string, std::string>>();
    return z;
}

inline json body_json(const CompiledDatabase& db)
{
    json zones = json::array();
    for (const auto& z : db.zones()) zones.push_back(zone_json(z));
    const auto& cfg = db.compile_config;
    return {{"format_version", db.format_version},
            {"projection", {{"origin_lat", db.projection.origin().lat}, {"origin_lon", db.projection.origin().lon}}},
            {"compile_config",
             {{"mode", std::string(to_string(cfg.mode))},
              {"alpha", cfg.alpha ? json(*cfg.alpha) : json("auto")},
              {"warning_buffer", cfg.warning_buffer},
              {"termination_buffer", cfg.termination_buffer}}},
            {"provenance", {{"source_digest", db.provenance.source_digest}, {"timestamp", db.provenance.timestamp}}},
            {"zones", std::move(zones)}};
}

}  // namespace detail

/// Canonical document: sorted keys, two-space indentation, trailing newline;
/// `sha256` covers the compact serialization of every other member.
inline std::string save(const CompiledDatabase& db)
{
    auto doc = detail::body_json(db);
    doc["sha256"] = sha256_hex(doc.dump());
    return doc.dump(2) + "\n";
}

/// Inverse of save. Any byte that differs from the canonical form yields an
/// Integrity error; a verified document of another format version yields a
/// Version error.
inline CompiledDatabase load(std::string_view bytes)
{
    using nlohmann::json;
    json doc = json::parse(bytes.begin(), bytes.end(), nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) throw Error(ErrorCode::Integrity, "database is not valid JSON");
    if (!doc.contains("sha256") || !doc["sha256"].is_string()) throw Error(ErrorCode::Integrity, "missing digest");
    const auto digest = doc["sha256"].get<std::string>();
    doc.erase("sha256");
    if (sha256_hex(doc.dump()) != digest) throw Error(ErrorCode::Integrity, "digest mismatch");
    {
        json canonical = doc;
        canonical["sha256"] = digest;
        if (canonical.dump(2) + "\n" != bytes) throw Error(ErrorCode::Integrity, "document is not in canonical form");
    }
    if (!doc.contains("format_version") || !doc["format_version"].is_number_integer()) {
        throw Error(ErrorCode::Integrity, "missing format_version");
    }
    const auto version = doc["format_version"].get<std::int64_t>();
    if (version != kFormatVersion) {
        throw Error(ErrorCode::Version, "unsupported database format_version " + std::to_string(version));
    }
    try {
        CompiledDatabase db;
        db.format_version = static_cast<int>(version);
        const auto& proj = doc.at("projection");
        db.projection = LocalProjection({proj.at("origin_lat").get<double>(), proj.at("origin_lon").get<double>()});
        const auto& cfg = doc.at("compile_config");
        const auto mode = parse_geometry_mode(cfg.at("mode").get<std::string>());
        if (!mode) throw Error(ErrorCode::Integrity, "unknown compile mode");
        db.compile_config.mode = *mode;
        if (cfg.at("alpha").is_number()) db.compile_config.alpha = cfg.at("alpha").get<double>();
        db.compile_config.warning_buffer = cfg.at("warning_buffer").get<double>();
        db.compile_config.termination_buffer = cfg.at("termination_buffer").get<double>();
        db.provenance.source_digest = doc.at("provenance").at("source_digest").get<std::string>();
        db.provenance.timestamp = doc.at("provenance").at("timestamp").get<std::int64_t>();
        std::vector<Zone> zones;
        for (const auto& z : doc.at("zones")) zones.push_back(detail::zone_from(z));
        db.set_zones(std::move(zones));
        return db;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::Integrity, std::string("malformed database: ") + e.what());
    } catch (const Error& e) {
        if (e.code() == ErrorCode::Integrity) throw;
        throw Error(ErrorCode::Integrity, std::string("invalid database content: ") + e.what());
    }
}

inline std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, std::string_view data)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw Error(ErrorCode::Io, "write failed for " + path);
}

inline CompiledDatabase load_file(const std::string& path) { return load(read_file(path)); }

}  // namespace geofence
