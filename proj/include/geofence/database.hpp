#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "geofence/zone.hpp"

namespace geofence {

inline constexpr int kFormatVersion = 1;
inline constexpr double kMinCoverageRadiusM = 50'000.0;
inline constexpr double kCoverageMarginM = 10'000.0;

enum class GeometryMode { Alpha, Polygonal, Hull };

constexpr std::string_view to_string(GeometryMode m) noexcept
{
    switch (m) {
    case GeometryMode::Alpha: return "alpha";
    case GeometryMode::Polygonal: return "polygonal";
    case GeometryMode::Hull: return "hull";
    }
    return "alpha";
}

inline std::optional<GeometryMode> parse_geometry_mode(std::string_view s)
{
    if (s == "alpha") return GeometryMode::Alpha;
    if (s == "polygonal") return GeometryMode::Polygonal;
    if (s == "hull") return GeometryMode::Hull;
    return std::nullopt;
}

struct CompileConfig {
    GeometryMode mode = GeometryMode::Alpha;
    /// Fixed alpha (1/m); absent selects auto_alpha per feature.
    std::optional<double> alpha;
    double warning_buffer = kDefaultWarningBufferM;
    double termination_buffer = kDefaultTerminationBufferM;
    /// Worker threads for per-feature compilation; 0 uses hardware concurrency.
    unsigned threads = 1;
    /// Provenance timestamp override (seconds since epoch).
    std::optional<std::int64_t> timestamp;

    friend bool operator==(const CompileConfig& a, const CompileConfig& b)
    {
        // threads and the timestamp override do not affect the artifact's meaning
        return a.mode == b.mode && a.alpha == b.alpha && a.warning_buffer == b.warning_buffer
               && a.termination_buffer == b.termination_buffer;
    }
};

struct Provenance {
    std::string source_digest;
    std::int64_t timestamp = 0;
    friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct EvaluationReport {
    ViolationStatus worst = ViolationStatus::Clear;
    /// Non-Clear results ordered by zone id.
    std::vector<EvaluationResult> results;
    bool out_of_coverage = false;
};

struct EvaluateOptions {
    bool use_index = true;
};

/// Precomputed zone repository with a uniform-grid index over keep-out zones.
/// Readers may share one instance across threads; mutation (zone replacement,
/// dynamic zones) needs exclusive access.
class CompiledDatabase {
public:
    int format_version = kFormatVersion;
    LocalProjection projection{GeoPoint{0.0, 0.0}};
    CompileConfig compile_config;
    Provenance provenance;

    CompiledDatabase() = default;
    CompiledDatabase(LocalProjection proj, std::vector<Zone> zones) : projection(proj) { set_zones(std::move(zones)); }

    [[nodiscard]] const std::vector<Zone>& zones() const noexcept { return zones_; }
    [[nodiscard]] bool empty() const noexcept { return zones_.empty(); }
    [[nodiscard]] double coverage_radius() const noexcept { return coverage_radius_; }

    /// Replaces all zones. Zones are validated and sorted by id; ids must be unique.
    void set_zones(std::vector<Zone> zones)
    {
        for (const auto& z : zones) validate_zone(z);
        std::sort(zones.begin(), zones.end(), [](const Zone& a, const Zone& b) { return a.id < b.id; });
        for (std::size_t i = 1; i < zones.size(); ++i) {
            if (zones[i].id == zones[i - 1].id) throw Error(ErrorCode::InvalidInput, "duplicate zone id " + zones[i].id);
        }
        zones_ = std::move(zones);
        rebuild_index();
    }

    [[nodiscard]] const Zone* find(std::string_view id) const
    {
        const auto it = std::lower_bound(zones_.begin(), zones_.end(), id,
                                         [](const Zone& z, std::string_view key) { return z.id < key; });
        return it != zones_.end() && it->id == id ? &*it : nullptr;
    }

    /// Inserts a spherical keep-out zone of radius `r` around another UAV.
    std::string add_dynamic_zone(const GeoPoint& other_uav, double r)
    {
        require_valid(other_uav);
        if (!(r > 0.0) || !std::isfinite(r)) throw Error(ErrorCode::InvalidInput, "dynamic zone radius must be > 0");
        std::string id;
        do {
            id = "dyn:" + std::to_string(++dynamic_counter_);
        } while (find(id));
        Zone z;
        z.id = id;
        z.name = "uav proximity";
        z.category = "dynamic";
        z.mode = ZoneMode::KeepOut;
        z.dynamic = true;
        z.warning_buffer = compile_config.warning_buffer;
        z.termination_buffer = compile_config.termination_buffer;
        z.geometry = Spherical{projection.project(other_uav), other_uav.alt.value_or(0.0), r};
        auto zones = zones_;
        zones.push_back(std::move(z));
        set_zones(std::move(zones));
        return id;
    }

    bool remove_zone(std::string_view id)
    {
        const auto it = std::find_if(zones_.begin(), zones_.end(), [&](const Zone& z) { return z.id == id; });
        if (it == zones_.end()) return false;
        zones_.erase(it);
        rebuild_index();
        return true;
    }

    [[nodiscard]] bool in_coverage(PlanarPoint p) const noexcept
    {
        return zones_.empty() || norm(p) <= coverage_radius_;
    }

    [[nodiscard]] EvaluationReport evaluate_all(const GeoPoint& p, EvaluateOptions options = {}) const
    {
        require_valid(p);
        return evaluate_planar(projection.project(p), p.alt, options);
    }

    /// Same as evaluate_all for an already projected position. Queries without
    /// altitude use the horizontal footprint of volumetric zones.
    [[nodiscard]] EvaluationReport evaluate_planar(PlanarPoint p, std::optional<double> alt,
                                                   EvaluateOptions options = {}) const
    {
        EvaluationReport report;
        if (!in_coverage(p)) {
            report.out_of_coverage = true;
            return report;
        }
        auto consider = [&](const Zone& z) {
            auto r = evaluate(z, p, alt, AltitudePolicy::Footprint);
            if (r.status == ViolationStatus::Clear) return;
            report.worst = std::max(report.worst, r.status);
            report.results.push_back(std::move(r));
        };
        if (!options.use_index) {
            for (const auto& z : zones_) consider(z);
            return report;
        }
        for (const std::size_t i : always_) consider(zones_[i]);
        if (cell_size_ > 0.0) {
            const auto it = grid_.find(key(cell(p.x), cell(p.y)));
            if (it != grid_.end()) {
                for (const std::size_t i : it->second) {
                    const auto& z = zones_[i];
                    if (distance(p, reach_[i].center) <= reach_[i].radius) consider(z);
                }
            }
        }
        std::sort(report.results.begin(), report.results.end(),
                  [](const EvaluationResult& a, const EvaluationResult& b) { return a.zone_id < b.zone_id; });
        return report;
    }

    friend bool operator==(const CompiledDatabase& a, const CompiledDatabase& b)
    {
        return a.format_version == b.format_version && a.projection == b.projection
               && a.compile_config == b.compile_config && a.provenance == b.provenance && a.zones_ == b.zones_;
    }

private:
    static std::uint64_t key(std::int64_t x, std::int64_t y)
    {
        return (static_cast<std::uint64_t>(x) << 32) ^ (static_cast<std::uint64_t>(y) & 0xffffffffull);
    }
    [[nodiscard]] std::int64_t cell(double v) const { return static_cast<std::int64_t>(std::floor(v / cell_size_)); }

    void rebuild_index()
    {
        grid_.clear();
        always_.clear();
        reach_.assign(zones_.size(), {});
        cell_size_ = 0.0;
        double farthest = 0.0;
        std::vector<double> extents;
        for (std::size_t i = 0; i < zones_.size(); ++i) {
            const auto bc = bounding_circle(zones_[i]);
            // Outside this disk a keep-out zone is Clear for every altitude.
            reach_[i] = {bc.center, bc.radius + zones_[i].warning_buffer + 1e-6};
            farthest = std::max(farthest, norm(bc.center) + reach_[i].radius);
            if (zones_[i].mode == ZoneMode::KeepOut && !zones_[i].dynamic) extents.push_back(2.0 * reach_[i].radius);
        }
        coverage_radius_ = std::max(kMinCoverageRadiusM, farthest + kCoverageMarginM);

        // Very large zones would inflate the cell size for everyone; they are
        // checked on every query instead.
        double limit = std::numeric_limits<double>::infinity();
        if (!extents.empty()) {
            auto sorted = extents;
            std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(sorted.size() / 2), sorted.end());
            limit = 16.0 * sorted[sorted.size() / 2];
        }
        for (std::size_t i = 0; i < zones_.size(); ++i) {
            const auto& z = zones_[i];
            if (z.mode == ZoneMode::KeepOut && !z.dynamic && 2.0 * reach_[i].radius <= limit) {
                cell_size_ = std::max(cell_size_, 2.0 * reach_[i].radius);
            }
        }
        for (std::size_t i = 0; i < zones_.size(); ++i) {
            const auto& z = zones_[i];
            if (z.mode != ZoneMode::KeepOut || z.dynamic || 2.0 * reach_[i].radius > limit || cell_size_ <= 0.0) {
                always_.push_back(i);
                continue;
            }
            const auto& r = reach_[i];
            for (auto x = cell(r.center.x - r.radius); x <= cell(r.center.x + r.radius); ++x) {
                for (auto y = cell(r.center.y - r.radius); y <= cell(r.center.y + r.radius); ++y) {
                    grid_[key(x, y)].push_back(i);
                }
            }
        }
    }

    std::vector<Zone> zones_;
    std::vector<BoundingCircle> reach_;
    std::vector<std::size_t> always_;
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> grid_;
    double cell_size_ = 0.0;
    double coverage_radius_ = kMinCoverageRadiusM;
    std::uint64_t dynamic_counter_ = 0;
};

}  // namespace geofence
