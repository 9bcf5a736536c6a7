#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "geofence/alphashape.hpp"
#include "geofence/geo.hpp"

namespace geofence {

inline constexpr double kDefaultWarningBufferM = 50.0;
inline constexpr double kDefaultTerminationBufferM = 20.0;

enum class ZoneMode { KeepIn, KeepOut };

constexpr std::string_view to_string(ZoneMode m) noexcept
{
    return m == ZoneMode::KeepIn ? "keep-in" : "keep-out";
}

inline std::optional<ZoneMode> parse_zone_mode(std::string_view s)
{
    if (s == "keep-in") return ZoneMode::KeepIn;
    if (s == "keep-out") return ZoneMode::KeepOut;
    return std::nullopt;
}

struct Polygonal {
    std::vector<Polygon> rings;
    friend bool operator==(const Polygonal&, const Polygonal&) = default;
};

struct AlphaZone {
    AlphaShape shape;
    friend bool operator==(const AlphaZone& a, const AlphaZone& b)
    {
        return a.shape.alpha == b.shape.alpha && a.shape.boundary == b.shape.boundary
               && a.shape.source == b.shape.source;
    }
};

struct Circular {
    PlanarPoint center;
    double radius = 0.0;
    friend bool operator==(const Circular&, const Circular&) = default;
};

struct Spherical {
    PlanarPoint center;
    double center_alt = 0.0;
    double radius = 0.0;
    friend bool operator==(const Spherical&, const Spherical&) = default;
};

struct Cylindrical {
    PlanarPoint center;
    double radius = 0.0;
    double alt_min = 0.0;
    double alt_max = 0.0;
    friend bool operator==(const Cylindrical&, const Cylindrical&) = default;
};

/// `heading` is the direction of the semi-major axis in degrees,
/// counter-clockwise from east.
struct Elliptical {
    PlanarPoint center;
    double semi_major = 0.0;
    double semi_minor = 0.0;
    double heading = 0.0;
    friend bool operator==(const Elliptical&, const Elliptical&) = default;
};

using ZoneGeometry = std::variant<Polygonal, AlphaZone, Circular, Spherical, Cylindrical, Elliptical>;

struct Zone {
    std::string id;
    std::string name;
    std::string category;
    ZoneMode mode = ZoneMode::KeepOut;
    ZoneGeometry geometry;
    double warning_buffer = kDefaultWarningBufferM;
    double termination_buffer = kDefaultTerminationBufferM;
    bool dynamic = false;
    /// Corridor edge weight multiplier near this zone (1 = plain length).
    double difficulty = 1.0;
    /// Free-form restrictions carried through from the source; not interpreted.
    std::map<std::string, std::string> properties;

    friend bool operator==(const Zone&, const Zone&) = default;
};

enum class ViolationStatus { Clear = 0, Warning = 1, Terminate = 2, Violation = 3 };

constexpr std::string_view to_string(ViolationStatus s) noexcept
{
    switch (s) {
    case ViolationStatus::Clear: return "Clear";
    case ViolationStatus::Warning: return "Warning";
    case ViolationStatus::Terminate: return "Terminate";
    case ViolationStatus::Violation: return "Violation";
    }
    return "Clear";
}

constexpr auto operator<=>(ViolationStatus a, ViolationStatus b) noexcept
{
    return static_cast<int>(a) <=> static_cast<int>(b);
}

/// `signed_distance` is the zone's own signed distance (negative inside the
/// zone geometry) for both keep-in and keep-out zones.
struct EvaluationResult {
    std::string zone_id;
    ViolationStatus status = ViolationStatus::Clear;
    double signed_distance = 0.0;

    friend bool operator==(const EvaluationResult&, const EvaluationResult&) = default;
};

/// How altitude-dependent geometries treat a query without altitude.
enum class AltitudePolicy {
    Require,    // missing altitude is an error
    Footprint,  // fall back to the horizontal footprint (sphere/cylinder -> disk)
};

/// Coarse enclosing circle in the plane.
struct BoundingCircle {
    PlanarPoint center;
    double radius = 0.0;
};

namespace detail {

inline constexpr double kTiny = std::numeric_limits<double>::min();

inline void require_positive(double v, const char* what)
{
    if (!std::isfinite(v) || v <= 0.0) {
        throw Error(ErrorCode::InvalidGeometry, std::string(what) + " must be finite and > 0");
    }
}

struct EllipseFrame {
    double x = 0.0;
    double y = 0.0;
};

inline EllipseFrame to_ellipse_frame(const Elliptical& e, PlanarPoint p)
{
    const double t = e.heading * kDegToRad;
    const PlanarPoint d = p - e.center;
    return {d.x * std::cos(t) + d.y * std::sin(t), -d.x * std::sin(t) + d.y * std::cos(t)};
}

inline bool ellipse_contains(const Elliptical& e, PlanarPoint p)
{
    const auto q = to_ellipse_frame(e, p);
    const double u = q.x / e.semi_major, v = q.y / e.semi_minor;
    return u * u + v * v <= 1.0;
}

/// Distance from p to the ellipse curve: 64 boundary samples, then a
/// golden-section refinement around the best sample.
inline double ellipse_boundary_distance(const Elliptical& e, PlanarPoint p)
{
    const auto q = to_ellipse_frame(e, p);
    auto dist_at = [&](double t) {
        return std::hypot(q.x - e.semi_major * std::cos(t), q.y - e.semi_minor * std::sin(t));
    };
    constexpr int kSamples = 64;
    const double step = 2.0 * std::numbers::pi / kSamples;
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (int k = 0; k < kSamples; ++k) {
        const double d = dist_at(k * step);
        if (d < best_d) {
            best_d = d;
            best = k;
        }
    }
    constexpr double kInvPhi = 0.6180339887498949;
    double lo = (best - 1) * step, hi = (best + 1) * step;
    double x1 = hi - kInvPhi * (hi - lo), x2 = lo + kInvPhi * (hi - lo);
    double f1 = dist_at(x1), f2 = dist_at(x2);
    for (int i = 0; i < 60; ++i) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - kInvPhi * (hi - lo);
            f1 = dist_at(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + kInvPhi * (hi - lo);
            f2 = dist_at(x2);
        }
    }
    return std::min({best_d, f1, f2});
}

inline double rings_signed_distance(const std::vector<Polygon>& rings, PlanarPoint p)
{
    double best = std::numeric_limits<double>::infinity();
    for (const auto& ring : rings) best = std::min(best, point_to_polygon_distance(p, ring));
    return best;
}

inline const std::vector<Polygon>& rings_of(const ZoneGeometry& g)
{
    if (const auto* poly = std::get_if<Polygonal>(&g)) return poly->rings;
    return std::get<AlphaZone>(g).shape.boundary;
}

inline bool is_ring_geometry(const ZoneGeometry& g)
{
    return std::holds_alternative<Polygonal>(g) || std::holds_alternative<AlphaZone>(g);
}

inline std::optional<double> resolve_altitude(std::optional<double> alt, AltitudePolicy policy)
{
    if (!alt && policy == AltitudePolicy::Require) {
        throw Error(ErrorCode::MissingDimension, "altitude required for an altitude-dependent zone");
    }
    return alt;
}

}  // namespace detail

inline void validate_zone(const Zone& z)
{
    if (z.id.empty()) throw Error(ErrorCode::InvalidInput, "zone id must not be empty");
    if (!(z.termination_buffer >= 0.0) || !(z.warning_buffer >= z.termination_buffer)
        || !std::isfinite(z.warning_buffer)) {
        throw Error(ErrorCode::InvalidInput, "zone " + z.id + ": need warning >= termination >= 0");
    }
    if (!(z.difficulty >= 1.0) || !std::isfinite(z.difficulty)) {
        throw Error(ErrorCode::InvalidInput, "zone " + z.id + ": difficulty must be >= 1");
    }
    std::visit(
        [&](const auto& g) {
            using G = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<G, Polygonal>) {
                if (g.rings.empty()) throw Error(ErrorCode::InvalidGeometry, "polygonal zone without rings");
            } else if constexpr (std::is_same_v<G, AlphaZone>) {
                if (g.shape.boundary.empty()) throw Error(ErrorCode::InvalidGeometry, "alpha zone without boundary");
            } else if constexpr (std::is_same_v<G, Circular> || std::is_same_v<G, Spherical>) {
                detail::require_positive(g.radius, "radius");
            } else if constexpr (std::is_same_v<G, Cylindrical>) {
                detail::require_positive(g.radius, "radius");
                if (!(g.alt_min < g.alt_max)) throw Error(ErrorCode::InvalidGeometry, "cylinder needs alt_min < alt_max");
            } else {
                detail::require_positive(g.semi_minor, "semi-minor axis");
                if (!(g.semi_major >= g.semi_minor) || !std::isfinite(g.semi_major)) {
                    throw Error(ErrorCode::InvalidGeometry, "ellipse needs semi_major >= semi_minor");
                }
            }
        },
        z.geometry);
    if (z.dynamic && !std::holds_alternative<Spherical>(z.geometry)
        && !std::holds_alternative<Circular>(z.geometry)) {
        throw Error(ErrorCode::InvalidGeometry, "dynamic zones must be spherical or circular");
    }
}

/// Signed distance to the zone boundary, negative inside the zone volume.
/// Cylinders combine radial and vertical distances with max(); ellipses use a
/// sampled boundary distance (error well below 0.1% of the semi-minor axis).
inline double signed_distance(const Zone& z, PlanarPoint p, std::optional<double> alt = std::nullopt,
                              AltitudePolicy policy = AltitudePolicy::Require)
{
    return std::visit(
        [&](const auto& g) -> double {
            using G = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<G, Polygonal>) {
                return detail::rings_signed_distance(g.rings, p);
            } else if constexpr (std::is_same_v<G, AlphaZone>) {
                return detail::rings_signed_distance(g.shape.boundary, p);
            } else if constexpr (std::is_same_v<G, Circular>) {
                return distance(p, g.center) - g.radius;
            } else if constexpr (std::is_same_v<G, Spherical>) {
                const auto a = detail::resolve_altitude(alt, policy);
                const double dz = a ? *a - g.center_alt : 0.0;
                const PlanarPoint d = p - g.center;
                return std::sqrt(d.x * d.x + d.y * d.y + dz * dz) - g.radius;
            } else if constexpr (std::is_same_v<G, Cylindrical>) {
                const auto a = detail::resolve_altitude(alt, policy);
                const double radial = distance(p, g.center) - g.radius;
                if (!a) return radial;
                return std::max(radial, std::max(g.alt_min - *a, *a - g.alt_max));
            } else {
                const double d = detail::ellipse_boundary_distance(g, p);
                return detail::ellipse_contains(g, p) ? -d : std::max(d, detail::kTiny);
            }
        },
        z.geometry);
}

/// Membership in the zone geometry; the boundary counts as inside.
inline bool contains(const Zone& z, PlanarPoint p, std::optional<double> alt = std::nullopt,
                     AltitudePolicy policy = AltitudePolicy::Require)
{
    return std::visit(
        [&](const auto& g) -> bool {
            using G = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<G, Polygonal> || std::is_same_v<G, AlphaZone>) {
                for (const auto& ring : detail::rings_of(z.geometry)) {
                    if (point_in_polygon(p, ring)) return true;
                }
                return false;
            } else if constexpr (std::is_same_v<G, Elliptical>) {
                return detail::ellipse_contains(g, p);
            } else if constexpr (std::is_same_v<G, Cylindrical>) {
                const auto a = detail::resolve_altitude(alt, policy);
                return distance(p, g.center) <= g.radius && (!a || (*a >= g.alt_min && *a <= g.alt_max));
            } else {
                return signed_distance(z, p, alt, policy) <= 0.0;
            }
        },
        z.geometry);
}

inline ViolationStatus status_for(const Zone& z, double s) noexcept
{
    if (z.mode == ZoneMode::KeepOut) {
        if (s <= 0.0) return ViolationStatus::Violation;
        if (s <= z.termination_buffer) return ViolationStatus::Terminate;
        if (s <= z.warning_buffer) return ViolationStatus::Warning;
        return ViolationStatus::Clear;
    }
    if (s > 0.0) return ViolationStatus::Violation;
    const double depth = -s;
    if (depth <= z.termination_buffer) return ViolationStatus::Terminate;
    if (depth <= z.warning_buffer) return ViolationStatus::Warning;
    return ViolationStatus::Clear;
}

/// Layered status: keep-out zones escalate Warning -> Terminate -> Violation
/// as the point approaches and enters; keep-in zones mirror this near the
/// inside of their boundary and report Violation outside.
inline EvaluationResult evaluate(const Zone& z, PlanarPoint p, std::optional<double> alt = std::nullopt,
                                 AltitudePolicy policy = AltitudePolicy::Require)
{
    const double s = signed_distance(z, p, alt, policy);
    return {z.id, status_for(z, s), s};
}

inline BoundingCircle bounding_circle(const Zone& z)
{
    return std::visit(
        [&](const auto& g) -> BoundingCircle {
            using G = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<G, Polygonal> || std::is_same_v<G, AlphaZone>) {
                const auto& rings = detail::rings_of(z.geometry);
                PlanarPoint lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
                PlanarPoint hi{-lo.x, -lo.y};
                for (const auto& ring : rings) {
                    for (const auto& v : ring.vertices()) {
                        lo = {std::min(lo.x, v.x), std::min(lo.y, v.y)};
                        hi = {std::max(hi.x, v.x), std::max(hi.y, v.y)};
                    }
                }
                const PlanarPoint c{(lo.x + hi.x) / 2.0, (lo.y + hi.y) / 2.0};
                double r = 0.0;
                for (const auto& ring : rings) {
                    for (const auto& v : ring.vertices()) r = std::max(r, distance(c, v));
                }
                return {c, r};
            } else if constexpr (std::is_same_v<G, Elliptical>) {
                return {g.center, g.semi_major};
            } else {
                return {g.center, g.radius};
            }
        },
        z.geometry);
}

namespace detail {

/// Lower bound on the zone's 2-D signed distance along [a, b]; strictly
/// negative whenever the segment touches the zone footprint.
inline double segment_min_signed_distance(const Zone& z, PlanarPoint a, PlanarPoint b)
{
    return std::visit(
        [&](const auto& g) -> double {
            using G = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<G, Polygonal> || std::is_same_v<G, AlphaZone>) {
                double best = std::numeric_limits<double>::infinity();
                for (const auto& ring : rings_of(z.geometry)) {
                    const auto rel = relate_segment(a, b, ring);
                    if (rel.touches_region) {
                        best = std::min({best, point_to_polygon_distance(a, ring),
                                         point_to_polygon_distance(b, ring), -kTiny});
                    } else {
                        best = std::min(best, rel.boundary_distance);
                    }
                }
                return best;
            } else if constexpr (std::is_same_v<G, Elliptical>) {
                const double len = distance(a, b);
                const double h = std::min(g.semi_minor / 8.0, std::max(len / 4096.0, 0.05));
                const int n = std::max(1, static_cast<int>(std::ceil(len / h)));
                const double spacing = len / n;
                double best = std::numeric_limits<double>::infinity();
                for (int i = 0; i <= n; ++i) {
                    best = std::min(best, signed_distance(z, a + (b - a) * (static_cast<double>(i) / n)));
                }
                // signed distance is 1-Lipschitz
                return best - spacing / 2.0;
            } else {
                const double d = point_segment_distance(g.center, a, b) - g.radius;
                return d <= 0.0 ? std::min(d, -kTiny) : d;
            }
        },
        z.geometry);
}

/// Upper bound on the zone's 2-D signed distance along [a, b] (used for
/// keep-in containment of a segment).
inline double segment_max_signed_distance(const Zone& z, PlanarPoint a, PlanarPoint b)
{
    return std::visit(
        [&](const auto& g) -> double {
            using G = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<G, Polygonal> || std::is_same_v<G, AlphaZone>) {
                double best = std::numeric_limits<double>::infinity();
                for (const auto& ring : rings_of(z.geometry)) {
                    const auto rel = relate_segment(a, b, ring);
                    if (rel.inside_entirely) best = std::min(best, -rel.boundary_distance);
                }
                if (std::isfinite(best)) return best;
                return std::max({signed_distance(z, a), signed_distance(z, b), kTiny});
            } else if constexpr (std::is_same_v<G, Elliptical>) {
                const double len = distance(a, b);
                const double h = std::min(g.semi_minor / 8.0, std::max(len / 4096.0, 0.05));
                const int n = std::max(1, static_cast<int>(std::ceil(len / h)));
                const double spacing = len / n;
                double worst = -std::numeric_limits<double>::infinity();
                for (int i = 0; i <= n; ++i) {
                    worst = std::max(worst, signed_distance(z, a + (b - a) * (static_cast<double>(i) / n)));
                }
                return worst + spacing / 2.0;
            } else {
                // distance to a disk centre is convex along a segment
                return std::max(distance(a, g.center), distance(b, g.center)) - g.radius;
            }
        },
        z.geometry);
}

}  // namespace detail

/// Margin by which segment [a, b] stays clear of the zone in the plane:
/// distance outside a keep-out footprint, depth inside a keep-in footprint.
/// Negative when the segment violates the zone; only the sign is meaningful then.
inline double segment_margin(const Zone& z, PlanarPoint a, PlanarPoint b)
{
    if (z.mode == ZoneMode::KeepOut) return detail::segment_min_signed_distance(z, a, b);
    return -detail::segment_max_signed_distance(z, a, b);
}

/// Same measure for a single point (2-D footprint).
inline double point_margin(const Zone& z, PlanarPoint p)
{
    const double s = signed_distance(z, p, std::nullopt, AltitudePolicy::Footprint);
    return z.mode == ZoneMode::KeepOut ? s : -s;
}

}  // namespace geofence
