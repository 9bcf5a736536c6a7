#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "geofence/error.hpp"
#include "geofence/predicates.hpp"

namespace geofence {

inline constexpr double kEarthRadiusM = 6'371'000.0;
inline constexpr double kDegToRad = std::numbers::pi / 180.0;

/// WGS-84 position. `alt` is meters above the reference surface; an absent
/// altitude means the position takes part in 2-D evaluation only.
struct GeoPoint {
    double lat = 0.0;
    double lon = 0.0;
    std::optional<double> alt;

    [[nodiscard]] bool valid() const noexcept
    {
        return std::isfinite(lat) && std::isfinite(lon) && lat >= -90.0 && lat <= 90.0
               && lon >= -180.0 && lon <= 180.0 && (!alt || std::isfinite(*alt));
    }

    friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

inline void require_valid(const GeoPoint& g)
{
    if (!g.valid()) {
        throw Error(ErrorCode::InvalidCoordinate,
                    "geographic point (" + std::to_string(g.lat) + ", " + std::to_string(g.lon)
                        + ") is outside WGS-84 ranges or not finite");
    }
}

/// Meters east (x) and north (y) of a projection origin.
struct PlanarPoint {
    double x = 0.0;
    double y = 0.0;

    [[nodiscard]] bool finite() const noexcept { return std::isfinite(x) && std::isfinite(y); }

    constexpr PlanarPoint operator+(PlanarPoint o) const noexcept { return {x + o.x, y + o.y}; }
    constexpr PlanarPoint operator-(PlanarPoint o) const noexcept { return {x - o.x, y - o.y}; }
    constexpr PlanarPoint operator*(double s) const noexcept { return {x * s, y * s}; }

    friend constexpr bool operator==(const PlanarPoint&, const PlanarPoint&) = default;
    friend constexpr auto operator<=>(const PlanarPoint&, const PlanarPoint&) = default;
};

constexpr double dot(PlanarPoint a, PlanarPoint b) noexcept { return a.x * b.x + a.y * b.y; }
constexpr double cross(PlanarPoint a, PlanarPoint b) noexcept { return a.x * b.y - a.y * b.x; }
inline double norm(PlanarPoint a) noexcept { return std::hypot(a.x, a.y); }
inline double distance(PlanarPoint a, PlanarPoint b) noexcept { return norm(a - b); }

inline int orient(PlanarPoint a, PlanarPoint b, PlanarPoint c)
{
    return detail::orient_sign(a.x, a.y, b.x, b.y, c.x, c.y);
}

/// Equirectangular local tangent-plane projection around `origin`.
class LocalProjection {
public:
    LocalProjection() = default;

    explicit LocalProjection(GeoPoint origin) : origin_(origin)
    {
        require_valid(origin);
        if (!(origin.lat > -89.0 && origin.lat < 89.0)) {
            throw Error(ErrorCode::InvalidCoordinate,
                        "projection origin latitude must lie strictly inside (-89, 89)");
        }
        origin_.alt.reset();
        cos_origin_ = std::cos(origin_.lat * kDegToRad);
    }

    [[nodiscard]] const GeoPoint& origin() const noexcept { return origin_; }
    [[nodiscard]] static constexpr double earth_radius() noexcept { return kEarthRadiusM; }

    [[nodiscard]] PlanarPoint project(const GeoPoint& g) const
    {
        require_valid(g);
        return {kEarthRadiusM * (g.lon - origin_.lon) * kDegToRad * cos_origin_,
                kEarthRadiusM * (g.lat - origin_.lat) * kDegToRad};
    }

    [[nodiscard]] GeoPoint unproject(PlanarPoint p) const
    {
        if (!p.finite()) throw Error(ErrorCode::InvalidCoordinate, "planar point is not finite");
        return {origin_.lat + p.y / (kEarthRadiusM * kDegToRad),
                origin_.lon + p.x / (kEarthRadiusM * kDegToRad * cos_origin_),
                std::nullopt};
    }

    friend bool operator==(const LocalProjection& a, const LocalProjection& b)
    {
        return a.origin_ == b.origin_;
    }

private:
    GeoPoint origin_{};
    double cos_origin_ = 1.0;
};

/// Great-circle distance on a sphere of radius 6,371 km. Altitude is ignored.
inline double haversine(const GeoPoint& a, const GeoPoint& b)
{
    require_valid(a);
    require_valid(b);
    const double dlat = (b.lat - a.lat) * kDegToRad;
    const double dlon = (b.lon - a.lon) * kDegToRad;
    const double s = std::sin(dlat / 2.0) * std::sin(dlat / 2.0)
                     + std::cos(a.lat * kDegToRad) * std::cos(b.lat * kDegToRad)
                           * std::sin(dlon / 2.0) * std::sin(dlon / 2.0);
    return 2.0 * kEarthRadiusM * std::asin(std::min(1.0, std::sqrt(s)));
}

struct BoundingBox {
    PlanarPoint min;
    PlanarPoint max;

    BoundingBox() = default;
    BoundingBox(PlanarPoint lo, PlanarPoint hi) : min(lo), max(hi)
    {
        if (!lo.finite() || !hi.finite() || !(lo.x < hi.x) || !(lo.y < hi.y)) {
            throw Error(ErrorCode::InvalidGeometry, "bounding box must have min < max on both axes");
        }
    }

    [[nodiscard]] double width() const noexcept { return max.x - min.x; }
    [[nodiscard]] double height() const noexcept { return max.y - min.y; }
    [[nodiscard]] double area() const noexcept { return width() * height(); }
    [[nodiscard]] bool strictly_contains(PlanarPoint p) const noexcept
    {
        return p.x > min.x && p.x < max.x && p.y > min.y && p.y < max.y;
    }
};

inline double point_segment_distance(PlanarPoint p, PlanarPoint a, PlanarPoint b) noexcept
{
    const PlanarPoint ab = b - a;
    const double len2 = dot(ab, ab);
    if (len2 == 0.0) return distance(p, a);
    const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
    return distance(p, a + ab * t);
}

/// True when q lies on the closed segment [a, b] (exact).
inline bool on_segment(PlanarPoint q, PlanarPoint a, PlanarPoint b)
{
    if (orient(a, b, q) != 0) return false;
    return q.x >= std::min(a.x, b.x) && q.x <= std::max(a.x, b.x) && q.y >= std::min(a.y, b.y)
           && q.y <= std::max(a.y, b.y);
}

/// Closed-segment intersection test (touching counts).
inline bool segments_intersect(PlanarPoint a, PlanarPoint b, PlanarPoint c, PlanarPoint d)
{
    if (std::max(a.x, b.x) < std::min(c.x, d.x) || std::max(c.x, d.x) < std::min(a.x, b.x)
        || std::max(a.y, b.y) < std::min(c.y, d.y) || std::max(c.y, d.y) < std::min(a.y, b.y)) {
        return false;
    }
    const int o1 = orient(a, b, c), o2 = orient(a, b, d);
    const int o3 = orient(c, d, a), o4 = orient(c, d, b);
    if (o1 * o2 < 0 && o3 * o4 < 0) return true;
    return (o1 == 0 && on_segment(c, a, b)) || (o2 == 0 && on_segment(d, a, b))
           || (o3 == 0 && on_segment(a, c, d)) || (o4 == 0 && on_segment(b, c, d));
}

inline double segment_segment_distance(PlanarPoint a, PlanarPoint b, PlanarPoint c, PlanarPoint d)
{
    if (segments_intersect(a, b, c, d)) return 0.0;
    return std::min({point_segment_distance(a, c, d), point_segment_distance(b, c, d),
                     point_segment_distance(c, a, b), point_segment_distance(d, a, b)});
}

/// Shoelace area; positive for counter-clockwise rings.
inline double signed_area(std::span<const PlanarPoint> ring) noexcept
{
    if (ring.size() < 3) return 0.0;
    // Relative to the first vertex to limit cancellation on projected coordinates.
    const PlanarPoint o = ring.front();
    double twice = 0.0;
    for (std::size_t i = 1; i + 1 < ring.size(); ++i) {
        twice += cross(ring[i] - o, ring[i + 1] - o);
    }
    return twice / 2.0;
}

/// Simple closed ring stored counter-clockwise. The last vertex connects back
/// to the first; no holes.
class Polygon {
public:
    Polygon() = default;

    explicit Polygon(std::vector<PlanarPoint> vertices) : vertices_(std::move(vertices))
    {
        if (vertices_.size() > 1 && vertices_.front() == vertices_.back()) vertices_.pop_back();
        validate();
        if (signed_area(vertices_) < 0.0) std::reverse(vertices_.begin(), vertices_.end());
    }

    [[nodiscard]] const std::vector<PlanarPoint>& vertices() const noexcept { return vertices_; }
    [[nodiscard]] std::size_t size() const noexcept { return vertices_.size(); }
    [[nodiscard]] bool empty() const noexcept { return vertices_.empty(); }
    [[nodiscard]] const PlanarPoint& operator[](std::size_t i) const { return vertices_[i]; }
    [[nodiscard]] double area() const noexcept { return signed_area(vertices_); }

    [[nodiscard]] BoundingBox bounds() const
    {
        PlanarPoint lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
        PlanarPoint hi{-lo.x, -lo.y};
        for (const auto& v : vertices_) {
            lo = {std::min(lo.x, v.x), std::min(lo.y, v.y)};
            hi = {std::max(hi.x, v.x), std::max(hi.y, v.y)};
        }
        BoundingBox box;
        box.min = lo;
        box.max = hi;
        return box;
    }

    friend bool operator==(const Polygon&, const Polygon&) = default;

private:
    void validate() const
    {
        const std::size_t n = vertices_.size();
        if (n < 3) throw Error(ErrorCode::InvalidGeometry, "polygon needs at least 3 vertices");
        for (std::size_t i = 0; i < n; ++i) {
            if (!vertices_[i].finite()) throw Error(ErrorCode::InvalidGeometry, "non-finite polygon vertex");
            if (vertices_[i] == vertices_[(i + 1) % n]) {
                throw Error(ErrorCode::InvalidGeometry, "consecutive duplicate polygon vertices");
            }
        }
        if (signed_area(vertices_) == 0.0) throw Error(ErrorCode::InvalidGeometry, "polygon has zero area");
        for (std::size_t i = 0; i < n; ++i) {
            const PlanarPoint a = vertices_[i], b = vertices_[(i + 1) % n];
            // Adjacent edges may only share their common vertex.
            const PlanarPoint next = vertices_[(i + 2) % n];
            if (on_segment(next, a, b) || on_segment(a, b, next)) {
                throw Error(ErrorCode::InvalidGeometry, "polygon folds back on itself");
            }
            for (std::size_t j = i + 2; j < n; ++j) {
                if (i == 0 && j == n - 1) continue;
                if (segments_intersect(a, b, vertices_[j], vertices_[(j + 1) % n])) {
                    throw Error(ErrorCode::InvalidGeometry, "polygon ring self-intersects");
                }
            }
        }
    }

    std::vector<PlanarPoint> vertices_;
};

/// Ray-casting parity test. Points on the boundary count as inside. An edge
/// crosses the rightward ray when exactly one endpoint is strictly above it.
inline bool point_in_polygon(PlanarPoint p, const Polygon& poly)
{
    if (poly.size() < 3) throw Error(ErrorCode::InvalidGeometry, "degenerate polygon");
    const auto& v = poly.vertices();
    const std::size_t n = v.size();
    bool inside = false;
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const PlanarPoint a = v[j], b = v[i];
        if (on_segment(p, a, b)) return true;
        if ((a.y > p.y) != (b.y > p.y)) {
            // Crossing lies right of p when p is on the left of the upward edge.
            const PlanarPoint lo = a.y < b.y ? a : b;
            const PlanarPoint hi = a.y < b.y ? b : a;
            if (orient(lo, hi, p) > 0) inside = !inside;
        }
    }
    return inside;
}

/// Minimum distance from p to the ring, negated when p is inside.
inline double point_to_polygon_distance(PlanarPoint p, const Polygon& poly)
{
    if (poly.size() < 3) throw Error(ErrorCode::InvalidGeometry, "degenerate polygon");
    const auto& v = poly.vertices();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
        best = std::min(best, point_segment_distance(p, v[j], v[i]));
    }
    return point_in_polygon(p, poly) ? -best : best;
}

/// Minimum distance from segment [a, b] to the ring edges, and whether the
/// segment touches the closed polygon region at all.
struct SegmentPolygonRelation {
    bool touches_region = false;
    bool inside_entirely = false;
    double boundary_distance = 0.0;
};

inline SegmentPolygonRelation relate_segment(PlanarPoint a, PlanarPoint b, const Polygon& poly)
{
    SegmentPolygonRelation rel;
    const auto& v = poly.vertices();
    bool crosses = false;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
        const double d = segment_segment_distance(a, b, v[j], v[i]);
        if (d == 0.0) crosses = true;
        best = std::min(best, d);
    }
    const bool a_in = point_in_polygon(a, poly);
    const bool b_in = point_in_polygon(b, poly);
    rel.boundary_distance = best;
    rel.touches_region = crosses || a_in || b_in;
    rel.inside_entirely = a_in && b_in && !crosses;
    return rel;
}

}  // namespace geofence
