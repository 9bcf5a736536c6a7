#pragma once

#include <cmath>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "geofence/delaunay.hpp"

namespace geofence {

/// Lower end of the automatic search; a disk of radius 1e12 m keeps every
/// triangle of any realistic point set, so the shape is the convex hull.
inline constexpr double kAlphaHull = 1e-12;

/// Boundary of the alpha-complex of `source` for parameter `alpha` (1/m), with
/// disk radius 1/alpha. `complex` is the kept subset of Delaunay triangles.
struct AlphaShape {
    double alpha = 0.0;
    std::vector<Polygon> boundary;
    PointSet source;
    std::vector<Triangle> complex;

    [[nodiscard]] double area() const noexcept
    {
        double a = 0.0;
        for (const auto& ring : boundary) a += ring.area();
        return a;
    }
};

namespace detail {

struct ComplexRings {
    std::vector<std::vector<std::size_t>> outer;
    std::size_t holes = 0;
};

inline double clockwise_angle(PlanarPoint from, PlanarPoint to)
{
    double angle = std::atan2(cross(to, from), dot(from, to));
    if (angle <= 0.0) angle += 2.0 * std::numbers::pi;
    return angle;
}

/// Chains the boundary of the kept triangles into closed rings. The region
/// lies left of every directed boundary edge; at a vertex shared by several
/// rings the next edge is the first outgoing one clockwise from the incoming
/// edge, which keeps each ring simple.
inline ComplexRings trace_rings(const std::vector<PlanarPoint>& pts, const std::vector<Triangle>& tris,
                                const std::vector<char>& kept)
{
    auto key = [](std::size_t a, std::size_t b) {
        return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint64_t>(b);
    };
    std::unordered_set<std::uint64_t> directed;
    for (std::size_t t = 0; t < tris.size(); ++t) {
        if (!kept[t]) continue;
        const auto& tri = tris[t];
        for (int e = 0; e < 3; ++e) directed.insert(key(tri[e], tri[(e + 1) % 3]));
    }
    std::unordered_map<std::size_t, std::vector<std::size_t>> outgoing;
    std::vector<std::pair<std::size_t, std::size_t>> boundary;
    for (std::size_t t = 0; t < tris.size(); ++t) {
        if (!kept[t]) continue;
        const auto& tri = tris[t];
        for (int e = 0; e < 3; ++e) {
            const std::size_t a = tri[e], b = tri[(e + 1) % 3];
            if (!directed.contains(key(b, a))) {
                outgoing[a].push_back(b);
                boundary.emplace_back(a, b);
            }
        }
    }
    std::sort(boundary.begin(), boundary.end());

    auto successor = [&](std::size_t from, std::size_t at) {
        const auto& candidates = outgoing.at(at);
        if (candidates.size() == 1) return candidates.front();
        const PlanarPoint back = pts[from] - pts[at];
        std::size_t best = candidates.front();
        double best_angle = 10.0;
        for (const std::size_t c : candidates) {
            const double angle = clockwise_angle(back, pts[c] - pts[at]);
            if (angle < best_angle) {
                best_angle = angle;
                best = c;
            }
        }
        return best;
    };

    ComplexRings rings;
    std::unordered_set<std::uint64_t> used;
    for (const auto& [a0, b0] : boundary) {
        if (used.contains(key(a0, b0))) continue;
        std::vector<std::size_t> ring;
        std::size_t a = a0, b = b0;
        while (true) {
            used.insert(key(a, b));
            ring.push_back(a);
            const std::size_t c = successor(a, b);
            a = b;
            b = c;
            if (a == a0 && b == b0) break;
            if (ring.size() > boundary.size()) break;  // unreachable for a valid complex
        }
        // A hole touching the outer boundary at one vertex yields a ring that
        // revisits that vertex; split it into simple loops.
        std::vector<std::size_t> open;
        std::unordered_map<std::size_t, std::size_t> position;
        auto classify = [&](std::vector<std::size_t> loop) {
            std::vector<PlanarPoint> coords;
            coords.reserve(loop.size());
            for (const std::size_t i : loop) coords.push_back(pts[i]);
            if (signed_area(coords) > 0.0) {
                rings.outer.push_back(std::move(loop));
            } else {
                ++rings.holes;
            }
        };
        for (const std::size_t v : ring) {
            const auto seen = position.find(v);
            if (seen != position.end()) {
                std::vector<std::size_t> loop(open.begin() + static_cast<std::ptrdiff_t>(seen->second), open.end());
                for (std::size_t i = seen->second + 1; i < open.size(); ++i) position.erase(open[i]);
                open.resize(seen->second + 1);
                classify(std::move(loop));
            } else {
                position[v] = open.size();
                open.push_back(v);
            }
        }
        classify(std::move(open));
    }
    return rings;
}

inline std::vector<char> kept_triangles(const Triangulation& tri, double alpha)
{
    const double radius = 1.0 / alpha;
    std::vector<char> kept(tri.triangles.size());
    for (std::size_t t = 0; t < kept.size(); ++t) kept[t] = tri.circumradius[t] < radius ? 1 : 0;
    return kept;
}

inline void require_alpha(double alpha)
{
    if (!std::isfinite(alpha) || alpha <= 0.0) {
        throw Error(ErrorCode::UnsupportedParameter, "alpha must be a finite value > 0");
    }
}

inline AlphaShape shape_from_complex(const Triangulation& tri, double alpha)
{
    const auto kept = kept_triangles(tri, alpha);
    const auto& pts = tri.vertices.points();
    AlphaShape shape;
    shape.alpha = alpha;
    shape.source = tri.vertices;
    for (std::size_t t = 0; t < kept.size(); ++t) {
        if (kept[t]) shape.complex.push_back(tri.triangles[t]);
    }
    const auto rings = trace_rings(pts, tri.triangles, kept);
    for (auto ring : rings.outer) {
        const auto start = std::min_element(ring.begin(), ring.end(), [&](std::size_t a, std::size_t b) {
            return pts[a] < pts[b];
        });
        std::rotate(ring.begin(), start, ring.end());
        std::vector<PlanarPoint> coords;
        coords.reserve(ring.size());
        for (const std::size_t i : ring) coords.push_back(pts[i]);
        shape.boundary.emplace_back(std::move(coords));
    }
    std::sort(shape.boundary.begin(), shape.boundary.end(), [](const Polygon& a, const Polygon& b) {
        return a[0] < b[0];
    });
    return shape;
}

/// True when the shape is a single ring without holes that covers every point.
/// With one hole-free ring the kept triangles fill exactly the ring's region,
/// so a point is covered iff it is a vertex of some kept triangle.
inline bool single_covering_ring(const Triangulation& tri, const std::vector<char>& kept)
{
    const auto rings = trace_rings(tri.vertices.points(), tri.triangles, kept);
    if (rings.outer.size() != 1 || rings.holes != 0) return false;
    std::vector<char> covered(tri.vertices.size(), 0);
    for (std::size_t t = 0; t < kept.size(); ++t) {
        if (!kept[t]) continue;
        for (const std::size_t v : tri.triangles[t]) covered[v] = 1;
    }
    return std::all_of(covered.begin(), covered.end(), [](char c) { return c != 0; });
}

}  // namespace detail

/// Alpha-shape via the alpha-complex: Delaunay triangles with circumradius
/// below 1/alpha are kept and their outer boundary becomes `boundary`.
/// Hole rings are not represented; a holed region is reported filled.
inline AlphaShape alpha_shape(const PointSet& s, double alpha)
{
    detail::require_alpha(alpha);
    return detail::shape_from_complex(delaunay(s), alpha);
}

inline AlphaShape alpha_shape(const Triangulation& tri, double alpha)
{
    detail::require_alpha(alpha);
    return detail::shape_from_complex(tri, alpha);
}

/// Largest alpha, found by 64 bisection steps on [1e-12, 1/min circumradius],
/// whose shape is exactly one ring enclosing every point of the set. Returns
/// the convex-hull limit when nothing tighter qualifies.
inline double auto_alpha(const Triangulation& tri)
{
    const double min_radius = *std::min_element(tri.circumradius.begin(), tri.circumradius.end());
    if (!std::isfinite(min_radius) || min_radius <= 0.0) return kAlphaHull;
    double lo = kAlphaHull;
    double hi = 1.0 / min_radius;
    if (!(hi > lo)) return kAlphaHull;
    if (!detail::single_covering_ring(tri, detail::kept_triangles(tri, lo))) return kAlphaHull;
    for (int i = 0; i < 64; ++i) {
        const double mid = lo + (hi - lo) / 2.0;
        if (detail::single_covering_ring(tri, detail::kept_triangles(tri, mid))) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return lo;
}

inline double auto_alpha(const PointSet& s) { return auto_alpha(delaunay(s)); }

}  // namespace geofence
