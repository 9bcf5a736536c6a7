#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <unordered_map>
#include <vector>

#include "geofence/geo.hpp"

namespace geofence {

inline constexpr double kDuplicateTolerance = 1e-9;

/// Deduplicated, non-empty set of planar points. Points closer than 1e-9 m to
/// an earlier point are dropped; the surviving points keep their input order.
class PointSet {
public:
    PointSet() = default;

    explicit PointSet(std::span<const PlanarPoint> input)
    {
        if (input.empty()) throw Error(ErrorCode::DegenerateInput, "point set is empty");
        for (const auto& p : input) {
            if (!p.finite()) throw Error(ErrorCode::InvalidCoordinate, "non-finite point in point set");
        }
        std::vector<std::size_t> order(input.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return input[a] < input[b];
        });
        // kept holds sorted-order representatives; a later duplicate with a
        // smaller input index replaces its representative.
        std::vector<std::size_t> kept;
        for (const std::size_t idx : order) {
            bool duplicate = false;
            for (auto it = kept.rbegin(); it != kept.rend(); ++it) {
                if (input[idx].x - input[*it].x > kDuplicateTolerance) break;
                if (distance(input[idx], input[*it]) <= kDuplicateTolerance) {
                    duplicate = true;
                    if (idx < *it) *it = idx;
                    break;
                }
            }
            if (!duplicate) kept.push_back(idx);
        }
        std::sort(kept.begin(), kept.end());
        points_.reserve(kept.size());
        for (const std::size_t idx : kept) points_.push_back(input[idx]);
    }

    explicit PointSet(const std::vector<PlanarPoint>& input)
        : PointSet(std::span<const PlanarPoint>(input))
    {}

    [[nodiscard]] const std::vector<PlanarPoint>& points() const noexcept { return points_; }
    [[nodiscard]] std::size_t size() const noexcept { return points_.size(); }
    [[nodiscard]] const PlanarPoint& operator[](std::size_t i) const { return points_[i]; }

    friend bool operator==(const PointSet&, const PointSet&) = default;

private:
    std::vector<PlanarPoint> points_;
};

using Triangle = std::array<std::size_t, 3>;

/// Radius of the circle through a, b, c; +infinity when they are collinear.
inline double circumradius(PlanarPoint a, PlanarPoint b, PlanarPoint c)
{
    if (orient(a, b, c) == 0) return std::numeric_limits<double>::infinity();
    const PlanarPoint ab = b - a, ac = c - a;
    const double twice_area = std::abs(cross(ab, ac));
    if (twice_area == 0.0) return std::numeric_limits<double>::infinity();
    return distance(a, b) * distance(b, c) * distance(c, a) / (2.0 * twice_area);
}

/// Delaunay triangulation of a point set. Triangles are counter-clockwise,
/// store indices into `vertices`, and are listed in canonical order.
struct Triangulation {
    PointSet vertices;
    std::vector<Triangle> triangles;
    std::vector<double> circumradius;
};

namespace detail {

class TriangleMesh {
public:
    explicit TriangleMesh(const std::vector<PlanarPoint>& pts) : pts_(pts) {}

    void add(std::size_t a, std::size_t b, std::size_t c)
    {
        const auto t = static_cast<std::uint32_t>(tris_.size());
        tris_.push_back({a, b, c});
        link(a, b, t);
        link(b, c, t);
        link(c, a, t);
    }

    void legalize(std::vector<std::pair<std::size_t, std::size_t>>& stack)
    {
        while (!stack.empty()) {
            const auto [u, v] = stack.back();
            stack.pop_back();
            const auto t1 = edges_.find(key(u, v));
            const auto t2 = edges_.find(key(v, u));
            if (t1 == edges_.end() || t2 == edges_.end()) continue;
            const std::uint32_t i1 = t1->second, i2 = t2->second;
            const std::size_t w = third(tris_[i1], u, v);
            const std::size_t x = third(tris_[i2], v, u);
            const PlanarPoint& pu = pts_[u];
            const PlanarPoint& pv = pts_[v];
            const PlanarPoint& pw = pts_[w];
            const PlanarPoint& px = pts_[x];
            if (detail::incircle_sign(pu.x, pu.y, pv.x, pv.y, pw.x, pw.y, px.x, px.y) <= 0) continue;
            // Quad u, x, v, w is convex and counter-clockwise; swap the diagonal.
            edges_.erase(key(u, v));
            edges_.erase(key(v, u));
            tris_[i1] = {u, x, w};
            tris_[i2] = {x, v, w};
            link(u, x, i1);
            link(x, w, i1);
            link(w, u, i1);
            link(x, v, i2);
            link(v, w, i2);
            link(w, x, i2);
            stack.emplace_back(u, x);
            stack.emplace_back(x, v);
            stack.emplace_back(v, w);
            stack.emplace_back(w, u);
        }
    }

    [[nodiscard]] const std::vector<Triangle>& triangles() const noexcept { return tris_; }

private:
    static std::uint64_t key(std::size_t a, std::size_t b) noexcept
    {
        return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint64_t>(b);
    }

    static std::size_t third(const Triangle& t, std::size_t a, std::size_t b) noexcept
    {
        for (const std::size_t v : t) {
            if (v != a && v != b) return v;
        }
        return t[0];
    }

    void link(std::size_t a, std::size_t b, std::uint32_t t) { edges_[key(a, b)] = t; }

    const std::vector<PlanarPoint>& pts_;
    std::vector<Triangle> tris_;
    std::unordered_map<std::uint64_t, std::uint32_t> edges_;
};

inline Triangle canonical_triangle(Triangle t)
{
    const auto m = std::min_element(t.begin(), t.end()) - t.begin();
    std::rotate(t.begin(), t.begin() + m, t.end());
    return t;
}

}  // namespace detail

/// Sweep insertion in lexicographic order followed by Lawson edge flips. The
/// predicates are exact, so cocircular and collinear configurations are safe.
inline Triangulation delaunay(const PointSet& s)
{
    const auto& pts = s.points();
    const std::size_t n = pts.size();
    if (n < 3) throw Error(ErrorCode::DegenerateInput, "triangulation needs at least 3 points");
    if (n > std::numeric_limits<std::uint32_t>::max()) {
        throw Error(ErrorCode::InvalidInput, "point set too large");
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pts[a] < pts[b]; });

    std::size_t k = 2;
    while (k < n && orient(pts[order[0]], pts[order[1]], pts[order[k]]) == 0) ++k;
    if (k == n) throw Error(ErrorCode::DegenerateInput, "all points are collinear");

    detail::TriangleMesh mesh(pts);
    std::vector<std::pair<std::size_t, std::size_t>> stack;
    std::vector<std::size_t> hull;

    const std::size_t apex = order[k];
    const int side = orient(pts[order[0]], pts[order[1]], pts[apex]);
    for (std::size_t i = 0; i + 1 < k; ++i) {
        if (side > 0) {
            mesh.add(order[i], order[i + 1], apex);
        } else {
            mesh.add(order[i + 1], order[i], apex);
        }
    }
    if (side > 0) {
        for (std::size_t i = 0; i < k; ++i) hull.push_back(order[i]);
        hull.push_back(apex);
    } else {
        hull.push_back(order[0]);
        hull.push_back(apex);
        for (std::size_t i = k - 1; i >= 1; --i) hull.push_back(order[i]);
    }
    for (std::size_t i = 0; i + 1 < k; ++i) stack.emplace_back(order[i], order[i + 1]);
    mesh.legalize(stack);

    std::vector<char> visible;
    std::vector<std::size_t> next_hull;
    for (std::size_t step = k + 1; step < n; ++step) {
        const std::size_t p = order[step];
        const std::size_t h = hull.size();
        visible.assign(h, 0);
        bool any = false;
        for (std::size_t i = 0; i < h; ++i) {
            visible[i] = orient(pts[hull[i]], pts[hull[(i + 1) % h]], pts[p]) < 0 ? 1 : 0;
            any = any || visible[i];
        }
        if (!any) throw Error(ErrorCode::DegenerateInput, "sweep point not outside current hull");
        std::size_t first = 0;
        while (!(visible[first] && !visible[(first + h - 1) % h])) ++first;
        std::size_t last = first;  // one past the final visible edge
        while (visible[last % h]) {
            const std::size_t a = hull[last % h], b = hull[(last + 1) % h];
            mesh.add(b, a, p);
            stack.emplace_back(a, b);
            ++last;
        }
        mesh.legalize(stack);
        next_hull.clear();
        for (std::size_t i = last % h;; i = (i + 1) % h) {
            next_hull.push_back(hull[i]);
            if (i == first) break;
        }
        next_hull.push_back(p);
        hull.swap(next_hull);
    }

    // A final global pass; the incremental flips normally leave nothing to do.
    for (const auto& t : mesh.triangles()) {
        stack.emplace_back(t[0], t[1]);
        stack.emplace_back(t[1], t[2]);
        stack.emplace_back(t[2], t[0]);
    }
    mesh.legalize(stack);

    Triangulation out;
    out.vertices = s;
    out.triangles.reserve(mesh.triangles().size());
    for (const auto& t : mesh.triangles()) out.triangles.push_back(detail::canonical_triangle(t));
    std::sort(out.triangles.begin(), out.triangles.end());
    out.circumradius.reserve(out.triangles.size());
    for (const auto& t : out.triangles) {
        out.circumradius.push_back(circumradius(pts[t[0]], pts[t[1]], pts[t[2]]));
    }
    return out;
}

/// Andrew's monotone chain. Counter-clockwise, starting at the
/// lexicographically smallest point, collinear boundary points removed.
inline Polygon convex_hull(const PointSet& s)
{
    std::vector<PlanarPoint> pts = s.points();
    if (pts.size() < 3) throw Error(ErrorCode::DegenerateInput, "convex hull needs at least 3 points");
    std::sort(pts.begin(), pts.end());
    std::vector<PlanarPoint> hull(2 * pts.size());
    std::size_t k = 0;
    for (const auto& p : pts) {
        while (k >= 2 && orient(hull[k - 2], hull[k - 1], p) <= 0) --k;
        hull[k++] = p;
    }
    for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
        while (k >= lower && orient(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    if (hull.size() < 3) throw Error(ErrorCode::DegenerateInput, "all points are collinear");
    return Polygon(std::move(hull));
}

}  // namespace geofence
