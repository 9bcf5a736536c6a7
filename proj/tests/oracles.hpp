#pragma once

// Independent reference implementations used only by the test suites. None of
// these call into the code paths they are used to check.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "geofence/geo.hpp"

namespace oracle {

using geofence::PlanarPoint;

/// Winding number of the closed ring around p (plain doubles, no predicates).
inline int winding_number(PlanarPoint p, const std::vector<PlanarPoint>& ring)
{
    auto is_left = [](PlanarPoint a, PlanarPoint b, PlanarPoint q) {
        return (b.x - a.x) * (q.y - a.y) - (q.x - a.x) * (b.y - a.y);
    };
    int wn = 0;
    const std::size_t n = ring.size();
    for (std::size_t i = 0; i < n; ++i) {
        const PlanarPoint a = ring[i], b = ring[(i + 1) % n];
        if (a.y <= p.y) {
            if (b.y > p.y && is_left(a, b, p) > 0) ++wn;
        } else if (b.y <= p.y && is_left(a, b, p) < 0) {
            --wn;
        }
    }
    return wn;
}

inline double seg_distance(PlanarPoint p, PlanarPoint a, PlanarPoint b)
{
    const double dx = b.x - a.x, dy = b.y - a.y;
    const double len2 = dx * dx + dy * dy;
    double t = len2 > 0 ? ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2 : 0.0;
    t = std::max(0.0, std::min(1.0, t));
    return std::hypot(p.x - (a.x + t * dx), p.y - (a.y + t * dy));
}

inline double min_edge_distance(PlanarPoint p, const std::vector<PlanarPoint>& ring)
{
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < ring.size(); ++i) {
        best = std::min(best, seg_distance(p, ring[i], ring[(i + 1) % ring.size()]));
    }
    return best;
}

/// Random star-shaped (hence simple) polygon.
inline std::vector<PlanarPoint> random_star_polygon(std::mt19937_64& rng, PlanarPoint center, double r_min,
                                                    double r_max, int n)
{
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    std::uniform_real_distribution<double> radius(r_min, r_max);
    std::vector<double> angles(static_cast<std::size_t>(n));
    for (auto& a : angles) a = angle(rng);
    std::sort(angles.begin(), angles.end());
    angles.erase(std::unique(angles.begin(), angles.end()), angles.end());
    std::vector<PlanarPoint> ring;
    for (const double a : angles) {
        const double r = radius(rng);
        ring.push_back({center.x + r * std::cos(a), center.y + r * std::sin(a)});
    }
    return ring;
}

inline double cross3(PlanarPoint o, PlanarPoint a, PlanarPoint b)
{
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

/// O(n^3) hull: (i, j) is a hull edge when every other point is strictly left
/// of i->j or lies strictly between i and j. Returns the CCW vertex cycle
/// starting at the lexicographically smallest hull vertex.
inline std::vector<PlanarPoint> brute_force_hull(const std::vector<PlanarPoint>& pts)
{
    const std::size_t n = pts.size();
    std::vector<std::size_t> next(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            bool edge = true;
            for (std::size_t k = 0; k < n && edge; ++k) {
                if (k == i || k == j) continue;
                const double c = cross3(pts[i], pts[j], pts[k]);
                if (c < 0) edge = false;
                if (c == 0) {
                    // collinear points must lie strictly inside the segment
                    const double t = ((pts[k].x - pts[i].x) * (pts[j].x - pts[i].x)
                                      + (pts[k].y - pts[i].y) * (pts[j].y - pts[i].y));
                    const double len2 = std::pow(pts[j].x - pts[i].x, 2) + std::pow(pts[j].y - pts[i].y, 2);
                    if (t <= 0 || t >= len2) edge = false;
                }
            }
            if (edge) next[i] = j;
        }
    }
    std::size_t start = n;
    for (std::size_t i = 0; i < n; ++i) {
        if (next[i] == n) continue;
        if (start == n || pts[i] < pts[start]) start = i;
    }
    std::vector<PlanarPoint> hull;
    if (start == n) return hull;
    std::size_t cur = start;
    do {
        hull.push_back(pts[cur]);
        cur = next[cur];
    } while (cur != start && cur != n && hull.size() <= n);
    return hull;
}

/// Circumcircle radius by solving for the circumcenter directly.
inline double circumcircle_radius(PlanarPoint a, PlanarPoint b, PlanarPoint c)
{
    const double bx = b.x - a.x, by = b.y - a.y, cx = c.x - a.x, cy = c.y - a.y;
    const double d = 2.0 * (bx * cy - by * cx);
    if (d == 0) return std::numeric_limits<double>::infinity();
    const double ux = (cy * (bx * bx + by * by) - by * (cx * cx + cy * cy)) / d;
    const double uy = (bx * (cx * cx + cy * cy) - cx * (bx * bx + by * by)) / d;
    return std::hypot(ux, uy);
}

inline std::size_t nearest_site(PlanarPoint p, const std::vector<PlanarPoint>& sites, double* gap = nullptr)
{
    std::size_t best = 0;
    double d1 = std::numeric_limits<double>::infinity(), d2 = d1;
    for (std::size_t i = 0; i < sites.size(); ++i) {
        const double d = std::hypot(p.x - sites[i].x, p.y - sites[i].y);
        if (d < d1) {
            d2 = d1;
            d1 = d;
            best = i;
        } else if (d < d2) {
            d2 = d;
        }
    }
    if (gap) *gap = d2 - d1;
    return best;
}

struct Edge {
    std::size_t a, b;
    double w;
};

/// Exhaustive depth-first enumeration of simple paths with branch-and-bound
/// pruning (weights are positive, so pruning never discards the optimum).
inline double exhaustive_shortest(std::size_t n, const std::vector<Edge>& edges, std::size_t from, std::size_t to)
{
    std::vector<std::vector<std::pair<std::size_t, double>>> adj(n);
    for (const auto& e : edges) {
        adj[e.a].emplace_back(e.b, e.w);
        adj[e.b].emplace_back(e.a, e.w);
    }
    double best = std::numeric_limits<double>::infinity();
    std::vector<char> on_path(n, 0);
    std::function<void(std::size_t, double)> dfs = [&](std::size_t u, double acc) {
        if (acc >= best) return;
        if (u == to) {
            best = acc;
            return;
        }
        on_path[u] = 1;
        for (const auto& [v, w] : adj[u]) {
            if (!on_path[v]) dfs(v, acc + w);
        }
        on_path[u] = 0;
    };
    dfs(from, 0.0);
    return best;
}

}  // namespace oracle
