#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <queue>
#include <set>
#include <span>
#include <unordered_map>
#include <vector>

#include "geofence/delaunay.hpp"
#include "geofence/zone.hpp"

namespace geofence {

struct VoronoiCell {
    PlanarPoint site;
    Polygon region;
    std::vector<std::size_t> neighbors;
};

/// One straight piece of a cell boundary. Internal edges separate `site` and
/// `other`; edges on the clip box have no `other`.
struct VoronoiEdge {
    PlanarPoint a;
    PlanarPoint b;
    std::size_t site = 0;
    std::optional<std::size_t> other;

    [[nodiscard]] bool internal() const noexcept { return other.has_value(); }
};

struct VoronoiDiagram {
    std::vector<VoronoiCell> cells;
    std::vector<VoronoiEdge> edges;
    BoundingBox clip;
};

namespace detail {

struct LabeledVertex {
    PlanarPoint p;
    std::int64_t edge;  // source of the edge starting here: site index, or -1..-4 for box sides
};

/// Clips the convex ring to {x : n.x <= c}; edges created on the clip line get `label`.
inline std::vector<LabeledVertex> clip_half_plane(const std::vector<LabeledVertex>& ring, PlanarPoint n, double c,
                                                  std::int64_t label)
{
    std::vector<LabeledVertex> out;
    const std::size_t m = ring.size();
    out.reserve(m + 1);
    for (std::size_t k = 0; k < m; ++k) {
        const auto& s = ring[k];
        const auto& e = ring[(k + 1) % m];
        const double fs = dot(n, s.p) - c, fe = dot(n, e.p) - c;
        const bool s_in = fs <= 0.0, e_in = fe <= 0.0;
        auto crossing = [&] { return s.p + (e.p - s.p) * (fs / (fs - fe)); };
        if (s_in) {
            out.push_back(s);
            if (!e_in) out.push_back({crossing(), label});
        } else if (e_in) {
            out.push_back({crossing(), s.edge});
        }
    }
    return out;
}

inline std::vector<LabeledVertex> drop_coincident(std::vector<LabeledVertex> ring, double tol)
{
    bool changed = true;
    while (changed && ring.size() > 1) {
        changed = false;
        for (std::size_t k = 0; k < ring.size(); ++k) {
            if (distance(ring[k].p, ring[(k + 1) % ring.size()].p) <= tol) {
                ring.erase(ring.begin() + static_cast<std::ptrdiff_t>(k));
                changed = true;
                break;
            }
        }
    }
    return ring;
}

inline std::vector<std::vector<std::size_t>> site_neighbors(const PointSet& s)
{
    const std::size_t n = s.size();
    std::vector<std::set<std::size_t>> adj(n);
    bool collinear = false;
    try {
        const auto tri = delaunay(s);
        for (const auto& t : tri.triangles) {
            for (int e = 0; e < 3; ++e) {
                adj[t[e]].insert(t[(e + 1) % 3]);
                adj[t[(e + 1) % 3]].insert(t[e]);
            }
        }
    } catch (const Error& e) {
        if (e.code() != ErrorCode::DegenerateInput) throw;
        collinear = true;
    }
    if (collinear) {
        std::vector<std::size_t> order(n);
        for (std::size_t i = 0; i < n; ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return s[a] < s[b]; });
        for (std::size_t k = 0; k + 1 < n; ++k) {
            adj[order[k]].insert(order[k + 1]);
            adj[order[k + 1]].insert(order[k]);
        }
    }
    std::vector<std::vector<std::size_t>> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i].assign(adj[i].begin(), adj[i].end());
    return out;
}

inline double box_scale(const BoundingBox& b) { return std::max({b.width(), b.height(), 1.0}); }

}  // namespace detail

/// Voronoi diagram of the sites clipped to `clip`. Each cell is the box cut by
/// the bisector half-planes of the site's Delaunay neighbours (for collinear
/// sites, its neighbours along the line), so cell vertices are the Delaunay
/// circumcentres.
inline VoronoiDiagram voronoi(const PointSet& s, const BoundingBox& clip)
{
    if (s.size() < 2) throw Error(ErrorCode::InvalidInput, "voronoi needs at least 2 distinct sites");
    for (const auto& p : s.points()) {
        if (!clip.strictly_contains(p)) throw Error(ErrorCode::InvalidInput, "voronoi site outside the clip box");
    }
    const double tol = 1e-9 * detail::box_scale(clip);
    const auto neighbors = detail::site_neighbors(s);

    VoronoiDiagram diagram;
    diagram.clip = clip;
    diagram.cells.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        const PlanarPoint site = s[i];
        // Work relative to the site to keep the half-plane arithmetic well scaled.
        std::vector<detail::LabeledVertex> ring{
            {clip.min - site, -1},
            {PlanarPoint{clip.max.x, clip.min.y} - site, -2},
            {clip.max - site, -3},
            {PlanarPoint{clip.min.x, clip.max.y} - site, -4},
        };
        for (const std::size_t j : neighbors[i]) {
            const PlanarPoint n = s[j] - site;
            ring = detail::clip_half_plane(ring, n, dot(n, n) / 2.0, static_cast<std::int64_t>(j));
        }
        ring = detail::drop_coincident(std::move(ring), tol);
        if (ring.size() < 3) throw Error(ErrorCode::DegenerateInput, "voronoi cell collapsed");

        std::vector<PlanarPoint> coords;
        coords.reserve(ring.size());
        for (const auto& v : ring) coords.push_back(v.p + site);
        for (std::size_t k = 0; k < ring.size(); ++k) {
            const std::int64_t label = ring[k].edge;
            const PlanarPoint a = coords[k], b = coords[(k + 1) % coords.size()];
            if (label < 0) {
                diagram.edges.push_back({a, b, i, std::nullopt});
            } else if (static_cast<std::size_t>(label) > i) {
                diagram.edges.push_back({a, b, i, static_cast<std::size_t>(label)});
            }
        }
        diagram.cells.push_back({site, Polygon(std::move(coords)), neighbors[i]});
    }
    return diagram;
}

struct CorridorEdge {
    std::size_t a = 0;
    std::size_t b = 0;
    double weight = 0.0;
};

/// Navigation graph over Voronoi vertices. Keeps the zones and clearance it
/// was built with so endpoint connections use the same rules.
struct CorridorGraph {
    std::vector<PlanarPoint> nodes;
    std::vector<CorridorEdge> edges;
    std::shared_ptr<const std::vector<Zone>> zones = std::make_shared<const std::vector<Zone>>();
    double clearance = 0.0;
};

struct Path {
    std::vector<PlanarPoint> waypoints;
    double total_length = 0.0;
    double weight = 0.0;
};

struct PathOptions {
    /// Number of nearest graph nodes each endpoint tries to connect to.
    std::size_t connections = 1;
};

namespace detail {

/// Zones whose coarse extent is anywhere near the segment (within `reach`).
inline bool zone_near_segment(const Zone& z, PlanarPoint a, PlanarPoint b, double reach)
{
    if (z.mode == ZoneMode::KeepIn) return true;
    const auto bc = bounding_circle(z);
    return point_segment_distance(bc.center, a, b) - bc.radius <= reach;
}

inline bool segment_clear(const std::vector<Zone>& zones, PlanarPoint a, PlanarPoint b, double clearance)
{
    for (const auto& z : zones) {
        if (!zone_near_segment(z, a, b, clearance)) continue;
        if (!(segment_margin(z, a, b) >= clearance)) return false;
    }
    return true;
}

inline double edge_weight(const std::vector<Zone>& zones, PlanarPoint a, PlanarPoint b, double clearance)
{
    double factor = 1.0;
    for (const auto& z : zones) {
        if (z.difficulty <= factor || z.mode != ZoneMode::KeepOut) continue;
        if (!zone_near_segment(z, a, b, 2.0 * clearance)) continue;
        if (segment_margin(z, a, b) <= 2.0 * clearance) factor = z.difficulty;
    }
    return distance(a, b) * factor;
}

/// Tolerance-based point welding on a hash grid.
class NodeWelder {
public:
    explicit NodeWelder(double tol) : tol_(tol) {}

    std::size_t add(PlanarPoint p)
    {
        const auto cx = cell(p.x), cy = cell(p.y);
        for (std::int64_t dx = -1; dx <= 1; ++dx) {
            for (std::int64_t dy = -1; dy <= 1; ++dy) {
                const auto it = grid_.find(key(cx + dx, cy + dy));
                if (it == grid_.end()) continue;
                for (const std::size_t id : it->second) {
                    if (distance(nodes_[id], p) <= tol_) return id;
                }
            }
        }
        nodes_.push_back(p);
        grid_[key(cx, cy)].push_back(nodes_.size() - 1);
        return nodes_.size() - 1;
    }

    [[nodiscard]] std::vector<PlanarPoint> take() && { return std::move(nodes_); }

private:
    [[nodiscard]] std::int64_t cell(double v) const { return static_cast<std::int64_t>(std::floor(v / tol_)); }
    static std::uint64_t key(std::int64_t x, std::int64_t y)
    {
        return (static_cast<std::uint64_t>(x) * 0x9E3779B97F4A7C15ull) ^ static_cast<std::uint64_t>(y);
    }

    double tol_;
    std::vector<PlanarPoint> nodes_;
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> grid_;
};

}  // namespace detail

/// Corridor graph: Voronoi vertices as nodes; a Voronoi edge survives when its
/// whole segment keeps at least `clearance` from every zone (outside keep-out
/// footprints, inside keep-in footprints). Weight is the segment length times
/// the largest difficulty of keep-out zones within 2x clearance.
inline CorridorGraph build_corridor(const VoronoiDiagram& diagram, std::span<const Zone> zones, double clearance)
{
    if (!(clearance >= 0.0) || !std::isfinite(clearance)) {
        throw Error(ErrorCode::InvalidInput, "clearance must be finite and >= 0");
    }
    CorridorGraph g;
    g.clearance = clearance;
    auto owned = std::make_shared<std::vector<Zone>>(zones.begin(), zones.end());
    g.zones = owned;

    detail::NodeWelder welder(1e-7 * detail::box_scale(diagram.clip));
    std::vector<std::pair<std::size_t, std::size_t>> segments;
    segments.reserve(diagram.edges.size());
    for (const auto& e : diagram.edges) segments.emplace_back(welder.add(e.a), welder.add(e.b));
    g.nodes = std::move(welder).take();

    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (const auto& [u, v] : segments) {
        if (u == v) continue;
        const auto key = std::minmax(u, v);
        if (!seen.insert(key).second) continue;
        const PlanarPoint a = g.nodes[key.first], b = g.nodes[key.second];
        if (!detail::segment_clear(*owned, a, b, clearance)) continue;
        g.edges.push_back({key.first, key.second, detail::edge_weight(*owned, a, b, clearance)});
    }
    return g;
}

namespace detail {

/// Endpoint connections may not bring the UAV closer to any zone than it
/// already is, nor closer than the corridor clearance.
inline bool connection_clear(const std::vector<Zone>& zones, PlanarPoint from, PlanarPoint to, double clearance)
{
    for (const auto& z : zones) {
        const double here = point_margin(z, from);
        if (here < 0.0) return false;
        const double required = std::min(clearance, here - 1e-6);
        if (!zone_near_segment(z, from, to, std::max(required, 0.0))) continue;
        if (!(segment_margin(z, from, to) >= required)) return false;
    }
    return true;
}

}  // namespace detail

/// Minimal-weight route from `start` to `goal` through the corridor: each
/// endpoint is joined to its nearest zone-clear graph nodes, then Dijkstra.
/// Throws NoPath when an endpoint cannot be connected or the two sides lie in
/// different components.
inline Path shortest_path(const CorridorGraph& g, PlanarPoint start, PlanarPoint goal, const PathOptions& options = {})
{
    if (!start.finite() || !goal.finite()) throw Error(ErrorCode::InvalidInput, "path endpoints must be finite");
    constexpr double kSame = 1e-9;
    if (distance(start, goal) <= kSame) return {{start}, 0.0, 0.0};

    const auto& zones = *g.zones;
    const std::size_t n = g.nodes.size();
    std::vector<std::vector<std::pair<std::size_t, double>>> adj(n + 2);
    for (const auto& e : g.edges) {
        adj[e.a].emplace_back(e.b, e.weight);
        adj[e.b].emplace_back(e.a, e.weight);
    }
    const std::size_t s_id = n, g_id = n + 1;

    auto connect = [&](std::size_t endpoint, PlanarPoint p, const char* what) {
        std::vector<std::size_t> order;
        for (std::size_t i = 0; i < n; ++i) {
            if (!adj[i].empty()) order.push_back(i);
        }
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            const double da = distance(p, g.nodes[a]), db = distance(p, g.nodes[b]);
            return da != db ? da < db : a < b;
        });
        std::size_t made = 0;
        for (const std::size_t i : order) {
            if (made >= std::max<std::size_t>(options.connections, 1)) break;
            const PlanarPoint q = g.nodes[i];
            const bool coincident = distance(p, q) <= kSame;
            if (!coincident && !detail::connection_clear(zones, p, q, g.clearance)) continue;
            const double w = coincident ? 0.0 : detail::edge_weight(zones, p, q, g.clearance);
            adj[endpoint].emplace_back(i, w);
            adj[i].emplace_back(endpoint, w);
            ++made;
            if (coincident) break;
        }
        if (made == 0) throw Error(ErrorCode::NoPath, std::string("no clear connection from ") + what);
    };
    connect(s_id, start, "start");
    connect(g_id, goal, "goal");

    std::vector<double> dist(n + 2, std::numeric_limits<double>::infinity());
    std::vector<std::size_t> prev(n + 2, n + 2);
    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    dist[s_id] = 0.0;
    heap.emplace(0.0, s_id);
    while (!heap.empty()) {
        const auto [d, u] = heap.top();
        heap.pop();
        if (d > dist[u]) continue;
        if (u == g_id) break;
        for (const auto& [v, w] : adj[u]) {
            const double nd = d + w;
            if (nd < dist[v]) {
                dist[v] = nd;
                prev[v] = u;
                heap.emplace(nd, v);
            }
        }
    }
    if (!std::isfinite(dist[g_id])) throw Error(ErrorCode::NoPath, "start and goal are not connected");

    std::vector<std::size_t> chain;
    for (std::size_t v = g_id; v != n + 2; v = prev[v]) chain.push_back(v);
    std::reverse(chain.begin(), chain.end());
    Path path;
    path.weight = dist[g_id];
    for (const std::size_t v : chain) {
        const PlanarPoint p = v == s_id ? start : v == g_id ? goal : g.nodes[v];
        if (!path.waypoints.empty() && distance(path.waypoints.back(), p) <= kSame) {
            if (v == g_id) path.waypoints.back() = goal;
            continue;
        }
        if (!path.waypoints.empty()) path.total_length += distance(path.waypoints.back(), p);
        path.waypoints.push_back(p);
    }
    return path;
}

}  // namespace geofence
