#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "geofence/alphashape.hpp"
#include "oracles.hpp"

using namespace geofence;

namespace {

std::vector<PlanarPoint> random_points(std::mt19937_64& rng, std::size_t n, double extent)
{
    std::uniform_real_distribution<double> coord(0.0, extent);
    std::vector<PlanarPoint> pts(n);
    for (auto& p : pts) p = {coord(rng), coord(rng)};
    return pts;
}

std::vector<PlanarPoint> l_shape_points(std::mt19937_64& rng, std::size_t n)
{
    // L = [0,100]x[0,20] union [0,20]x[0,100]
    std::uniform_real_distribution<double> coord(0.0, 100.0);
    std::vector<PlanarPoint> pts;
    while (pts.size() < n) {
        const PlanarPoint p{coord(rng), coord(rng)};
        if (p.x <= 20.0 || p.y <= 20.0) pts.push_back(p);
    }
    return pts;
}

PointSet unit_square_corners() { return PointSet(std::vector<PlanarPoint>{{0, 0}, {1, 0}, {1, 1}, {0, 1}}); }

std::set<std::pair<std::size_t, std::size_t>> delaunay_edges(const Triangulation& tri)
{
    std::set<std::pair<std::size_t, std::size_t>> edges;
    for (const auto& t : tri.triangles) {
        for (int e = 0; e < 3; ++e) {
            const auto a = t[e], b = t[(e + 1) % 3];
            edges.insert({std::min(a, b), std::max(a, b)});
        }
    }
    return edges;
}

void expect_empty_circumcircles(const Triangulation& tri)
{
    const auto& pts = tri.vertices.points();
    for (const auto& t : tri.triangles) {
        const PlanarPoint a = pts[t[0]], b = pts[t[1]], c = pts[t[2]];
        EXPECT_GT(oracle::cross3(a, b, c), 0.0);
        // circumcenter from the oracle's own solve
        const double bx = b.x - a.x, by = b.y - a.y, cx = c.x - a.x, cy = c.y - a.y;
        const double d = 2.0 * (bx * cy - by * cx);
        const PlanarPoint center{a.x + (cy * (bx * bx + by * by) - by * (cx * cx + cy * cy)) / d,
                                 a.y + (bx * (cx * cx + cy * cy) - cx * (bx * bx + by * by)) / d};
        const double r = std::hypot(a.x - center.x, a.y - center.y);
        for (std::size_t v = 0; v < pts.size(); ++v) {
            if (v == t[0] || v == t[1] || v == t[2]) continue;
            EXPECT_GE(std::hypot(pts[v].x - center.x, pts[v].y - center.y), r * (1.0 - 1e-9));
        }
    }
}

}  // namespace

TEST(PointSet, DeduplicatesKeepingFirstOccurrence)
{
    const PointSet s(std::vector<PlanarPoint>{{1, 1}, {0, 0}, {1, 1 + 1e-12}, {2, 2}, {0, 0}});
    ASSERT_EQ(s.size(), 3u);
    EXPECT_EQ(s[0], (PlanarPoint{1, 1}));
    EXPECT_EQ(s[1], (PlanarPoint{0, 0}));
    EXPECT_THROW(PointSet(std::vector<PlanarPoint>{}), Error);
}

TEST(Circumradius, ClosedForms)
{
    EXPECT_NEAR(circumradius({0, 0}, {1, 0}, {0, 1}), std::sqrt(2.0) / 2.0, 1e-15);
    EXPECT_NEAR(circumradius({0, 0}, {1, 0}, {0.5, std::sqrt(3.0) / 2.0}), 1.0 / std::sqrt(3.0), 1e-15);
    EXPECT_TRUE(std::isinf(circumradius({0, 0}, {1, 1}, {2, 2})));
}

TEST(Delaunay, SmallInputs)
{
    const auto one = delaunay(PointSet(std::vector<PlanarPoint>{{0, 0}, {4, 0}, {1, 3}}));
    ASSERT_EQ(one.triangles.size(), 1u);

    const auto sq = delaunay(unit_square_corners());
    ASSERT_EQ(sq.triangles.size(), 2u);
    for (const double r : sq.circumradius) EXPECT_NEAR(r, std::sqrt(2.0) / 2.0, 1e-15);

    try {
        (void)delaunay(PointSet(std::vector<PlanarPoint>{{0, 0}, {1, 1}, {2, 2}, {3, 3}}));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DegenerateInput);
    }
    EXPECT_THROW((void)delaunay(PointSet(std::vector<PlanarPoint>{{0, 0}, {1, 1}})), Error);
}

TEST(Delaunay, EmptyCircumcircleOnRandomPoints)
{
    std::mt19937_64 rng(5);
    const PointSet s(random_points(rng, 200, 1000.0));
    const auto tri = delaunay(s);
    // Euler: 2n - 2 - h triangles
    const auto hull = convex_hull(s);
    EXPECT_EQ(tri.triangles.size(), 2 * s.size() - 2 - hull.size());
    expect_empty_circumcircles(tri);
}

TEST(Delaunay, CocircularLatticeAndCollinearPrefix)
{
    std::vector<PlanarPoint> grid;
    for (int i = 0; i < 10; ++i) {
        for (int j = 0; j < 10; ++j) grid.push_back({static_cast<double>(i), static_cast<double>(j)});
    }
    const auto tri = delaunay(PointSet(grid));
    EXPECT_EQ(tri.triangles.size(), 162u);
    expect_empty_circumcircles(tri);

    // Many collinear points sorted first, then the rest.
    std::vector<PlanarPoint> pts{{0, 0}, {0, 1}, {0, 2}, {0, 3}, {0, 4}, {1, 2}, {2, 0.5}, {3, 3}};
    const auto t2 = delaunay(PointSet(pts));
    expect_empty_circumcircles(t2);
}

TEST(Delaunay, DeterministicUnderInputPermutation)
{
    std::mt19937_64 rng(17);
    auto pts = random_points(rng, 60, 100.0);
    const auto a = delaunay(PointSet(pts));
    const auto b = delaunay(PointSet(pts));
    EXPECT_EQ(a.triangles, b.triangles);
    EXPECT_EQ(a.circumradius, b.circumradius);
}

TEST(ConvexHull, BasicAndBruteForce)
{
    const auto sq = convex_hull(unit_square_corners());
    EXPECT_EQ(sq.vertices(), (std::vector<PlanarPoint>{{0, 0}, {1, 0}, {1, 1}, {0, 1}}));
    const auto with_inner = convex_hull(PointSet(std::vector<PlanarPoint>{{0, 0}, {1, 0}, {0.5, 0.5}, {1, 1}, {0, 1}, {0.5, 0}}));
    EXPECT_EQ(with_inner.vertices(), sq.vertices());

    std::mt19937_64 rng(3);
    const auto pts = random_points(rng, 500, 1.0);
    const PointSet s(pts);
    EXPECT_EQ(convex_hull(s).vertices(), oracle::brute_force_hull(s.points()));
    EXPECT_THROW((void)convex_hull(PointSet(std::vector<PlanarPoint>{{0, 0}, {1, 0}, {2, 0}})), Error);
}

TEST(AlphaShape, UnitSquareExamples)
{
    const auto kept = alpha_shape(unit_square_corners(), 1.0);
    ASSERT_EQ(kept.boundary.size(), 1u);
    EXPECT_EQ(kept.boundary[0].vertices(), (std::vector<PlanarPoint>{{0, 0}, {1, 0}, {1, 1}, {0, 1}}));
    EXPECT_NEAR(kept.area(), 1.0, 1e-15);

    const auto none = alpha_shape(unit_square_corners(), 2.0);
    EXPECT_TRUE(none.boundary.empty());
    EXPECT_TRUE(none.complex.empty());
}

TEST(AlphaShape, RejectsNonPositiveAlpha)
{
    for (const double a : {0.0, -1.0, std::numeric_limits<double>::quiet_NaN()}) {
        try {
            (void)alpha_shape(unit_square_corners(), a);
            FAIL();
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), ErrorCode::UnsupportedParameter);
        }
    }
}

TEST(AlphaShape, ConvexHullLimit)
{
    std::mt19937_64 rng(8);
    for (int i = 0; i < 20; ++i) {
        const PointSet s(random_points(rng, 10 + 10 * i, 500.0));
        const auto shape = alpha_shape(s, kAlphaHull);
        ASSERT_EQ(shape.boundary.size(), 1u);
        EXPECT_EQ(shape.boundary[0].vertices(), convex_hull(s).vertices());
    }
}

TEST(AlphaShape, PropertiesOnRandomSets)
{
    std::mt19937_64 rng(21);
    for (int iter = 0; iter < 15; ++iter) {
        const PointSet s(random_points(rng, 80, 100.0));
        const auto tri = delaunay(s);
        const auto edges = delaunay_edges(tri);
        const double hull_area = convex_hull(s).area();
        double previous_area = std::numeric_limits<double>::infinity();
        std::set<Triangle> previous(tri.triangles.begin(), tri.triangles.end());
        for (const double alpha : {0.01, 0.05, 0.1, 0.15, 0.2, 0.3}) {
            const auto shape = alpha_shape(tri, alpha);
            const std::set<Triangle> kept(shape.complex.begin(), shape.complex.end());
            EXPECT_TRUE(std::includes(previous.begin(), previous.end(), kept.begin(), kept.end()));
            EXPECT_LE(shape.area(), hull_area * (1 + 1e-12));
            EXPECT_LE(shape.area(), previous_area * (1 + 1e-12));
            previous = kept;
            previous_area = shape.area();

            std::set<std::pair<PlanarPoint, PlanarPoint>> seen;
            for (const auto& ring : shape.boundary) {
                for (std::size_t i = 0; i < ring.size(); ++i) {
                    const PlanarPoint a = ring[i], b = ring[(i + 1) % ring.size()];
                    const auto ia = std::find(s.points().begin(), s.points().end(), a) - s.points().begin();
                    const auto ib = std::find(s.points().begin(), s.points().end(), b) - s.points().begin();
                    ASSERT_LT(static_cast<std::size_t>(ia), s.size());
                    ASSERT_LT(static_cast<std::size_t>(ib), s.size());
                    EXPECT_TRUE(edges.contains({std::min<std::size_t>(ia, ib), std::max<std::size_t>(ia, ib)}));
                    EXPECT_TRUE(seen.insert({std::min(a, b), std::max(a, b)}).second);
                }
            }
        }
    }
}

TEST(AlphaShape, PinchedComplexSplitsIntoSimpleRings)
{
    const std::vector<PlanarPoint> pts{{0, 0}, {2, -1}, {2, 1}, {-2, 1}, {-2, -1}};
    const std::vector<Triangle> tris{{0, 1, 2}, {0, 3, 4}};
    const auto rings = detail::trace_rings(pts, tris, {1, 1});
    EXPECT_EQ(rings.outer.size(), 2u);
    EXPECT_EQ(rings.holes, 0u);
    for (const auto& r : rings.outer) EXPECT_EQ(r.size(), 3u);
}

TEST(AlphaShape, HoleTouchingOuterBoundaryAtOneVertex)
{
    // Ring of triangles around the square (1,1)-(2,2), closing at vertex (0,0).
    const std::vector<PlanarPoint> pts{{0, 0}, {3, 0}, {3, 3}, {0, 3}, {1, 1}, {2, 1}, {2, 2}, {1, 2}};
    const std::vector<Triangle> tris{{0, 1, 5}, {0, 5, 4}, {1, 2, 5}, {5, 2, 6}, {2, 3, 6},
                                     {6, 3, 7}, {3, 0, 7}, {7, 0, 4}};
    const auto rings = detail::trace_rings(pts, tris, std::vector<char>(tris.size(), 1));
    EXPECT_EQ(rings.outer.size(), 1u);
    EXPECT_EQ(rings.holes, 1u);
    // drop the triangle (7, 0, 4) so the hole opens onto vertex 0
    std::vector<char> kept(tris.size(), 1);
    kept[7] = 0;
    const auto pinched = detail::trace_rings(pts, tris, kept);
    EXPECT_EQ(pinched.outer.size(), 1u);
    EXPECT_EQ(pinched.holes, 1u);
    std::vector<PlanarPoint> coords;
    for (auto i : pinched.outer[0]) coords.push_back(pts[i]);
    EXPECT_NO_THROW(Polygon{coords});
}

TEST(AutoAlpha, UnitSquareBisection)
{
    const double alpha = auto_alpha(unit_square_corners());
    const double radius = 1.0 / alpha;
    EXPECT_GT(radius, std::sqrt(2.0) / 2.0);
    EXPECT_LT(radius - std::sqrt(2.0) / 2.0, 1e-9);
    const auto shape = alpha_shape(unit_square_corners(), alpha);
    ASSERT_EQ(shape.boundary.size(), 1u);
    EXPECT_NEAR(shape.area(), 1.0, 1e-15);
}

TEST(AutoAlpha, LShapeIsTighterThanHull)
{
    std::mt19937_64 rng(42);
    const PointSet s(l_shape_points(rng, 200));
    const double alpha = auto_alpha(s);
    const auto shape = alpha_shape(s, alpha);
    ASSERT_EQ(shape.boundary.size(), 1u);
    for (const auto& p : s.points()) EXPECT_TRUE(point_in_polygon(p, shape.boundary[0]));
    EXPECT_LT(shape.area(), convex_hull(s).area());
}

TEST(AutoAlpha, ThreePointsGiveTheTriangle)
{
    const PointSet s(std::vector<PlanarPoint>{{0, 0}, {10, 0}, {3, 7}});
    const double alpha = auto_alpha(s);
    EXPECT_GE(alpha, kAlphaHull);
    const auto shape = alpha_shape(s, alpha);
    ASSERT_EQ(shape.boundary.size(), 1u);
    EXPECT_EQ(shape.boundary[0].vertices(), convex_hull(s).vertices());
}

TEST(AutoAlpha, AlwaysSingleCoveringRing)
{
    std::mt19937_64 rng(77);
    for (int i = 0; i < 20; ++i) {
        const PointSet s(random_points(rng, 30 + 3 * i, 200.0));
        const auto shape = alpha_shape(s, auto_alpha(s));
        ASSERT_EQ(shape.boundary.size(), 1u);
        for (const auto& p : s.points()) EXPECT_TRUE(point_in_polygon(p, shape.boundary[0]));
    }
}
