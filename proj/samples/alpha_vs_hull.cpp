// Compares an auto-alpha shape with the convex hull on an L-shaped cloud,
// then routes around a circular no-fly zone on a Voronoi corridor.
#include <cstdio>
#include <random>

#include "geofence/alphashape.hpp"
#include "geofence/voronoi.hpp"

using namespace geofence;

int main()
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> coord(0.0, 100.0);
    std::vector<PlanarPoint> pts;
    while (pts.size() < 200) {
        const PlanarPoint p{coord(rng), coord(rng)};
        if (p.x <= 20.0 || p.y <= 20.0) pts.push_back(p);
    }
    const PointSet cloud(pts);
    const double alpha = auto_alpha(cloud);
    const auto shape = alpha_shape(cloud, alpha);
    const auto hull = convex_hull(cloud);
    std::printf("alpha %.4g 1/m: shape area %.1f m^2 (%zu vertices), hull area %.1f m^2 (%zu vertices)\n", alpha,
                shape.area(), shape.boundary.front().size(), hull.area(), hull.size());

    Zone nfz;
    nfz.id = "nfz";
    nfz.geometry = Circular{{500, 500}, 120};
    std::vector<PlanarPoint> sites;
    std::uniform_real_distribution<double> site(20.0, 980.0);
    for (int i = 0; i < 120; ++i) sites.push_back({site(rng), site(rng)});
    const auto graph = build_corridor(voronoi(PointSet(sites), BoundingBox({0, 0}, {1000, 1000})), {&nfz, 1}, 25.0);
    const auto path = shortest_path(graph, {100, 500}, {900, 500}, {.connections = 4});
    std::printf("corridor: %zu nodes, %zu edges; path of %zu waypoints, %.1f m (straight line 800 m)\n",
                graph.nodes.size(), graph.edges.size(), path.waypoints.size(), path.total_length);
    return 0;
}
