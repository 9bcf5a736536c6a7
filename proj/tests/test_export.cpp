#include <gtest/gtest.h>

#include "geofence/bench.hpp"
#include "geofence/geojson.hpp"
#include "geofence/storage.hpp"
#include "geofence/synthetic.hpp"

using namespace geofence;

namespace {

const LocalProjection kProj({51.43, -0.56});

std::vector<Zone> mixed_zones()
{
    Zone sq;
    sq.id = "sq";
    sq.name = "square";
    sq.category = "military";
    sq.geometry = Polygonal{{Polygon({{0, 0}, {100, 0}, {100, 100}, {0, 100}})}};
    Zone two = sq;
    two.id = "two";
    two.geometry = Polygonal{{Polygon({{300, 0}, {400, 0}, {400, 100}}), Polygon({{500, 0}, {600, 0}, {600, 100}})}};
    Zone circ;
    circ.id = "circ";
    circ.geometry = Circular{{-500, 0}, 40};
    Zone cyl;
    cyl.id = "cyl";
    cyl.geometry = Cylindrical{{-800, 0}, 40, 10, 90};
    Zone ell;
    ell.id = "ell";
    ell.mode = ZoneMode::KeepIn;
    ell.geometry = Elliptical{{0, 0}, 3000, 2000, 30};
    return {sq, two, circ, cyl, ell};
}

}  // namespace

TEST(Export, EmptyDatabaseIsEmptyCollection)
{
    const auto j = zones_geojson(CompiledDatabase{});
    EXPECT_EQ(j.at("type"), "FeatureCollection");
    EXPECT_TRUE(j.at("features").is_array());
    EXPECT_TRUE(j.at("features").empty());
}

TEST(Export, GeometryKindsAndProperties)
{
    const CompiledDatabase db(kProj, mixed_zones());
    const auto j = zones_geojson(db);
    ASSERT_EQ(j["features"].size(), 5u);
    std::map<std::string, nlohmann::json> by_id;
    for (const auto& f : j["features"]) {
        for (const char* key : {"id", "name", "category", "mode", "warning_buffer", "termination_buffer"}) {
            EXPECT_TRUE(f["properties"].contains(key)) << key;
        }
        by_id[f["properties"]["id"]] = f;
    }
    EXPECT_EQ(by_id["sq"]["geometry"]["type"], "Polygon");
    const auto& ring = by_id["sq"]["geometry"]["coordinates"][0];
    ASSERT_EQ(ring.size(), 5u);
    EXPECT_EQ(ring.front(), ring.back());
    EXPECT_NEAR(ring[0][0].get<double>(), -0.56, 1e-12);
    EXPECT_NEAR(ring[0][1].get<double>(), 51.43, 1e-12);
    EXPECT_EQ(by_id["two"]["geometry"]["type"], "MultiPolygon");
    EXPECT_EQ(by_id["two"]["geometry"]["coordinates"].size(), 2u);
    EXPECT_EQ(by_id["circ"]["geometry"]["type"], "Point");
    EXPECT_EQ(by_id["circ"]["properties"]["radius_m"], 40.0);
    EXPECT_EQ(by_id["cyl"]["properties"]["alt_max"], 90.0);
    EXPECT_EQ(by_id["ell"]["geometry"]["coordinates"][0].size(), 65u);
    EXPECT_EQ(by_id["ell"]["properties"]["mode"], "keep-in");
}

TEST(Export, FeatureCountMatchesZonesAndIsStable)
{
    CompileConfig cfg;
    cfg.mode = GeometryMode::Polygonal;
    const auto db = compile(synthetic_features(1309), CategoryFilter::default_profile(), cfg).db;
    const auto j = zones_geojson(db);
    EXPECT_EQ(j["features"].size(), 1309u);
    const auto reloaded = load(save(db));
    EXPECT_EQ(zones_geojson(reloaded).dump(), j.dump());
}

TEST(Export, CorridorAndPathLines)
{
    Zone z;
    z.id = "z";
    z.geometry = Circular{{0, 0}, 100};
    const CompiledDatabase db(kProj, {z});
    const auto g = database_corridor(db, 30.0);
    ASSERT_FALSE(g.edges.empty());
    const auto lines = corridor_features(g, db.projection);
    EXPECT_EQ(lines.size(), g.edges.size());
    EXPECT_EQ(lines[0]["geometry"]["type"], "LineString");
    const auto path = shortest_path(g, {-400, 0}, {400, 0}, {.connections = 4});
    const auto f = path_feature(path, db.projection);
    EXPECT_EQ(f["geometry"]["coordinates"].size(), path.waypoints.size());
    EXPECT_TRUE(database_corridor(CompiledDatabase{}, 30.0).nodes.empty());
}

TEST(Export, TraceHasTrackAndEventPoints)
{
    const CompiledDatabase db(kProj, mixed_zones());
    MissionPlan plan;
    plan.waypoints = {kProj.unproject({-200, -300}), kProj.unproject({-200, 300})};
    const auto trace = run(db, plan);
    const auto j = trace_geojson(trace);
    ASSERT_EQ(j["features"].size(), 1 + trace.events.size());
    EXPECT_EQ(j["features"][0]["geometry"]["type"], "LineString");
    EXPECT_EQ(j["features"][0]["geometry"]["coordinates"].size(), trace.states.size());
    EXPECT_EQ(j["features"][1]["properties"]["kind"], "GeofenceLoaded");
}

TEST(Bench, PhaseStatsInvariants)
{
    const auto s = phase_stats({5, 1, 4, 2, 3});
    EXPECT_EQ(s.samples, 5u);
    EXPECT_DOUBLE_EQ(s.mean, 3.0);
    EXPECT_EQ(s.p50, 3.0);
    EXPECT_EQ(s.p95, 5.0);
    const auto one = phase_stats({7});
    EXPECT_EQ(one.p50, 7.0);
    EXPECT_EQ(one.p95, 7.0);
}

TEST(Bench, SingleFeatureReport)
{
    BenchOptions opt;
    opt.queries = 20;
    const auto r = run_bench(synthetic_features(1), CategoryFilter::default_profile(), opt);
    EXPECT_EQ(r.zone_count, 1u);
    for (const auto* a : {&r.polygonal, &r.alpha}) {
        EXPECT_EQ(a->geofence_computation.samples, 3u);
        EXPECT_EQ(a->detection.samples, 20u);
        EXPECT_LE(a->geofence_computation.p50, a->geofence_computation.p95);
        EXPECT_LE(a->detection.p50, a->detection.p95);
    }
    const auto j = to_json(r);
    EXPECT_TRUE(j["algorithms"].contains("alpha"));
    EXPECT_TRUE(j["algorithms"].contains("polygonal"));
    EXPECT_EQ(j["environment"]["compile_threads"], "1");
    const auto table = format_table(r);
    EXPECT_NE(table.find("geofence_computation"), std::string::npos);
    EXPECT_NE(table.find("detection"), std::string::npos);
}

TEST(Bench, RejectsBadParameters)
{
    const auto f = synthetic_features(1);
    BenchOptions opt;
    opt.repetitions = 2;
    EXPECT_THROW(run_bench(f, CategoryFilter::default_profile(), opt), Error);
    opt = {};
    opt.queries = 0;
    EXPECT_THROW(run_bench(f, CategoryFilter::default_profile(), opt), Error);
    EXPECT_THROW(run_bench({}, CategoryFilter::default_profile(), {}), Error);
}
