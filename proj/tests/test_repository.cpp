#include <gtest/gtest.h>

#include <random>

#include "geofence/repository.hpp"
#include "geofence/storage.hpp"
#include "geofence/synthetic.hpp"

using namespace geofence;

namespace {

std::string fixture(const std::string& name) { return read_file(std::string(GEOFENCE_FIXTURE_DIR) + "/" + name); }

ErrorCode code_of(const std::function<void()>& f)
{
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error thrown";
    return ErrorCode::Io;
}

}  // namespace

TEST(Parse, ForestFeatureRecord)
{
    const auto parsed = parse_features(fixture("forest_feature.geojson"));
    ASSERT_EQ(parsed.records.size(), 1u);
    const auto& f = parsed.records[0];
    EXPECT_EQ(f.osm_id, "533025");
    EXPECT_EQ(f.name, std::optional<std::string>("Canada Copse"));
    EXPECT_EQ(f.tag("landuse"), std::optional<std::string>("forest"));
    EXPECT_EQ(f.feature_type, "multipolygon");
    EXPECT_TRUE(f.tags.contains("military"));
    EXPECT_FALSE(f.tag("military").has_value());
    ASSERT_EQ(f.rings.size(), 1u);
    EXPECT_EQ(f.rings[0].size(), 5u);
    EXPECT_DOUBLE_EQ(f.rings[0][0].lon, -0.5712);
    EXPECT_DOUBLE_EQ(f.rings[0][0].lat, 51.4301);
    EXPECT_FALSE(classify(f, CategoryFilter::default_profile()).has_value());
}

TEST(Parse, EmptyCollection)
{
    const auto parsed = parse_features(R"({"type": "FeatureCollection", "features": []})");
    EXPECT_TRUE(parsed.records.empty());
    EXPECT_TRUE(parsed.diagnostics.empty());
}

TEST(Parse, SkipsPointsAndDropsHoles)
{
    const auto parsed = parse_features(fixture("mixed_geometry.geojson"));
    ASSERT_EQ(parsed.records.size(), 1u);
    EXPECT_EQ(parsed.skipped, 1u);
    ASSERT_EQ(parsed.diagnostics.size(), 2u);
    EXPECT_NE(parsed.diagnostics[0].reason.find("inner ring"), std::string::npos);
    EXPECT_EQ(parsed.diagnostics[1].osm_id, "2");
    EXPECT_EQ(parsed.records[0].rings.size(), 1u);
}

TEST(Parse, NewlineDelimitedAndWayIdFallback)
{
    const auto parsed = parse_features(fixture("features.ndjson"));
    ASSERT_EQ(parsed.records.size(), 2u);
    EXPECT_EQ(parsed.records[1].osm_id, "11");
    EXPECT_EQ(parsed.records[1].index, 1u);
}

TEST(Parse, MalformedDocumentsAreTypedErrors)
{
    EXPECT_EQ(code_of([] { (void)parse_features("{\"type\": \"FeatureCollection\", \"features\": [\n"); }),
              ErrorCode::Parse);
    try {
        (void)parse_features("{\"type\": \"Feature\"}\n{oops}\n");
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
    }
    const auto parsed = parse_features(R"({"type": "Feature", "properties": {"name": "x"}, "geometry": null})");
    EXPECT_TRUE(parsed.records.empty());
    EXPECT_EQ(parsed.diagnostics.at(0).reason, "missing osm_id");
}

TEST(Parse, FuzzNeverEscapesTypedErrors)
{
    const std::string base = fixture("military_square.geojson");
    std::mt19937_64 rng(13);
    std::uniform_int_distribution<std::size_t> pos(0, base.size() - 1);
    std::uniform_int_distribution<int> byte(32, 126);
    for (int i = 0; i < 2000; ++i) {
        std::string text = base;
        for (int k = 0; k < 3; ++k) text[pos(rng)] = static_cast<char>(byte(rng));
        try {
            const auto parsed = parse_features(text);
            CompileConfig cfg;
            (void)compile(parsed.records, CategoryFilter::default_profile(), cfg);
        } catch (const Error&) {
        }
    }
}

TEST(Classify, DefaultRulesAndOrder)
{
    FeatureRecord f;
    f.osm_id = "1";
    f.tags["military"] = "barracks";
    EXPECT_EQ(classify(f, CategoryFilter::default_profile()), std::optional<std::string>("military"));

    const auto parsed = parse_features(fixture("rule_order.geojson"));
    ASSERT_EQ(parsed.records.size(), 1u);
    const auto& r = parsed.records[0];
    EXPECT_EQ(r.tag("power"), std::optional<std::string>("plant"));
    EXPECT_EQ(classify(r, CategoryFilter::default_profile()), std::optional<std::string>("aeroway"));
    const CategoryFilter prison_first{{{"amenity", "pri*", "prison"}, {"aeroway", std::nullopt, "aeroway"}}};
    EXPECT_EQ(classify(r, prison_first), std::optional<std::string>("prison"));
    const CategoryFilter none{{{"amenity", "school", "school"}}};
    EXPECT_FALSE(classify(r, none).has_value());
}

TEST(Classify, ProfileFromJson)
{
    const auto f = CategoryFilter::from_json(R"([{"key": "landuse", "value": "forest", "category": "woods"}])");
    const auto rec = parse_features(fixture("forest_feature.geojson")).records.at(0);
    EXPECT_EQ(classify(rec, f), std::optional<std::string>("woods"));
    EXPECT_THROW(CategoryFilter::from_json("[]"), Error);
}

TEST(Compile, ZeroRestrictedFeatures)
{
    const auto parsed = parse_features(fixture("forest_feature.geojson"));
    const auto res = compile(parsed.records, CategoryFilter::default_profile(), {});
    EXPECT_TRUE(res.db.zones().empty());
}

TEST(Compile, MilitarySquareBecomesItsAlphaShape)
{
    const auto parsed = parse_features(fixture("military_square.geojson"));
    const auto res = compile(parsed.records, CategoryFilter::default_profile(), {});
    ASSERT_EQ(res.db.zones().size(), 1u);
    const auto& z = res.db.zones()[0];
    EXPECT_EQ(z.id, "osm:900001");
    EXPECT_EQ(z.mode, ZoneMode::KeepOut);
    EXPECT_EQ(z.category, "military");
    const auto* a = std::get_if<AlphaZone>(&z.geometry);
    ASSERT_NE(a, nullptr);
    ASSERT_EQ(a->shape.boundary.size(), 1u);
    std::vector<PlanarPoint> expected;
    for (const auto& g : parsed.records[0].rings[0]) expected.push_back(res.db.projection.project(g));
    auto got = a->shape.boundary[0].vertices();
    std::sort(expected.begin(), expected.end());
    std::sort(got.begin(), got.end());
    EXPECT_EQ(got, expected);

    // projection origin is the centroid of every feature coordinate
    double lat = 0, lon = 0, n = 0;
    for (const auto& f : parsed.records) {
        for (const auto& g : f.rings[0]) {
            lat += g.lat;
            lon += g.lon;
            ++n;
        }
    }
    EXPECT_NEAR(res.db.projection.origin().lat, lat / n, 1e-12);
    EXPECT_NEAR(res.db.projection.origin().lon, lon / n, 1e-12);
}

TEST(Compile, ModesAndFallbacks)
{
    auto feature = [](std::string id, std::vector<GeoPoint> ring) {
        FeatureRecord f;
        f.osm_id = std::move(id);
        f.tags["aeroway"] = "aerodrome";
        f.rings.push_back(std::move(ring));
        return f;
    };
    const std::vector<FeatureRecord> feats{
        feature("line", {{50.0, 1.0}, {50.001, 1.0}, {50.002, 1.0}}),
        feature("bowtie", {{50.0, 1.0}, {50.001, 1.001}, {50.0, 1.001}, {50.001, 1.0}}),
    };
    CompileConfig poly;
    poly.mode = GeometryMode::Polygonal;
    const auto res = compile(feats, CategoryFilter::default_profile(), poly);
    ASSERT_EQ(res.db.zones().size(), 2u);
    EXPECT_TRUE(std::holds_alternative<Polygonal>(res.db.find("osm:bowtie")->geometry));
    const auto* circle = std::get_if<Circular>(&res.db.find("osm:line")->geometry);
    ASSERT_NE(circle, nullptr);
    EXPECT_GT(circle->radius, 5.0);
    EXPECT_EQ(res.diagnostics.size(), 3u);

    CompileConfig hull;
    hull.mode = GeometryMode::Hull;
    const auto h = compile(feats, CategoryFilter::default_profile(), hull);
    EXPECT_EQ(std::get<Polygonal>(h.db.find("osm:bowtie")->geometry).rings[0].size(), 4u);
}

TEST(Compile, KeepInTagAndBuffers)
{
    FeatureRecord f;
    f.osm_id = "fence";
    f.tags["military"] = "training_area";
    f.tags["geofence_mode"] = "keep-in";
    f.rings.push_back({{50.0, 1.0}, {50.0, 1.01}, {50.01, 1.01}, {50.01, 1.0}});
    CompileConfig cfg;
    cfg.warning_buffer = 80;
    cfg.termination_buffer = 30;
    const auto res = compile(std::vector<FeatureRecord>{f}, CategoryFilter::default_profile(), cfg);
    const auto& z = res.db.zones().at(0);
    EXPECT_EQ(z.mode, ZoneMode::KeepIn);
    EXPECT_EQ(z.warning_buffer, 80);
    EXPECT_EQ(z.termination_buffer, 30);
}

TEST(Compile, AlphaTighterThanHullAndVerticesFromSource)
{
    const auto feats = synthetic_features(60, {.seed = 3});
    CompileConfig alpha, hull;
    hull.mode = GeometryMode::Hull;
    const auto a = compile(feats, CategoryFilter::default_profile(), alpha);
    const auto h = compile(feats, CategoryFilter::default_profile(), hull);
    ASSERT_EQ(a.db.zones().size(), 60u);
    int strict = 0;
    for (std::size_t i = 0; i < 60; ++i) {
        const auto& za = a.db.zones()[i];
        const auto& shape = std::get<AlphaZone>(za.geometry).shape;
        for (const auto& ring : shape.boundary) {
            for (const auto& v : ring.vertices()) {
                EXPECT_NE(std::find(shape.source.points().begin(), shape.source.points().end(), v),
                          shape.source.points().end());
            }
        }
        const double hull_area = std::get<Polygonal>(h.db.zones()[i].geometry).rings[0].area();
        EXPECT_LE(shape.area(), hull_area * (1 + 1e-12));
        strict += shape.area() < hull_area ? 1 : 0;
    }
    EXPECT_EQ(strict, 60);
}

TEST(Storage, RoundTripEmptyAndLarge)
{
    const CompiledDatabase empty;
    const auto bytes = save(empty);
    EXPECT_EQ(load(bytes), empty);
    EXPECT_EQ(save(load(bytes)), bytes);

    CompileConfig cfg;
    cfg.threads = 4;
    const auto db = compile(synthetic_features(1309), CategoryFilter::default_profile(), cfg, "abc").db;
    const auto saved = save(db);
    const auto back = load(saved);
    ASSERT_EQ(back.zones().size(), 1309u);
    for (std::size_t i = 0; i < back.zones().size(); ++i) EXPECT_EQ(back.zones()[i], db.zones()[i]);
    EXPECT_EQ(back, db);
    EXPECT_EQ(save(back), saved);
}

TEST(Storage, CorruptionAndVersion)
{
    Zone z;
    z.id = "a";
    z.geometry = Elliptical{{1, 2}, 30, 10, 45};
    const CompiledDatabase db(LocalProjection({51.0, 0.5}), {z});
    const auto bytes = save(db);
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<std::size_t> pos(0, bytes.size() - 1);
    for (int i = 0; i < 300; ++i) {
        std::string bad = bytes;
        const auto k = pos(rng);
        bad[k] = static_cast<char>(bad[k] ^ 0x01);
        EXPECT_EQ(code_of([&] { (void)load(bad); }), ErrorCode::Integrity) << "offset " << k;
    }
    EXPECT_EQ(code_of([] { (void)load("not json"); }), ErrorCode::Integrity);

    auto doc = nlohmann::json::parse(bytes);
    doc.erase("sha256");
    doc["format_version"] = 2;
    doc["sha256"] = sha256_hex([&] {
        auto body = doc;
        body.erase("sha256");
        return body.dump();
    }());
    EXPECT_EQ(code_of([&] { (void)load(doc.dump(2) + "\n"); }), ErrorCode::Version);
}

TEST(Storage, Sha256KnownVector)
{
    EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Compile, DeterministicAcrossThreads)
{
    const auto text = synthetic_geojson(200, {.seed = 9});
    const auto parsed = parse_features(text);
    CompileConfig serial, parallel;
    parallel.threads = 8;
    const auto digest = sha256_hex(text);
    const auto a = save(compile(parsed.records, CategoryFilter::default_profile(), serial, digest).db);
    const auto b = save(compile(parsed.records, CategoryFilter::default_profile(), parallel, digest).db);
    const auto c = save(compile(parse_features(text).records, CategoryFilter::default_profile(), serial, digest).db);
    EXPECT_EQ(a, b);
    EXPECT_EQ(a, c);
}
