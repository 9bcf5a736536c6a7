// Compiles the sample OSM extract and checks a handful of positions.
#include <cstdio>
#include <string>

#include "geofence/repository.hpp"
#include "geofence/storage.hpp"

using namespace geofence;

int main(int argc, char** argv)
{
    const std::string path = argc > 1 ? argv[1] : SAMPLE_DATA_DIR "/restricted_areas.geojson";
    const auto parsed = parse_features(read_file(path));
    const auto result = compile(parsed.records, CategoryFilter::default_profile(), CompileConfig{});
    std::printf("%zu features, %zu restricted zones\n", parsed.records.size(), result.db.zones().size());
    for (const auto& z : result.db.zones()) {
        std::printf("  %-12s %-22s %-9s\n", z.id.c_str(), z.name.c_str(), z.category.c_str());
    }

    const GeoPoint probes[] = {{51.4309, -0.5585}, {51.4309, -0.5566}, {51.4350, -0.5466}, {51.4400, -0.5800}};
    for (const auto& p : probes) {
        const auto r = result.db.evaluate_all(p);
        std::printf("(%.4f, %.4f) -> %s", p.lat, p.lon, std::string(to_string(r.worst)).c_str());
        for (const auto& e : r.results) std::printf("  [%s %.1f m]", e.zone_id.c_str(), e.signed_distance);
        std::printf("\n");
    }
    return 0;
}
