// Flies the sample tour through the compiled sample zones and prints the event log.
#include <cstdio>
#include <iostream>
#include <string>

#include "geofence/geojson.hpp"
#include "geofence/plan.hpp"
#include "geofence/repository.hpp"
#include "geofence/storage.hpp"

using namespace geofence;

int main(int argc, char** argv)
{
    const auto parsed = parse_features(read_file(SAMPLE_DATA_DIR "/restricted_areas.geojson"));
    const auto db = compile(parsed.records, CategoryFilter::default_profile(), CompileConfig{}).db;
    const auto plan = parse_plan(read_file(SAMPLE_DATA_DIR "/plan_tour.json"));

    const auto trace = run(db, plan);
    std::cout << format_event_log(trace);
    std::printf("completed: %s, distance %.1f m, worst status %s\n", trace.summary.completed ? "yes" : "no",
                trace.summary.total_distance, std::string(to_string(trace.summary.worst_status)).c_str());
    if (argc > 1) write_file(argv[1], trace_geojson(trace).dump(2) + "\n");
    return trace.summary.completed ? 0 : 1;
}
