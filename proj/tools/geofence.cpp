#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "geofence/bench.hpp"
#include "geofence/geojson.hpp"
#include "geofence/plan.hpp"
#include "geofence/storage.hpp"
#include "geofence/synthetic.hpp"

using namespace geofence;

namespace {

enum Exit : int {
    kOk = 0,
    kError = 1,
    kWarning = 2,
    kTerminate = 3,
    kViolation = 4,
    kArmingRefused = 5,
    kMissionIncomplete = 6,
};

int status_exit(ViolationStatus s)
{
    switch (s) {
    case ViolationStatus::Clear: return kOk;
    case ViolationStatus::Warning: return kWarning;
    case ViolationStatus::Terminate: return kTerminate;
    case ViolationStatus::Violation: return kViolation;
    }
    return kError;
}

void configure_logging()
{
    auto logger = spdlog::stderr_color_st("geofence");
    logger->set_pattern("[%l] %v");
    spdlog::set_default_logger(logger);
    spdlog::set_level(spdlog::level::warn);
    if (const char* env = std::getenv("GEOFENCE_LOG_LEVEL")) {
        const auto level = spdlog::level::from_str(env);
        if (level == spdlog::level::off && std::string(env) != "off") {
            spdlog::warn("ignoring unknown GEOFENCE_LOG_LEVEL '{}'", env);
        } else {
            spdlog::set_level(level);
        }
    }
}

struct Options {
    std::string input;
    std::string db;
    std::string out;
    std::string filter_profile = "default";
    std::string mode = "alpha";
    std::string alpha = "auto";
    double warning_m = kDefaultWarningBufferM;
    double termination_m = kDefaultTerminationBufferM;
    std::uint64_t seed = 1;
    std::string format = "table";
    unsigned threads = 1;

    double lat = 0.0, lon = 0.0;
    std::optional<double> alt;

    std::string plan;
    std::string log;
    bool no_replan = false;
    bool override_redirect = false;

    bool corridor = false;
    double clearance = 0.0;

    std::size_t synthetic = 0;
    std::size_t queries = 1000;
    std::size_t repetitions = 3;
};

CategoryFilter load_filter(const std::string& profile)
{
    if (profile == "default") return CategoryFilter::default_profile();
    return CategoryFilter::from_json(read_file(profile));
}

std::string input_text(const std::string& path, std::string& digest)
{
    const auto text = read_file(path);
    digest = sha256_hex(text);
    return text;
}

std::vector<FeatureRecord> parse_input(const std::string& path, std::string& digest)
{
    auto parsed = parse_features(input_text(path, digest));
    if (!parsed.diagnostics.empty()) spdlog::warn("{}", format_diagnostics(parsed.diagnostics));
    spdlog::info("parsed {} features, skipped {}", parsed.records.size(), parsed.skipped);
    return std::move(parsed.records);
}

int cmd_compile(const Options& o)
{
    std::string digest;
    const auto records = parse_input(o.input, digest);
    CompileConfig cfg;
    const auto mode = parse_geometry_mode(o.mode);
    if (!mode) throw Error(ErrorCode::UnsupportedParameter, "unknown mode " + o.mode);
    cfg.mode = *mode;
    if (o.alpha != "auto") {
        try {
            cfg.alpha = std::stod(o.alpha);
        } catch (const std::exception&) {
            throw Error(ErrorCode::UnsupportedParameter, "alpha must be 'auto' or a number, got " + o.alpha);
        }
    }
    cfg.warning_buffer = o.warning_m;
    cfg.termination_buffer = o.termination_m;
    cfg.threads = o.threads;
    const auto result = compile(records, load_filter(o.filter_profile), cfg, digest);
    for (const auto& d : result.diagnostics) spdlog::warn("{}", format_diagnostics({d}));
    write_file(o.out, save(result.db));
    std::cout << "compiled " << result.db.zones().size() << " zones from " << records.size() << " features into "
              << o.out << "\n";
    return kOk;
}

int cmd_check(const Options& o)
{
    const auto db = load_file(o.db);
    GeoPoint q{o.lat, o.lon};
    q.alt = o.alt;
    const auto report = db.evaluate_all(q);
    if (o.format == "json") {
        nlohmann::json results = nlohmann::json::array();
        for (const auto& r : report.results) {
            results.push_back({{"zone_id", r.zone_id},
                               {"status", std::string(to_string(r.status))},
                               {"signed_distance", r.signed_distance}});
        }
        std::cout << nlohmann::json{{"worst", std::string(to_string(report.worst))},
                                    {"out_of_coverage", report.out_of_coverage},
                                    {"results", results}}
                         .dump(2)
                  << "\n";
    } else {
        std::cout << to_string(report.worst) << "\n";
        if (report.out_of_coverage) std::cout << "out of coverage\n";
        for (const auto& r : report.results) {
            std::cout << r.zone_id << "\t" << to_string(r.status) << "\t" << r.signed_distance << "\n";
        }
    }
    return status_exit(report.worst);
}

int cmd_simulate(const Options& o)
{
    const auto db = load_file(o.db);
    auto plan = parse_plan(read_file(o.plan));
    if (o.no_replan) plan.replan_enabled = false;
    if (o.override_redirect) plan.override_redirect = true;
    MissionTrace trace;
    try {
        trace = run(db, plan);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::ArmingRefused) throw;
        spdlog::error("{}", e.what());
        return kArmingRefused;
    }
    const auto log = format_event_log(trace);
    std::cout << log;
    if (!o.log.empty()) write_file(o.log, log);
    if (!o.out.empty()) write_file(o.out, trace_geojson(trace).dump(2) + "\n");
    const bool violated = std::any_of(trace.events.begin(), trace.events.end(),
                                      [](const MissionEvent& e) { return e.kind == EventKind::ViolationEntered; });
    return trace.summary.completed && !violated ? kOk : kMissionIncomplete;
}

int cmd_export(const Options& o)
{
    const auto db = load_file(o.db);
    auto doc = zones_geojson(db);
    if (o.corridor) {
        double clearance = o.clearance;
        if (!(clearance > 0.0)) {
            for (const auto& z : db.zones()) clearance = std::max(clearance, z.warning_buffer + 1.0);
        }
        const auto g = database_corridor(db, std::max(clearance, 1.0));
        for (auto& f : corridor_features(g, db.projection)) doc["features"].push_back(std::move(f));
    }
    write_file(o.out, doc.dump(2) + "\n");
    std::cout << "exported " << doc["features"].size() << " features to " << o.out << "\n";
    return kOk;
}

int cmd_bench(const Options& o)
{
    std::vector<FeatureRecord> records;
    if (o.synthetic > 0) {
        SyntheticFixture fx;
        fx.seed = o.seed;
        records = synthetic_features(o.synthetic, fx);
    } else if (!o.input.empty()) {
        std::string digest;
        records = parse_input(o.input, digest);
    } else {
        throw Error(ErrorCode::InvalidInput, "bench needs an input file or --synthetic N");
    }
    BenchOptions opt;
    opt.queries = o.queries;
    opt.repetitions = o.repetitions;
    opt.seed = o.seed;
    opt.threads = o.threads;
    const auto report = run_bench(records, load_filter(o.filter_profile), opt);
    const auto json = to_json(report).dump(2) + "\n";
    if (o.format == "json") {
        std::cout << json;
    } else {
        std::cout << format_table(report);
    }
    if (!o.out.empty()) write_file(o.out, json);
    return kOk;
}

}  // namespace

int main(int argc, char** argv)
{
    configure_logging();
    Options o;
    CLI::App app{"Geofence compiler, checker, mission simulator and benchmark"};
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("--seed", o.seed, "Seed for synthetic fixtures and query sampling");
    app.add_option("--format", o.format, "Output format")->check(CLI::IsMember({"table", "json"}));

    auto filter_opts = [&](CLI::App* c) {
        c->add_option("--filter-profile", o.filter_profile, "'default' or a JSON rule file");
    };

    auto* compile_cmd = app.add_subcommand("compile", "Compile OSM GeoJSON features into a database");
    compile_cmd->add_option("input", o.input, "GeoJSON or NDJSON feature file")->required();
    compile_cmd->add_option("--out,--db", o.out, "Output database path")->required();
    filter_opts(compile_cmd);
    compile_cmd->add_option("--mode", o.mode)->check(CLI::IsMember({"alpha", "polygonal", "hull"}));
    compile_cmd->add_option("--alpha", o.alpha, "'auto' or a fixed alpha in 1/m");
    compile_cmd->add_option("--warning-m", o.warning_m);
    compile_cmd->add_option("--termination-m", o.termination_m);
    compile_cmd->add_option("--threads", o.threads, "Worker threads, 0 for all cores");

    auto* check_cmd = app.add_subcommand("check", "Evaluate one position against a database");
    check_cmd->add_option("--db", o.db)->required();
    check_cmd->add_option("lat", o.lat)->required();
    check_cmd->add_option("lon", o.lon)->required();
    check_cmd->add_option("alt", o.alt);

    auto* sim_cmd = app.add_subcommand("simulate", "Fly a scripted mission");
    sim_cmd->add_option("--db", o.db)->required();
    sim_cmd->add_option("plan", o.plan, "Mission plan JSON")->required();
    sim_cmd->add_option("--out", o.out, "Trace GeoJSON output");
    sim_cmd->add_option("--log", o.log, "Event log output");
    sim_cmd->add_flag("--no-replan", o.no_replan);
    sim_cmd->add_flag("--override", o.override_redirect);

    auto* export_cmd = app.add_subcommand("export", "Write zones as GeoJSON");
    export_cmd->add_option("--db", o.db)->required();
    export_cmd->add_option("--out", o.out)->required();
    export_cmd->add_flag("--corridor", o.corridor, "Include the corridor graph");
    export_cmd->add_option("--clearance", o.clearance, "Corridor clearance in metres");

    auto* bench_cmd = app.add_subcommand("bench", "Time compilation and detection for both geofence modes");
    bench_cmd->add_option("input", o.input, "GeoJSON feature file");
    bench_cmd->add_option("--synthetic", o.synthetic, "Use N synthetic star polygons instead of a file");
    bench_cmd->add_option("--queries", o.queries)->check(CLI::PositiveNumber);
    bench_cmd->add_option("--repetitions", o.repetitions)->check(CLI::Range(std::size_t{3}, std::size_t{1'000'000}));
    bench_cmd->add_option("--out", o.out, "JSON report output");
    bench_cmd->add_option("--threads", o.threads);
    filter_opts(bench_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kError;
    }

    try {
        if (*compile_cmd) return cmd_compile(o);
        if (*check_cmd) return cmd_check(o);
        if (*sim_cmd) return cmd_simulate(o);
        if (*export_cmd) return cmd_export(o);
        return cmd_bench(o);
    } catch (const Error& e) {
        spdlog::error("{}", e.what());
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
    }
    return kError;
}
