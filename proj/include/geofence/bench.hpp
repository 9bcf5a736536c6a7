#pragma once

#include <algorithm>
#include <chrono>
#include <iomanip>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "geofence/repository.hpp"

namespace geofence {

struct PhaseStats {
    std::size_t samples = 0;
    double mean = 0.0;
    double p50 = 0.0;
    double p95 = 0.0;
};

struct AlgorithmReport {
    GeometryMode mode = GeometryMode::Polygonal;
    PhaseStats geofence_computation;
    PhaseStats detection;
};

struct BenchReport {
    AlgorithmReport polygonal;
    AlgorithmReport alpha;
    std::size_t zone_count = 0;
    std::size_t query_count = 0;
    std::map<std::string, std::string> environment;
};

struct BenchOptions {
    std::size_t queries = 1000;
    std::size_t repetitions = 3;
    std::uint64_t seed = 1;
    unsigned threads = 1;
};

/// Nearest-rank percentile statistics in seconds.
inline PhaseStats phase_stats(std::vector<double> samples)
{
    PhaseStats s;
    s.samples = samples.size();
    if (samples.empty()) return s;
    std::sort(samples.begin(), samples.end());
    double sum = 0.0;
    for (double v : samples) sum += v;
    s.mean = sum / static_cast<double>(samples.size());
    auto rank = [&](double q) {
        const auto k = static_cast<std::size_t>(std::ceil(q * static_cast<double>(samples.size())));
        return samples[std::clamp<std::size_t>(k, 1, samples.size()) - 1];
    };
    s.p50 = rank(0.50);
    s.p95 = rank(0.95);
    return s;
}

inline std::map<std::string, std::string> bench_environment(unsigned threads)
{
    std::map<std::string, std::string> env;
#if defined(__clang__)
    env["compiler"] = "clang " __clang_version__;
#elif defined(__GNUC__)
    env["compiler"] = "gcc " __VERSION__;
#else
    env["compiler"] = "unknown";
#endif
#ifdef NDEBUG
    env["build"] = "release";
#else
    env["build"] = "debug";
#endif
#if defined(__linux__)
    env["os"] = "linux";
#elif defined(__APPLE__)
    env["os"] = "macos";
#elif defined(_WIN32)
    env["os"] = "windows";
#else
    env["os"] = "unknown";
#endif
    env["hardware_threads"] = std::to_string(std::thread::hardware_concurrency());
    env["compile_threads"] = std::to_string(threads);
    env["timer"] = "std::chrono::steady_clock";
    env["query_distribution"] = "uniform over the zone extent plus warning buffer";
    return env;
}

namespace detail {

template <class F>
double time_seconds(F&& f)
{
    const auto t0 = std::chrono::steady_clock::now();
    f();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

inline std::vector<GeoPoint> bench_queries(const CompiledDatabase& db, std::size_t n, std::uint64_t seed)
{
    PlanarPoint lo{-1.0, -1.0}, hi{1.0, 1.0};
    bool first = true;
    for (const auto& z : db.zones()) {
        const auto bc = bounding_circle(z);
        const double r = bc.radius + z.warning_buffer;
        if (first) {
            lo = {bc.center.x - r, bc.center.y - r};
            hi = {bc.center.x + r, bc.center.y + r};
            first = false;
        }
        lo = {std::min(lo.x, bc.center.x - r), std::min(lo.y, bc.center.y - r)};
        hi = {std::max(hi.x, bc.center.x + r), std::max(hi.y, bc.center.y + r)};
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(lo.x, hi.x), uy(lo.y, hi.y);
    std::vector<GeoPoint> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(db.projection.unproject({ux(rng), uy(rng)}));
    return out;
}

}  // namespace detail

/// Times database compilation in polygonal and α-shape modes (`repetitions`
/// runs each) and single-query evaluation over `queries` random points
/// shared by both modes. Measurement itself is single-threaded.
inline BenchReport run_bench(std::span<const FeatureRecord> features, const CategoryFilter& filter,
                             const BenchOptions& opt)
{
    if (features.empty()) throw Error(ErrorCode::InvalidInput, "bench needs at least one feature");
    if (opt.queries < 1) throw Error(ErrorCode::InvalidInput, "bench needs at least one query");
    if (opt.repetitions < 3) throw Error(ErrorCode::InvalidInput, "bench needs at least three repetitions");

    BenchReport report;
    report.query_count = opt.queries;
    report.environment = bench_environment(opt.threads);
    report.alpha.mode = GeometryMode::Alpha;

    std::vector<GeoPoint> queries;
    for (AlgorithmReport* alg : {&report.polygonal, &report.alpha}) {
        CompileConfig cfg;
        cfg.mode = alg->mode;
        cfg.threads = opt.threads;
        cfg.timestamp = 0;
        std::vector<double> compile_times;
        std::optional<CompiledDatabase> db;
        for (std::size_t r = 0; r < opt.repetitions; ++r) {
            compile_times.push_back(detail::time_seconds([&] { db = compile(features, filter, cfg).db; }));
        }
        alg->geofence_computation = phase_stats(std::move(compile_times));
        report.zone_count = db->zones().size();
        if (queries.empty()) queries = detail::bench_queries(*db, opt.queries, opt.seed);

        std::vector<double> detect;
        detect.reserve(queries.size());
        ViolationStatus sink = ViolationStatus::Clear;
        for (const auto& q : queries) {
            detect.push_back(detail::time_seconds([&] { sink = std::max(sink, db->evaluate_all(q).worst); }));
        }
        alg->detection = phase_stats(std::move(detect));
    }
    return report;
}

inline nlohmann::json to_json(const BenchReport& r)
{
    using nlohmann::json;
    auto stats = [](const PhaseStats& s) {
        return json{{"samples", s.samples}, {"mean_s", s.mean}, {"p50_s", s.p50}, {"p95_s", s.p95}};
    };
    json algorithms = json::object();
    for (const auto* a : {&r.polygonal, &r.alpha}) {
        algorithms[std::string(to_string(a->mode))] = {{"geofence_computation", stats(a->geofence_computation)},
                                                       {"detection", stats(a->detection)}};
    }
    return {{"algorithms", std::move(algorithms)},
            {"zone_count", r.zone_count},
            {"query_count", r.query_count},
            {"environment", r.environment}};
}

inline std::string format_table(const BenchReport& r)
{
    std::ostringstream out;
    out << "zones: " << r.zone_count << "  queries: " << r.query_count << "\n";
    out << std::left << std::setw(11) << "algorithm" << std::setw(22) << "phase" << std::right << std::setw(8)
        << "samples" << std::setw(14) << "mean [s]" << std::setw(14) << "p50 [s]" << std::setw(14) << "p95 [s]"
        << "\n";
    for (const auto* a : {&r.polygonal, &r.alpha}) {
        for (const auto& [phase, s] : {std::pair{"geofence_computation", a->geofence_computation},
                                       std::pair{"detection", a->detection}}) {
            out << std::left << std::setw(11) << to_string(a->mode) << std::setw(22) << phase << std::right
                << std::setw(8) << s.samples << std::scientific << std::setprecision(4) << std::setw(14) << s.mean
                << std::setw(14) << s.p50 << std::setw(14) << s.p95 << std::defaultfloat << "\n";
        }
    }
    for (const auto& [k, v] : r.environment) out << k << ": " << v << "\n";
    return out.str();
}

}  // namespace geofence
