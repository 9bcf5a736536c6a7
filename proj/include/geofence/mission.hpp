#pragma once

#include <cmath>
#include <iomanip>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "geofence/database.hpp"
#include "geofence/voronoi.hpp"

namespace geofence {

enum class Phase { Grounded, Flying, EmergencyLanding, Terminated };

constexpr std::string_view to_string(Phase p) noexcept
{
    switch (p) {
    case Phase::Grounded: return "Grounded";
    case Phase::Flying: return "Flying";
    case Phase::EmergencyLanding: return "EmergencyLanding";
    case Phase::Terminated: return "Terminated";
    }
    return "Grounded";
}

enum class EventKind {
    GeofenceLoaded,
    WarningIssued,
    PathReplanned,
    TerminateIssued,
    EmergencyLanding,
    ViolationEntered,
    MissionComplete,
};

constexpr std::string_view to_string(EventKind k) noexcept
{
    switch (k) {
    case EventKind::GeofenceLoaded: return "GeofenceLoaded";
    case EventKind::WarningIssued: return "WarningIssued";
    case EventKind::PathReplanned: return "PathReplanned";
    case EventKind::TerminateIssued: return "TerminateIssued";
    case EventKind::EmergencyLanding: return "EmergencyLanding";
    case EventKind::ViolationEntered: return "ViolationEntered";
    case EventKind::MissionComplete: return "MissionComplete";
    }
    return "GeofenceLoaded";
}

struct MissionPlan {
    std::vector<GeoPoint> waypoints;
    double speed = 10.0;
    double tick = 0.1;
    /// Operator refuses automatic redirection; Terminate then forces a landing.
    bool override_redirect = false;
    bool replan_enabled = true;
    /// Hard stop for run(); absent derives a bound from the route length.
    std::optional<double> max_duration;
    /// Uniform horizontal position noise (m) applied to evaluated fixes.
    double noise_m = 0.0;
    std::uint64_t noise_seed = 0;
    double descent_rate = 3.0;
    /// Corridor clearance for replanning; absent uses the largest warning buffer + 1 m.
    std::optional<double> clearance;
};

struct UavState {
    GeoPoint position;
    double heading = 0.0;  // compass degrees, clockwise from north
    double time = 0.0;
    Phase phase = Phase::Grounded;
};

struct MissionEvent {
    double time = 0.0;
    EventKind kind = EventKind::GeofenceLoaded;
    std::optional<std::string> zone_id;
    std::string detail;
    GeoPoint position;
};

struct MissionSummary {
    bool completed = false;
    ViolationStatus worst_status = ViolationStatus::Clear;
    double total_distance = 0.0;
};

struct MissionTrace {
    std::vector<UavState> states;
    std::vector<MissionEvent> events;
    MissionSummary summary;
};

namespace detail {

inline constexpr double kSubstepM = 2.0;

struct RoutePoint {
    PlanarPoint p;
    std::optional<double> alt;
};

/// Sites along the boundary of a zone footprint, roughly `spacing` apart.
inline void zone_sites(const Zone& z, double spacing, std::vector<PlanarPoint>& out)
{
    auto ring_sites = [&](const std::vector<PlanarPoint>& ring) {
        double perimeter = 0.0;
        for (std::size_t i = 0; i < ring.size(); ++i) perimeter += distance(ring[i], ring[(i + 1) % ring.size()]);
        const double step = std::max(spacing, perimeter / 256.0);
        for (std::size_t i = 0; i < ring.size(); ++i) {
            const PlanarPoint a = ring[i], b = ring[(i + 1) % ring.size()];
            const int n = std::max(1, static_cast<int>(std::ceil(distance(a, b) / step)));
            for (int k = 0; k < n; ++k) out.push_back(a + (b - a) * (static_cast<double>(k) / n));
        }
    };
    auto circle_sites = [&](PlanarPoint c, double a, double b, double heading_deg) {
        const double circumference = 2.0 * std::numbers::pi * std::max(a, b);
        const int n = std::clamp(static_cast<int>(std::ceil(circumference / spacing)), 16, 256);
        const double t = heading_deg * kDegToRad;
        for (int k = 0; k < n; ++k) {
            const double u = 2.0 * std::numbers::pi * k / n;
            const double lx = a * std::cos(u), ly = b * std::sin(u);
            out.push_back({c.x + lx * std::cos(t) - ly * std::sin(t), c.y + lx * std::sin(t) + ly * std::cos(t)});
        }
    };
    std::visit(
        [&](const auto& g) {
            using G = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<G, Polygonal> || std::is_same_v<G, AlphaZone>) {
                for (const auto& ring : rings_of(z.geometry)) ring_sites(ring.vertices());
            } else if constexpr (std::is_same_v<G, Elliptical>) {
                circle_sites(g.center, g.semi_major, g.semi_minor, g.heading);
            } else {
                circle_sites(g.center, g.radius, g.radius, 0.0);
            }
        },
        z.geometry);
}

inline double compass_heading(PlanarPoint from, PlanarPoint to)
{
    const PlanarPoint d = to - from;
    double h = std::atan2(d.x, d.y) / kDegToRad;
    if (h < 0.0) h += 360.0;
    return h;
}

}  // namespace detail

/// Scripted flight over a compiled database: initialization and arming,
/// per-tick geofence evaluation, and alert / replan / land / terminate actions.
/// The database must outlive the engine.
class MissionEngine {
public:
    MissionEngine(const CompiledDatabase& db, MissionPlan plan) : db_(&db), plan_(std::move(plan))
    {
        if (plan_.waypoints.empty()) throw Error(ErrorCode::InvalidInput, "mission needs at least one waypoint");
        if (!(plan_.speed > 0.0) || !std::isfinite(plan_.speed)) throw Error(ErrorCode::InvalidInput, "speed must be > 0");
        if (!(plan_.tick > 0.0) || !std::isfinite(plan_.tick)) throw Error(ErrorCode::InvalidInput, "tick must be > 0");
        if (!(plan_.noise_m >= 0.0) || !(plan_.descent_rate > 0.0)) {
            throw Error(ErrorCode::InvalidInput, "noise must be >= 0 and descent rate > 0");
        }
        for (const auto& w : plan_.waypoints) require_valid(w);
        proj_ = db.empty() ? LocalProjection(plan_.waypoints.front()) : db.projection;
        for (const auto& w : plan_.waypoints) route_.push_back({proj_.project(w), w.alt});
        pos_ = route_.front().p;
        alt_ = route_.front().alt;
        next_ = 1;
        if (!db.in_coverage(pos_)) throw Error(ErrorCode::InvalidInput, "start position outside database coverage");
        noise_rng_.seed(plan_.noise_seed);

        double max_warning = 0.0;
        for (const auto& z : db.zones()) max_warning = std::max(max_warning, z.warning_buffer);
        clearance_ = plan_.clearance.value_or(max_warning + 1.0);

        const auto start = evaluate_here(pos_);
        if (start.worst == ViolationStatus::Violation) {
            const auto it = std::find_if(start.results.begin(), start.results.end(), [](const EvaluationResult& r) {
                return r.status == ViolationStatus::Violation;
            });
            throw Error(ErrorCode::ArmingRefused, "cannot arm inside zone " + it->zone_id);
        }

        std::size_t on_corridor = 0;
        for (const auto& z : db.zones()) {
            for (std::size_t i = 0; i + 1 < route_.size(); ++i) {
                if (segment_margin(z, route_[i].p, route_[i + 1].p) <= z.warning_buffer) {
                    corridor_zones_.push_back(z.id);
                    ++on_corridor;
                    break;
                }
            }
        }
        emit(EventKind::GeofenceLoaded, std::nullopt,
             "geofencing active; " + std::to_string(db.zones().size()) + " zones loaded, " + std::to_string(on_corridor)
                 + " on the flight corridor");
        track(start);
        record_state();
    }

    [[nodiscard]] Phase phase() const noexcept { return phase_; }
    [[nodiscard]] bool completed() const noexcept { return completed_; }
    [[nodiscard]] bool finished() const noexcept
    {
        return phase_ == Phase::Terminated || (phase_ == Phase::Grounded && (completed_ || landed_));
    }
    [[nodiscard]] const MissionTrace& trace() const noexcept { return trace_; }
    [[nodiscard]] const std::vector<std::string>& corridor_zones() const noexcept { return corridor_zones_; }
    [[nodiscard]] const LocalProjection& projection() const noexcept { return proj_; }
    [[nodiscard]] double clearance() const noexcept { return clearance_; }

    /// Remaining planned route from the current position.
    [[nodiscard]] std::vector<GeoPoint> remaining_route() const
    {
        std::vector<GeoPoint> out{to_geo(pos_, alt_)};
        for (std::size_t i = next_; i < route_.size(); ++i) out.push_back(to_geo(route_[i].p, route_[i].alt));
        return out;
    }

    std::pair<UavState, std::vector<MissionEvent>> step(double dt)
    {
        if (finished()) throw Error(ErrorCode::InvalidState, "mission already finished");
        if (!(dt > 0.0) || !std::isfinite(dt)) throw Error(ErrorCode::InvalidInput, "dt must be > 0");
        const std::size_t first_event = trace_.events.size();
        const double t0 = time_;
        time_ += dt;

        if (phase_ == Phase::Grounded) phase_ = Phase::Flying;
        if (phase_ == Phase::EmergencyLanding) {
            descend(dt);
        } else {
            fly(t0, dt);
        }
        record_state();
        return {trace_.states.back(),
                std::vector<MissionEvent>(trace_.events.begin() + static_cast<std::ptrdiff_t>(first_event),
                                          trace_.events.end())};
    }

    MissionTrace run()
    {
        double total = 0.0;
        for (std::size_t i = 0; i + 1 < route_.size(); ++i) total += distance(route_[i].p, route_[i + 1].p);
        const double limit = plan_.max_duration.value_or(60.0 + 10.0 * total / plan_.speed);
        while (!finished() && time_ < limit) step(plan_.tick);
        trace_.summary.completed = completed_;
        return trace_;
    }

private:
    [[nodiscard]] GeoPoint to_geo(PlanarPoint p, std::optional<double> alt) const
    {
        auto g = proj_.unproject(p);
        g.alt = alt;
        return g;
    }

    EvaluationReport evaluate_here(PlanarPoint p)
    {
        if (plan_.noise_m > 0.0) {
            std::uniform_real_distribution<double> noise(-plan_.noise_m, plan_.noise_m);
            p = {p.x + noise(noise_rng_), p.y + noise(noise_rng_)};
        }
        return db_->evaluate_planar(p, alt_);
    }

    void emit(EventKind kind, std::optional<std::string> zone, std::string detail, std::optional<double> at = {})
    {
        trace_.events.push_back({at.value_or(time_), kind, std::move(zone), std::move(detail), to_geo(pos_, alt_)});
    }

    void record_state()
    {
        trace_.states.push_back({to_geo(pos_, alt_), heading_, time_, phase_});
    }

    /// Per-zone excursion tracking; emits each level crossed once per excursion.
    void track(const EvaluationReport& report, std::optional<double> at = {})
    {
        std::set<std::string> active;
        for (const auto& r : report.results) {
            active.insert(r.zone_id);
            auto& level = excursion_[r.zone_id];
            if (r.status <= level) continue;
            for (int s = static_cast<int>(level) + 1; s <= static_cast<int>(r.status); ++s) {
                const auto st = static_cast<ViolationStatus>(s);
                std::ostringstream d;
                d << "signed distance " << std::fixed << std::setprecision(2) << r.signed_distance << " m";
                if (st == ViolationStatus::Warning) emit(EventKind::WarningIssued, r.zone_id, d.str(), at);
                if (st == ViolationStatus::Terminate) emit(EventKind::TerminateIssued, r.zone_id, d.str(), at);
                if (st == ViolationStatus::Violation) emit(EventKind::ViolationEntered, r.zone_id, d.str(), at);
            }
            level = r.status;
        }
        for (auto it = excursion_.begin(); it != excursion_.end();) {
            if (!active.contains(it->first)) {
                replanned_for_.erase(it->first);
                it = excursion_.erase(it);
            } else {
                ++it;
            }
        }
        trace_.summary.worst_status = std::max(trace_.summary.worst_status, report.worst);
    }

    void descend(double dt)
    {
        if (alt_ && *alt_ > 0.0) alt_ = std::max(0.0, *alt_ - plan_.descent_rate * dt);
        if (!alt_ || *alt_ <= 0.0) {
            phase_ = Phase::Grounded;
            landed_ = true;
        }
    }

    void begin_landing(const std::string& why, std::optional<std::string> zone, double at)
    {
        phase_ = Phase::EmergencyLanding;
        emit(EventKind::EmergencyLanding, std::move(zone), why, at);
    }

    void fly(double t0, double dt)
    {
        double budget = plan_.speed * dt;
        double elapsed = 0.0;
        while (budget > 0.0 && next_ < route_.size()) {
            const PlanarPoint target = route_[next_].p;
            const double to_target = distance(pos_, target);
            if (to_target <= 1e-9) {
                ++next_;
                continue;
            }
            const double move = std::min({budget, to_target, detail::kSubstepM});
            const bool arrive = move >= to_target - 1e-9;
            heading_ = detail::compass_heading(pos_, target);
            if (alt_ && route_[next_].alt) *alt_ += (*route_[next_].alt - *alt_) * (arrive ? 1.0 : move / to_target);
            pos_ = arrive ? target : pos_ + (target - pos_) * (move / to_target);
            trace_.summary.total_distance += move;
            budget -= move;
            elapsed += move / plan_.speed;
            if (arrive) {
                if (route_[next_].alt) alt_ = route_[next_].alt;
                ++next_;
            }
            if (!react(std::min(t0 + elapsed, time_))) return;
        }
        if (next_ >= route_.size() && phase_ == Phase::Flying) {
            completed_ = true;
            phase_ = Phase::Grounded;
            emit(EventKind::MissionComplete, std::nullopt,
                 "final waypoint reached after " + std::to_string(trace_.summary.total_distance) + " m",
                 std::min(t0 + elapsed, time_));
        }
    }

    /// Evaluates the current fix and applies the response policy. Returns
    /// false when horizontal flight must stop for this tick.
    bool react(double at)
    {
        const auto report = evaluate_here(pos_);
        track(report, at);
        if (report.worst == ViolationStatus::Violation) {
            phase_ = Phase::Terminated;
            return false;
        }
        if (report.worst == ViolationStatus::Terminate && plan_.override_redirect) {
            std::string zone;
            for (const auto& r : report.results) {
                if (r.status == ViolationStatus::Terminate) {
                    zone = r.zone_id;
                    break;
                }
            }
            begin_landing("operator override; landing before entering the zone", zone, at);
            return false;
        }
        if (plan_.override_redirect || !plan_.replan_enabled) return true;

        // at most one replan per zone excursion, and only when the route is unsafe
        std::vector<std::string> fresh;
        for (const auto& r : report.results) {
            if (!replanned_for_.contains(r.zone_id)) fresh.push_back(r.zone_id);
        }
        if (fresh.empty() || route_is_safe()) return true;
        for (const auto& id : fresh) replanned_for_.insert(id);
        if (!replan(at, fresh.front())) {
            begin_landing("no safe corridor to the remaining waypoints", fresh.front(), at);
            return false;
        }
        return true;
    }

    [[nodiscard]] bool leg_safe(PlanarPoint a, PlanarPoint b, bool from_here) const
    {
        for (const auto& z : db_->zones()) {
            const auto bc = bounding_circle(z);
            if (z.mode == ZoneMode::KeepOut
                && point_segment_distance(bc.center, a, b) - bc.radius > z.warning_buffer + 1.0) {
                continue;
            }
            const double margin = segment_margin(z, a, b);
            if (!(margin > 0.0)) return false;
            if (from_here) {
                if (margin < std::min(z.termination_buffer, point_margin(z, a) - 1e-6)) return false;
            } else if (margin <= z.termination_buffer) {
                return false;
            }
        }
        return true;
    }

    /// The remaining route keeps out of every termination band (the first leg
    /// may start inside a band as long as it does not get closer).
    [[nodiscard]] bool route_is_safe() const
    {
        PlanarPoint from = pos_;
        for (std::size_t i = next_; i < route_.size(); ++i) {
            if (!leg_safe(from, route_[i].p, i == next_)) return false;
            from = route_[i].p;
        }
        return true;
    }

    bool replan(double at, const std::string& zone_id)
    {
        PlanarPoint lo = pos_, hi = pos_;
        for (std::size_t i = next_; i < route_.size(); ++i) {
            lo = {std::min(lo.x, route_[i].p.x), std::min(lo.y, route_[i].p.y)};
            hi = {std::max(hi.x, route_[i].p.x), std::max(hi.y, route_[i].p.y)};
        }
        double margin = std::max(300.0, 6.0 * clearance_);
        for (int attempt = 0; attempt < 3; ++attempt, margin *= 2.0) {
            try {
                auto legs = plan_corridor(lo, hi, margin);
                const std::size_t before = route_.size() - next_;
                route_.erase(route_.begin() + static_cast<std::ptrdiff_t>(next_), route_.end());
                route_.insert(route_.end(), legs.begin(), legs.end());
                std::ostringstream d;
                d << "route around " << zone_id << ": " << before << " -> " << legs.size() << " waypoints";
                emit(EventKind::PathReplanned, zone_id, d.str(), at);
                return true;
            } catch (const Error& e) {
                if (e.code() != ErrorCode::NoPath && e.code() != ErrorCode::DegenerateInput
                    && e.code() != ErrorCode::InvalidInput) {
                    throw;
                }
            }
        }
        return false;
    }

    /// Corridor route through the remaining waypoints; unsafe legs are
    /// replaced by shortest corridor paths.
    std::vector<detail::RoutePoint> plan_corridor(PlanarPoint lo, PlanarPoint hi, double margin)
    {
        const PlanarPoint frame_lo{lo.x - margin, lo.y - margin}, frame_hi{hi.x + margin, hi.y + margin};
        std::vector<Zone> zones;
        std::vector<PlanarPoint> sites;
        for (const auto& z : db_->zones()) {
            const auto bc = bounding_circle(z);
            const bool near = bc.center.x + bc.radius >= frame_lo.x && bc.center.x - bc.radius <= frame_hi.x
                              && bc.center.y + bc.radius >= frame_lo.y && bc.center.y - bc.radius <= frame_hi.y;
            if (!near && z.mode == ZoneMode::KeepOut) continue;
            zones.push_back(z);
            detail::zone_sites(z, clearance_, sites);
        }
        const double spacing = std::max(clearance_, margin / 4.0);
        for (double x = frame_lo.x; x <= frame_hi.x; x += spacing) {
            sites.push_back({x, frame_lo.y});
            sites.push_back({x, frame_hi.y});
        }
        for (double y = frame_lo.y + spacing; y < frame_hi.y; y += spacing) {
            sites.push_back({frame_lo.x, y});
            sites.push_back({frame_hi.x, y});
        }
        sites.push_back(frame_hi);
        PlanarPoint blo = sites.front(), bhi = sites.front();
        for (const auto& s : sites) {
            blo = {std::min(blo.x, s.x), std::min(blo.y, s.y)};
            bhi = {std::max(bhi.x, s.x), std::max(bhi.y, s.y)};
        }
        const BoundingBox clip({blo.x - margin, blo.y - margin}, {bhi.x + margin, bhi.y + margin});
        const auto graph = build_corridor(voronoi(PointSet(sites), clip), zones, clearance_);

        std::vector<detail::RoutePoint> out;
        PlanarPoint from = pos_;
        for (std::size_t i = next_; i < route_.size(); ++i) {
            const auto target = route_[i];
            if (leg_safe(from, target.p, i == next_)) {
                out.push_back(target);
            } else {
                const auto path = shortest_path(graph, from, target.p, {.connections = 4});
                for (std::size_t k = 1; k < path.waypoints.size(); ++k) out.push_back({path.waypoints[k], target.alt});
                out.back() = target;
            }
            from = target.p;
        }
        return out;
    }

    const CompiledDatabase* db_;
    MissionPlan plan_;
    LocalProjection proj_;
    std::vector<detail::RoutePoint> route_;
    std::size_t next_ = 1;
    PlanarPoint pos_;
    std::optional<double> alt_;
    double heading_ = 0.0;
    double time_ = 0.0;
    double clearance_ = 0.0;
    Phase phase_ = Phase::Grounded;
    bool completed_ = false;
    bool landed_ = false;
    std::map<std::string, ViolationStatus> excursion_;
    std::set<std::string> replanned_for_;
    std::vector<std::string> corridor_zones_;
    std::mt19937_64 noise_rng_;
    MissionTrace trace_;
};

inline MissionTrace run(const CompiledDatabase& db, const MissionPlan& plan) { return MissionEngine(db, plan).run(); }

/// One line per event: time, kind, zone id, lat, lon.
inline std::string format_event_log(const MissionTrace& trace)
{
    std::ostringstream out;
    out << std::fixed;
    for (const auto& e : trace.events) {
        out << std::setprecision(3) << e.time << '\t' << to_string(e.kind) << '\t' << e.zone_id.value_or("-") << '\t'
            << std::setprecision(7) << e.position.lat << '\t' << e.position.lon << '\n';
    }
    return out.str();
}

}  // namespace geofence
