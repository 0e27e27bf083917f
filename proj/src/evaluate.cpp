#include "uavmp/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "uavmp/units.hpp"

namespace uavmp {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double risk_interp(double value, double low, double high, RiskDirection dir) {
    if (!(low < high) || !std::isfinite(low) || !std::isfinite(high)) throw Error("risk_interp: need low < high");
    double f;
    if (value <= low)
        f = 0.0;
    else if (value >= high)
        f = 1.0;
    else
        f = (value - low) / (high - low);
    return 100.0 * (dir == RiskDirection::increasing ? f : 1.0 - f);
}

std::array<double, 8> EvaluationReport::objectives() const {
    return {makespan_s, cost, fuel_kg, flight_time_s, distance_m, static_cast<double>(n_uavs),
            -static_cast<double>(n_tasks), static_cast<double>(n_gcss)};
}

std::array<double, 12> EvaluationReport::criteria() const {
    return {makespan_s,    cost,           fuel_kg,
            flight_time_s, distance_m,     risk_fuel,
            risk_ground,   risk_coverage,  risk_closeness,
            static_cast<double>(n_uavs), static_cast<double>(n_tasks), static_cast<double>(n_gcss)};
}

double min_ground_clearance(const geo::ElevationGrid& g, const UavPlan& p, double step_m) {
    double best = kInf;
    for (const Segment& s : p.segments) {
        if (s.phase == Phase::takeoff_climb || s.phase == Phase::landing_descent) continue;
        geo::Route r;
        r.waypoints.push_back(s.from);
        if (!s.to.same_latlon(s.from) || s.to.alt != s.from.alt) r.waypoints.push_back(s.to);
        for (const auto& c : geo::ground_clearance_profile(g, r, step_m)) best = std::min(best, c.clearance_m());
    }
    return best;
}

namespace {

struct Sampler {
    const PlanningContext& ctx;

    geo::GeoPoint gcs_antenna(int gcs) const {
        const Gcs& G = ctx.mission().gcss[gcs];
        geo::GeoPoint a = G.position;
        a.alt = std::max(G.position.alt, ctx.grid().elevation_at(G.position)) + kGcsMastM;
        return a;
    }

    bool in_range(int gcs, const geo::GeoPoint& p) const {
        if (gcs < 0) return false;
        const Gcs& G = ctx.mission().gcss[gcs];
        const geo::Vec2 a = ctx.frame().to_xy(G.position);
        const geo::Vec2 b = ctx.frame().to_xy(p);
        return std::hypot(a.x - b.x, a.y - b.y) <= G.range_m;
    }

    bool los(int gcs, const geo::GeoPoint& p) const {
        if (gcs < 0) return false;
        return geo::line_of_sight(ctx.grid(), gcs_antenna(gcs), p, kLosStepM);
    }
};

} // namespace

double min_separation(const PlanningContext& ctx, const Schedule& s, double step_s) {
    double t_lo = kInf, t_hi = -kInf;
    std::vector<const UavPlan*> flying;
    for (const auto& p : s.uavs) {
        if (p.segments.empty()) continue;
        flying.push_back(&p);
        t_lo = std::min(t_lo, p.segments.front().t0);
        t_hi = std::max(t_hi, p.segments.back().t1);
    }
    if (flying.size() < 2) return kInf;
    const double start = std::floor(t_lo / step_s) * step_s;
    const auto n = static_cast<std::size_t>(std::ceil((t_hi - start) / step_s)) + 1;
    struct P3 {
        double x, y, z;
        bool on;
    };
    std::vector<std::vector<P3>> samples(flying.size(), std::vector<P3>(n));
    for (std::size_t i = 0; i < flying.size(); ++i) {
        const UavPlan& p = *flying[i];
        std::size_t k = 0;
        for (std::size_t j = 0; j < n; ++j) {
            const double t = start + static_cast<double>(j) * step_s;
            const bool on = t >= p.segments.front().t0 && t <= p.segments.back().t1;
            if (!on) {
                samples[i][j] = {0, 0, 0, false};
                continue;
            }
            while (k + 1 < p.segments.size() && p.segments[k].t1 < t) ++k;
            const geo::GeoPoint q = p.segments[k].at(t);
            const geo::Vec2 v = ctx.frame().to_xy(q);
            samples[i][j] = {v.x, v.y, q.alt, true};
        }
    }
    double best2 = kInf;
    for (std::size_t a = 0; a < flying.size(); ++a)
        for (std::size_t b = a + 1; b < flying.size(); ++b)
            for (std::size_t j = 0; j < n; ++j) {
                const P3& p = samples[a][j];
                const P3& q = samples[b][j];
                if (!p.on || !q.on) continue;
                const double dx = p.x - q.x, dy = p.y - q.y, dz = p.z - q.z;
                best2 = std::min(best2, dx * dx + dy * dy + dz * dz);
            }
    return std::sqrt(best2);
}

double closeness_risk(const PlanningContext& ctx, const Schedule& s, double step_s) {
    const double sep = min_separation(ctx, s, step_s);
    if (!std::isfinite(sep)) return 0.0;
    const OperatorProfile& op = ctx.mission().profile;
    return risk_interp(sep, op.sep_min_m, op.sep_risked_m, RiskDirection::decreasing);
}

EvaluationReport evaluate(const PlanningContext& ctx, const Schedule& s) {
    const Mission& m = ctx.mission();
    const OperatorProfile& op = m.profile;
    EvaluationReport r;
    Sampler smp{ctx};
    std::set<int> gcss;

    for (const TaskRecord& t : s.tasks) {
        if (!t.performed) continue;
        ++r.n_tasks;
        r.makespan_s = std::max(r.makespan_s, t.end_s);
    }

    for (const UavPlan& p : s.uavs) {
        const Uav& uav = m.uavs[p.uav];
        const UavStart& st = ctx.starts()[p.uav];
        UavPerformance perf;
        perf.uav = p.uav;
        perf.used = p.used;
        perf.gcs = p.gcs;
        perf.departure_s = p.departure_s;
        perf.landing_s = p.landing_s;
        const double flown = p.segments.empty() ? 0.0 : p.segments.back().t1 - p.segments.front().t0;
        perf.flight_time_s = st.elapsed_flight_s + flown;
        perf.distance_m = st.elapsed_distance_m + p.distance_m;
        perf.fuel_burned_kg = st.burned_kg + p.fuel_burned_kg;
        perf.fuel_usage_pct = 100.0 * perf.fuel_burned_kg / uav.fuel_kg;
        perf.cost = uav.vtype.cost_per_hour * units::s_to_h(perf.flight_time_s);
        perf.max_altitude_m = p.max_altitude_m;
        perf.max_speed_mps = p.max_speed_mps;
        perf.min_ground_clearance_m = min_ground_clearance(ctx.grid(), p);

        for (const Segment& seg : p.segments) {
            const bool need_los = seg.kind == SegmentKind::task && m.objectives[ctx.tasks()[seg.task].objective].requires_los;
            const double d = seg.duration();
            if (d <= 0.0) continue;
            if (seg.from == seg.to) {
                const bool range_ok = smp.in_range(p.gcs, seg.from);
                bool los_ok = true;
                if (need_los) {
                    los_ok = smp.los(p.gcs, seg.from);
                    if (!los_ok) perf.los_blocked_s += d;
                }
                if (!range_ok || !los_ok) perf.out_of_coverage_s += d;
                continue;
            }
            const auto n = static_cast<std::size_t>(std::ceil(d / kSampleStepS));
            for (std::size_t k = 0; k < n; ++k) {
                const double a = seg.t0 + static_cast<double>(k) * kSampleStepS;
                const double w = std::min(kSampleStepS, seg.t1 - a);
                const geo::GeoPoint q = seg.at(a + 0.5 * w);
                const bool range_ok = smp.in_range(p.gcs, q);
                bool los_ok = true;
                if (need_los) {
                    los_ok = smp.los(p.gcs, q);
                    if (!los_ok) perf.los_blocked_s += w;
                }
                if (!range_ok || !los_ok) perf.out_of_coverage_s += w;
            }
        }

        if (p.used) {
            perf.risk_fuel = risk_interp(perf.fuel_usage_pct, op.fuel_risked_pct, op.fuel_max_pct, RiskDirection::increasing);
            perf.risk_ground = std::isfinite(perf.min_ground_clearance_m)
                                   ? risk_interp(perf.min_ground_clearance_m, op.ground_min_m, op.ground_risked_m,
                                                 RiskDirection::decreasing)
                                   : 0.0;
            perf.risk_coverage =
                risk_interp(perf.out_of_coverage_s, op.coverage_min_s, op.coverage_max_s, RiskDirection::increasing);
            ++r.n_uavs;
            if (p.gcs >= 0) gcss.insert(p.gcs);
            r.makespan_s = std::max(r.makespan_s, p.landing_s);
            r.risk_fuel = std::max(r.risk_fuel, perf.risk_fuel);
            r.risk_ground = std::max(r.risk_ground, perf.risk_ground);
            r.risk_coverage = std::max(r.risk_coverage, perf.risk_coverage);
        } else if (st.elapsed_flight_s > 0.0) {
            ++r.n_uavs; // flew earlier in the mission
        }
        r.cost += perf.cost;
        r.fuel_kg += perf.fuel_burned_kg;
        r.flight_time_s += perf.flight_time_s;
        r.distance_m += perf.distance_m;
        r.uavs.push_back(perf);
    }
    r.n_gcss = static_cast<int>(gcss.size());
    r.min_separation_m = min_separation(ctx, s);
    r.risk_closeness = std::isfinite(r.min_separation_m)
                           ? risk_interp(r.min_separation_m, op.sep_min_m, op.sep_risked_m, RiskDirection::decreasing)
                           : 0.0;
    return r;
}

} // namespace uavmp
