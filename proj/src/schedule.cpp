#include "uavmp/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "uavmp/units.hpp"

namespace uavmp {

std::string_view to_string(SegmentKind k) {
    switch (k) {
    case SegmentKind::transit: return "transit";
    case SegmentKind::wait: return "wait";
    case SegmentKind::task: return "task";
    }
    return "?";
}

std::string_view to_string(Phase p) {
    switch (p) {
    case Phase::takeoff_climb: return "takeoff_climb";
    case Phase::climb: return "climb";
    case Phase::cruise: return "cruise";
    case Phase::descent: return "descent";
    case Phase::landing_descent: return "landing_descent";
    case Phase::hold: return "hold";
    }
    return "?";
}

GeoPoint Segment::at(double t) const {
    if (t1 <= t0) return to;
    const double f = std::clamp((t - t0) / (t1 - t0), 0.0, 1.0);
    return geo::lerp(from, to, f);
}

namespace {

constexpr double kEps = 1.0; // strictness margin for pushed dependency bounds, seconds

struct Piece {
    GeoPoint from, to;
    double dur = 0.0, rate = 0.0, speed = 0.0, length = 0.0;
    Phase phase = Phase::cruise;
    int profile = 0;
    bool wp_end = false;
};

struct Flight {
    std::vector<Piece> pieces;
    double duration = 0.0;
};

double ramp_length(double dalt, const FlightProfile& p) {
    return std::abs(dalt) / std::tan(units::deg_to_rad(p.angle_deg));
}

// Flies a 2-D leg: ramp from a0 to the cruise altitude, cruise, and optionally a final
// ramp to a_end. Ramps are compressed proportionally when the leg is too short.
Flight fly(const Leg& leg, double a0, double ac, std::optional<double> a_end, const VehicleType& vt, int cruise,
           bool takeoff) {
    Flight f;
    const FlightProfile& cp = vt.profile(static_cast<ProfileKind>(cruise));
    const FlightProfile& up = vt.profile(ProfileKind::climb);
    const FlightProfile& down = vt.profile(ProfileKind::descent);
    const FlightProfile& p1 = ac >= a0 ? up : down;
    const Phase ph1 = ac >= a0 ? (takeoff ? Phase::takeoff_climb : Phase::climb) : Phase::descent;
    const double ae = a_end.value_or(ac);
    const FlightProfile& p2 = ae <= ac ? down : up;
    const double L = leg.length_m;

    auto add = [&](const GeoPoint& a, const GeoPoint& b, double len, const FlightProfile& p, Phase ph, bool wp) {
        Piece pc{a, b, 0.0, p.fuel_rate_kgps, p.speed_mps, len, ph, static_cast<int>(p.kind), wp};
        if (len > 0.0) {
            pc.dur = len / p.speed_mps;
        } else {
            const double climb_rate = p.speed_mps * std::sin(units::deg_to_rad(p.angle_deg > 0 ? p.angle_deg : 5.0));
            pc.dur = std::abs(b.alt - a.alt) / climb_rate;
        }
        f.duration += pc.dur;
        f.pieces.push_back(pc);
    };

    if (L <= 0.0 || leg.points.size() < 2) {
        GeoPoint p = leg.points.empty() ? GeoPoint{} : leg.points.front();
        GeoPoint a = p, c = p, e = p;
        a.alt = a0;
        c.alt = ac;
        e.alt = ae;
        if (std::abs(ac - a0) > 1e-9) add(a, c, 0.0, p1, ph1, false);
        if (a_end && std::abs(ae - ac) > 1e-9) add(c, e, 0.0, p2, Phase::landing_descent, false);
        return f;
    }

    double r1 = ramp_length(ac - a0, p1);
    double r2 = a_end ? ramp_length(ae - ac, p2) : 0.0;
    if (r1 + r2 > L) {
        const double k = L / (r1 + r2);
        r1 *= k;
        r2 *= k;
    }
    const double b1 = r1, b2 = L - r2;
    auto alt_at = [&](double d) {
        if (d < b1 && r1 > 0.0) return a0 + (ac - a0) * d / r1;
        if (d > b2 && r2 > 0.0) return ac + (ae - ac) * (d - b2) / r2;
        return ac;
    };

    double c0 = 0.0;
    for (std::size_t i = 0; i + 1 < leg.points.size(); ++i) {
        const GeoPoint& A = leg.points[i];
        const GeoPoint& B = leg.points[i + 1];
        const double len = geo::distance_m(A, B);
        const double c1 = c0 + len;
        std::vector<double> cuts{c0};
        for (double b : {b1, b2})
            if (b > c0 + 1e-9 && b < c1 - 1e-9) cuts.push_back(b);
        cuts.push_back(c1);
        std::sort(cuts.begin(), cuts.end());
        for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
            const double d0 = cuts[k], d1 = cuts[k + 1];
            if (d1 - d0 <= 1e-9) continue;
            const double mid = 0.5 * (d0 + d1);
            GeoPoint P = geo::lerp(A, B, len > 0 ? (d0 - c0) / len : 0.0);
            GeoPoint Q = geo::lerp(A, B, len > 0 ? (d1 - c0) / len : 1.0);
            P.alt = alt_at(d0);
            Q.alt = alt_at(d1);
            const bool last = k + 2 == cuts.size();
            if (mid < b1)
                add(P, Q, d1 - d0, p1, ph1, last);
            else if (mid > b2)
                add(P, Q, d1 - d0, p2, Phase::landing_descent, last);
            else
                add(P, Q, d1 - d0, cp, Phase::cruise, last);
        }
        c0 = c1;
    }
    return f;
}

struct Interval {
    double s = std::numeric_limits<double>::infinity();
    double e = -std::numeric_limits<double>::infinity();
    bool any = false;
};

} // namespace

Schedule decode_schedule(const PlanningContext& ctx, const PlanGenome& g) {
    check_structure(ctx, g);
    const Mission& m = ctx.mission();
    const auto& tasks = ctx.tasks();
    const std::size_t T = tasks.size();
    const std::size_t U = m.uavs.size();
    const auto seq_genes = uav_sequences(g, U);
    std::vector<std::vector<std::size_t>> seq(U);
    for (std::size_t u = 0; u < U; ++u)
        for (std::size_t gi : seq_genes[u]) seq[u].push_back(ctx.open_tasks()[gi]);

    auto gene = [&](std::size_t t) -> const TaskGene& { return g.tasks[ctx.gene_of(t)]; };
    auto cruise_alt = [&](std::size_t u, int profile) {
        return m.uavs[u].vtype.profile(static_cast<ProfileKind>(profile)).altitude_m;
    };

    // Transit flights are fixed by the sequence; timing only adds waits.
    std::vector<std::vector<Flight>> legs(U);
    std::vector<double> dur(T, 0.0);
    std::vector<bool> performed(T, false);
    for (std::size_t t = 0; t < T; ++t) {
        if (ctx.frozen(t)) {
            performed[t] = true;
            dur[t] = ctx.frozen(t)->end_s - ctx.frozen(t)->start_s;
            continue;
        }
        const TaskGene& tg = gene(t);
        if (tg.uavs.empty()) continue;
        performed[t] = true;
        if (tasks[t].duration_s) {
            dur[t] = *tasks[t].duration_s;
        } else {
            // Path traversal at the task's cruise profile; the slowest vehicle sets the pace.
            for (int u : tg.uavs) {
                const double ac = cruise_alt(u, tg.profile);
                dur[t] = std::max(dur[t], fly(ctx.task_track(t), ac, ac, std::nullopt, m.uavs[u].vtype, tg.profile,
                                              false).duration);
            }
        }
    }

    std::vector<Flight> returns(U);
    std::vector<bool> used(U, false);
    for (std::size_t u = 0; u < U; ++u) {
        const UavStart& st = ctx.starts()[u];
        const VehicleType& vt = m.uavs[u].vtype;
        double alt = st.position.alt;
        bool ground = !st.airborne;
        for (std::size_t k = 0; k < seq[u].size(); ++k) {
            const std::size_t t = seq[u][k];
            const Leg& leg = k == 0 ? ctx.leg_from_start(u, t) : ctx.leg_between(seq[u][k - 1], t);
            const int prof = gene(t).profile;
            const double ac = cruise_alt(u, prof);
            legs[u].push_back(fly(leg, alt, ac, std::nullopt, vt, prof, ground));
            ground = false;
            alt = ac;
        }
        used[u] = !seq[u].empty() || st.airborne;
        if (used[u]) {
            const Leg& leg = seq[u].empty() ? ctx.return_from_start(u) : ctx.return_from_task(seq[u].back(), u);
            const int rp = g.uavs[u].return_profile;
            returns[u] = fly(leg, alt, cruise_alt(u, rp), m.uavs[u].home().alt, vt, rp, ground);
        }
    }

    // Fixed-point iteration on task start times.
    std::vector<double> lb(T, 0.0), S(T, 0.0);
    for (std::size_t t = 0; t < T; ++t) {
        if (ctx.frozen(t)) {
            S[t] = lb[t] = ctx.frozen(t)->start_s;
            continue;
        }
        const Objective& o = m.objectives[tasks[t].objective];
        lb[t] = o.window ? std::max(o.window->start_s, ctx.origin_s()) : ctx.origin_s();
        S[t] = lb[t];
    }
    auto side = [&](const std::vector<std::size_t>& ts) {
        Interval iv;
        for (std::size_t t : ts) {
            if (!performed[t]) continue;
            iv.any = true;
            iv.s = std::min(iv.s, S[t]);
            iv.e = std::max(iv.e, S[t] + dur[t]);
        }
        return iv;
    };
    auto raise = [&](std::size_t t, double v) {
        if (!ctx.frozen(t) && performed[t] && v > S[t]) S[t] = v;
    };
    auto delay = [&](const std::vector<std::size_t>& ts, double d) {
        if (d <= 0.0) return;
        for (std::size_t t : ts) raise(t, S[t] + d);
    };

    const int max_iter = 200 + 10 * static_cast<int>(T);
    bool converged = false;
    std::vector<double> prev;
    for (int it = 0; it < max_iter && !converged; ++it) {
        prev = S;
        for (std::size_t u = 0; u < U; ++u) {
            double t = ctx.starts()[u].ready_s;
            for (std::size_t k = 0; k < seq[u].size(); ++k) {
                const std::size_t task = seq[u][k];
                const double arr = t + legs[u][k].duration;
                raise(task, arr);
                t = std::max(arr, S[task]) + dur[task];
            }
        }
        for (const auto& d : ctx.dependencies()) {
            Interval a = side(d.first), b = side(d.second);
            if (!a.any || !b.any) continue;
            const double off = d.offset_s;
            switch (d.relation) {
            case AllenRelation::before:
                for (std::size_t t : d.second) raise(t, a.e + off);
                break;
            case AllenRelation::meets:
                for (std::size_t t : d.second) raise(t, a.e);
                b = side(d.second);
                delay(d.first, b.s - a.e);
                break;
            case AllenRelation::overlaps:
                for (std::size_t t : d.second) raise(t, a.s + off + kEps);
                b = side(d.second);
                if (b.e <= a.e) delay(d.second, a.e - b.e + kEps);
                break;
            case AllenRelation::starts:
                if (a.s < b.s) delay(d.first, b.s - a.s);
                else delay(d.second, a.s - b.s);
                break;
            case AllenRelation::during:
                for (std::size_t t : d.first) raise(t, b.s + off + kEps);
                a = side(d.first);
                if (a.e >= b.e) delay(d.second, a.e - b.e + kEps);
                break;
            case AllenRelation::finishes:
                if (b.s >= a.s) delay(d.first, b.s - a.s + kEps);
                a = side(d.first);
                if (a.e < b.e) delay(d.first, b.e - a.e);
                else delay(d.second, a.e - b.e);
                break;
            case AllenRelation::equals:
                if (a.s < b.s) delay(d.first, b.s - a.s);
                else delay(d.second, a.s - b.s);
                break;
            }
        }
        converged = prev == S;
    }

    // Materialize timelines.
    Schedule sch;
    sch.timing_converged = converged;
    sch.tasks.resize(T);
    for (std::size_t t = 0; t < T; ++t) {
        TaskRecord& r = sch.tasks[t];
        r.id = tasks[t].id;
        r.performed = performed[t];
        if (const auto& f = ctx.frozen(t)) {
            r.frozen = true;
            r.uavs = f->uavs;
            r.start_s = r.arrival_s = r.departure_s = f->start_s;
            r.end_s = f->end_s;
            r.profile = f->profile;
            r.sensor = f->sensor;
            continue;
        }
        const TaskGene& tg = gene(t);
        r.profile = tg.profile;
        r.sensor = tasks[t].sensors[tg.sensor];
        for (int u : tg.uavs) r.uavs.push_back(static_cast<std::size_t>(u));
        r.start_s = S[t];
        r.end_s = S[t] + dur[t];
        r.departure_s = std::numeric_limits<double>::infinity();
        r.arrival_s = 0.0;
    }

    for (std::size_t u = 0; u < U; ++u) {
        UavPlan p;
        p.uav = u;
        p.used = used[u];
        p.gcs = g.uavs[u].gcs;
        p.return_profile = g.uavs[u].return_profile;
        p.tasks = seq[u];
        const UavStart& st = ctx.starts()[u];
        const VehicleType& vt = m.uavs[u].vtype;
        double t = st.ready_s;
        p.departure_s = st.airborne && st.departed_s ? *st.departed_s : st.ready_s;
        auto emit = [&](const Flight& f, SegmentKind kind, std::size_t task) {
            for (const Piece& pc : f.pieces) {
                Segment s;
                s.kind = kind;
                s.phase = pc.phase;
                s.from = pc.from;
                s.to = pc.to;
                s.t0 = t;
                s.t1 = t + pc.dur;
                s.fuel_rate_kgps = pc.rate;
                s.speed_mps = pc.speed;
                s.length_m = pc.length;
                s.profile = pc.profile;
                s.task = task;
                s.waypoint_at_end = pc.wp_end;
                t = s.t1;
                p.segments.push_back(s);
            }
        };
        auto hold = [&](SegmentKind kind, const GeoPoint& at, double d, const FlightProfile& prof, std::size_t task) {
            if (d <= 0.0) return;
            Segment s;
            s.kind = kind;
            s.phase = Phase::hold;
            s.from = s.to = at;
            s.t0 = t;
            s.t1 = t + d;
            s.fuel_rate_kgps = prof.fuel_rate_kgps;
            s.speed_mps = 0.0;
            s.profile = static_cast<int>(prof.kind);
            s.task = task;
            t = s.t1;
            p.segments.push_back(s);
        };
        for (std::size_t k = 0; k < seq[u].size(); ++k) {
            const std::size_t task = seq[u][k];
            TaskRecord& r = sch.tasks[task];
            r.departure_s = std::min(r.departure_s, t);
            emit(legs[u][k], SegmentKind::transit, task);
            const int prof = gene(task).profile;
            const double ac = cruise_alt(u, prof);
            GeoPoint here = ctx.task_track(task).points.front();
            here.alt = ac;
            r.arrival_s = std::max(r.arrival_s, t);
            const double start = std::max(t, S[task]);
            r.wait_s = std::max(r.wait_s, start - t);
            hold(SegmentKind::wait, here, start - t, vt.profile(ProfileKind::min_consumption), task);
            t = start;
            if (tasks[task].duration_s) {
                hold(SegmentKind::task, here, dur[task], vt.profile(static_cast<ProfileKind>(prof)), task);
            } else {
                Flight f = fly(ctx.task_track(task), ac, ac, std::nullopt, vt, prof, false);
                const double slack = dur[task] - f.duration;
                emit(f, SegmentKind::task, task);
                if (slack > 1e-9) {
                    GeoPoint end = ctx.task_track(task).points.back();
                    end.alt = ac;
                    hold(SegmentKind::task, end, slack, vt.profile(static_cast<ProfileKind>(prof)), task);
                }
            }
            if (start > r.start_s) { // late arrival of a member when timing did not converge
                r.start_s = start;
                r.end_s = start + dur[task];
            }
        }
        if (used[u]) emit(returns[u], SegmentKind::transit, PlanningContext::npos);
        p.landing_s = p.segments.empty() ? p.departure_s : t;
        for (const Segment& s : p.segments) {
            p.fuel_burned_kg += s.fuel_kg();
            p.distance_m += s.length_m;
            p.max_altitude_m = std::max({p.max_altitude_m, s.from.alt, s.to.alt});
            p.max_speed_mps = std::max(p.max_speed_mps, s.speed_mps);
        }
        sch.uavs.push_back(std::move(p));
    }
    for (auto& r : sch.tasks)
        if (!std::isfinite(r.departure_s)) r.departure_s = r.start_s;
    return sch;
}

namespace {

std::size_t seg_index(const UavPlan& p, double t) {
    auto it = std::upper_bound(p.segments.begin(), p.segments.end(), t,
                               [](double v, const Segment& s) { return v < s.t1; });
    return static_cast<std::size_t>(it - p.segments.begin());
}

} // namespace

GeoPoint position_at(const UavPlan& p, double t) {
    if (p.segments.empty()) return GeoPoint{};
    if (t <= p.segments.front().t0) return p.segments.front().from;
    const std::size_t i = seg_index(p, t);
    if (i >= p.segments.size()) return p.segments.back().to;
    return p.segments[i].at(t);
}

double fuel_burned_until(const UavPlan& p, double t) {
    double f = 0.0;
    for (const Segment& s : p.segments) {
        if (t <= s.t0) break;
        f += s.fuel_rate_kgps * (std::min(t, s.t1) - s.t0);
    }
    return f;
}

bool airborne_at(const UavPlan& p, double t) {
    return !p.segments.empty() && t >= p.segments.front().t0 && t < p.segments.back().t1;
}

} // namespace uavmp
