#include "uavmp/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace uavmp {

std::string_view to_string(UavStatus s) {
    switch (s) {
    case UavStatus::parked: return "parked";
    case UavStatus::enroute: return "enroute";
    case UavStatus::loitering: return "loitering";
    case UavStatus::performing: return "performing";
    case UavStatus::returning: return "returning";
    case UavStatus::landed: return "landed";
    }
    return "?";
}

std::string_view to_string(TaskStatus s) {
    switch (s) {
    case TaskStatus::pending: return "pending";
    case TaskStatus::active: return "active";
    case TaskStatus::done: return "done";
    case TaskStatus::obsolete: return "obsolete";
    }
    return "?";
}

nlohmann::json to_json(const SimEvent& e) {
    return {{"t", e.t}, {"kind", e.kind}, {"subject", e.subject}, {"detail", e.detail}};
}

std::string to_jsonl(const std::vector<SimEvent>& events) {
    std::string out;
    for (const auto& e : events) out += to_json(e).dump() + "\n";
    return out;
}

namespace {

int kind_rank(const std::string& k) {
    static const char* order[] = {"plan_switched", "objective_injected", "task_completed",
                                  "waypoint_passed", "task_started", "fault"};
    for (int i = 0; i < 6; ++i)
        if (k == order[i]) return i;
    return 6;
}

bool event_less(const SimEvent& a, const SimEvent& b) {
    if (a.t != b.t) return a.t < b.t;
    if (a.kind != b.kind) return kind_rank(a.kind) < kind_rank(b.kind);
    if (a.subject != b.subject) return a.subject < b.subject;
    return a.detail < b.detail;
}

bool departed(const UavPlan& p, double t) { return !p.segments.empty() && t > p.segments.front().t0; }

UavStatus status_at(const UavPlan& p, double t) {
    if (p.segments.empty() || t < p.segments.front().t0) return UavStatus::parked;
    if (t >= p.segments.back().t1) return UavStatus::landed;
    for (const Segment& s : p.segments) {
        if (t >= s.t1) continue;
        if (t < s.t0) return UavStatus::parked; // on the ground between two flights
        switch (s.kind) {
        case SegmentKind::wait: return UavStatus::loitering;
        case SegmentKind::task: return UavStatus::performing;
        case SegmentKind::transit: return s.task == PlanningContext::npos ? UavStatus::returning : UavStatus::enroute;
        }
    }
    return UavStatus::landed;
}

double distance_until(const UavPlan& p, double t) {
    double d = 0.0;
    for (const Segment& s : p.segments) {
        if (t <= s.t0) break;
        if (t >= s.t1 || s.t1 <= s.t0)
            d += s.length_m;
        else
            d += s.length_m * (t - s.t0) / (s.t1 - s.t0);
    }
    return d;
}

double burn_between(const UavPlan& p, double a, double b) {
    double f = 0.0;
    for (const Segment& s : p.segments) {
        const double lo = std::max(a, s.t0), hi = std::min(b, s.t1);
        if (hi > lo) f += s.fuel_rate_kgps * (hi - lo);
    }
    return f;
}

// Time at which `fuel` kg are used up after time a, or nullopt if not before b.
std::optional<double> exhaustion(const UavPlan& p, double a, double b, double fuel) {
    for (const Segment& s : p.segments) {
        const double lo = std::max(a, s.t0), hi = std::min(b, s.t1);
        if (hi <= lo) continue;
        const double use = s.fuel_rate_kgps * (hi - lo);
        if (use >= fuel && s.fuel_rate_kgps > 0.0) return lo + fuel / s.fuel_rate_kgps;
        fuel -= use;
    }
    return std::nullopt;
}

void refresh_uav(UavState& u, const UavPlan& p, double t) {
    if (u.halted) return;
    u.status = status_at(p, t);
    u.position = p.segments.empty() ? u.position : position_at(p, t);
    u.next_waypoint = 0;
    u.segment = 0;
    u.fraction = 0.0;
    for (std::size_t k = 0; k < p.segments.size(); ++k) {
        const Segment& s = p.segments[k];
        if (s.waypoint_at_end && s.t1 <= t) ++u.next_waypoint;
        if (s.t0 <= t && t < s.t1) {
            u.segment = k;
            u.fraction = (t - s.t0) / (s.t1 - s.t0);
        } else if (t >= s.t1) {
            u.segment = std::min(k + 1, p.segments.size() - 1);
            u.fraction = t >= s.t1 && k + 1 == p.segments.size() ? 1.0 : 0.0;
        }
    }
}

std::string fmt_waypoint(std::size_t n) { return "waypoint " + std::to_string(n); }

} // namespace

bool SimState::terminal() const { return clock >= horizon(); }

double SimState::horizon() const {
    double h = 0.0;
    for (std::size_t u = 0; u < plans.size(); ++u)
        if (!plans[u].segments.empty() && !uavs[u].halted) h = std::max(h, plans[u].segments.back().t1);
    for (const auto& t : tasks)
        if (t.assigned && t.record.performed && (t.status == TaskStatus::pending || t.status == TaskStatus::active))
            h = std::max(h, t.record.end_s);
    return h;
}

const TaskState* SimState::task(std::string_view id) const {
    for (const auto& t : tasks)
        if (t.id == id) return &t;
    return nullptr;
}

SimState start(const Mission& m, const Schedule& s) {
    if (s.uavs.size() != m.uavs.size()) throw Error("schedule does not match the mission's UAV list");
    const Expansion e = expand_mission(m);
    if (s.tasks.size() != e.tasks.size()) throw Error("schedule does not match the mission's task list");
    SimState st;
    st.mission = m;
    st.plans = s.uavs;
    for (std::size_t u = 0; u < m.uavs.size(); ++u) {
        if (s.uavs[u].uav != u) throw Error("schedule UAV order differs from the mission");
        UavState us;
        us.uav = u;
        us.position = m.uavs[u].position;
        us.fuel_kg = m.uavs[u].fuel_kg;
        st.uavs.push_back(us);
    }
    for (std::size_t t = 0; t < e.tasks.size(); ++t) {
        if (s.tasks[t].id != e.tasks[t].id) throw Error("schedule task '" + s.tasks[t].id + "' not in the mission");
        TaskState ts;
        ts.id = e.tasks[t].id;
        ts.record = s.tasks[t];
        ts.assigned = s.tasks[t].performed;
        st.tasks.push_back(ts);
    }
    return st;
}

void tick(SimState& s, double dt) {
    if (!(dt > 0.0)) throw Error("tick: dt must be positive");
    const double a = s.clock, b = s.clock + dt;
    std::vector<SimEvent> ev;
    for (std::size_t u = 0; u < s.plans.size(); ++u) {
        UavState& us = s.uavs[u];
        if (us.halted) continue;
        const UavPlan& p = s.plans[u];
        const std::string& name = s.mission.uavs[u].name;
        double until = b;
        const double burn = burn_between(p, a, b);
        if (burn > us.fuel_kg + 1e-9) {
            const auto th = exhaustion(p, a, b, us.fuel_kg);
            until = th.value_or(b);
            us.fuel_kg = 0.0;
            ev.push_back({until, "fault", name, "fuel exhausted"});
        } else {
            us.fuel_kg = std::max(0.0, us.fuel_kg - burn);
        }
        std::size_t wp = 0;
        for (const Segment& seg : p.segments) {
            if (!seg.waypoint_at_end) continue;
            ++wp;
            if (seg.t1 > a && seg.t1 <= until) ev.push_back({seg.t1, "waypoint_passed", name, fmt_waypoint(wp)});
        }
        refresh_uav(us, p, until);
        if (until < b) us.halted = true;
    }
    for (auto& t : s.tasks) {
        if (!t.assigned || !t.record.performed) continue;
        if (t.status == TaskStatus::pending && t.record.start_s <= b) {
            t.status = TaskStatus::active;
            ev.push_back({std::max(t.record.start_s, a), "task_started", t.id, ""});
        }
        if (t.status == TaskStatus::active && t.record.end_s <= b) {
            t.status = TaskStatus::done;
            ev.push_back({std::max(t.record.end_s, a), "task_completed", t.id, ""});
        }
    }
    std::sort(ev.begin(), ev.end(), event_less);
    s.events.insert(s.events.end(), ev.begin(), ev.end());
    s.clock = b;
}

void run_to_end(SimState& s, double dt) {
    if (!(dt > 0.0)) throw Error("run_to_end: dt must be positive");
    while (!s.terminal()) tick(s, dt);
}

void inject_objective(SimState& s, const Objective& o) {
    Mission m = s.mission;
    for (const auto& x : s.injected) m.objectives.push_back(x);
    const auto issues = validate_new_objective(m, o);
    if (!issues.empty()) throw ValidationError(issues);
    const Expansion e = expand_objective(o, m.objectives.size(), Catalog::builtin(), m.profile.all_tasks_mandatory);
    s.injected.push_back(o);
    for (const Task& t : e.tasks) {
        TaskState ts;
        ts.id = t.id;
        ts.assigned = false;
        ts.record.id = t.id;
        s.tasks.push_back(ts);
    }
    s.events.push_back({s.clock, "objective_injected", o.name, o.otype});
}

SimSnapshot snapshot_at(const SimState& s, double delta) {
    if (!(delta >= 0.0)) throw Error("snapshot_at: delta must be >= 0");
    SimState c = s;
    if (delta > 0.0) tick(c, delta);
    SimSnapshot snap;
    snap.time = c.clock;
    snap.mission = c.mission;
    for (const auto& o : c.injected) snap.mission.objectives.push_back(o);
    snap.tasks = c.tasks;
    snap.uavs = c.uavs;

    const Expansion e = expand_mission(snap.mission);
    snap.frozen.resize(e.tasks.size());
    for (std::size_t i = 0; i < e.tasks.size(); ++i) {
        const TaskState* ts = c.task(e.tasks[i].id);
        if (!ts || !(ts->status == TaskStatus::done || ts->status == TaskStatus::active)) continue;
        FrozenTask f;
        f.uavs = ts->record.uavs;
        f.start_s = ts->record.start_s;
        f.end_s = ts->record.end_s;
        f.sensor = ts->record.sensor;
        f.profile = ts->record.profile;
        f.done = ts->status == TaskStatus::done;
        snap.frozen[i] = f;
    }

    const double T = snap.time;
    for (std::size_t u = 0; u < snap.mission.uavs.size(); ++u) {
        const Uav& uav = snap.mission.uavs[u];
        const UavPlan& p = c.plans[u];
        UavStart st;
        double ready = T;
        const Objective* busy_with = nullptr;
        for (const auto& ts : c.tasks) {
            if (ts.status != TaskStatus::active) continue;
            if (std::find(ts.record.uavs.begin(), ts.record.uavs.end(), u) == ts.record.uavs.end()) continue;
            if (ts.record.end_s > ready) {
                ready = ts.record.end_s;
                busy_with = snap.mission.objective(ts.id.substr(0, ts.id.rfind('/')));
            }
        }
        if (!departed(p, ready) && uav.availability) ready = std::max(ready, uav.availability->start_s);
        st.ready_s = ready;
        st.burned_kg = p.segments.empty() ? 0.0 : fuel_burned_until(p, ready);
        st.fuel_kg = c.uavs[u].halted ? 0.0 : std::max(0.0, uav.fuel_kg - st.burned_kg);
        st.elapsed_distance_m = distance_until(p, ready);
        if (departed(p, ready) && ready < p.segments.back().t1) {
            st.airborne = true;
            st.position = position_at(p, ready);
            st.departed_s = p.segments.front().t0;
            st.elapsed_flight_s = ready - p.segments.front().t0;
            if (busy_with && busy_with->kind == GeometryKind::zone && busy_with->exit) st.via = busy_with->exit;
        } else if (departed(p, ready)) {
            st.position = p.segments.back().to;
            st.elapsed_flight_s = p.segments.back().t1 - p.segments.front().t0;
        } else {
            st.position = uav.position;
        }
        snap.starts.push_back(st);
    }
    return snap;
}

std::unique_ptr<PlanningContext> replan_context(const SimSnapshot& snap, std::shared_ptr<const geo::ElevationGrid> grid) {
    return std::make_unique<PlanningContext>(snap.mission, std::move(grid), snap.starts, snap.frozen, snap.time);
}

void apply_replacement(SimState& s, const PlanningContext& ctx, const Schedule& next) {
    const double T = ctx.origin_s();
    if (s.clock > T + 1e-9) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "snapshot at t=%.1f s is older than the live clock %.1f s", T, s.clock);
        throw DriftError(buf);
    }
    if (next.uavs.size() != s.plans.size() || next.tasks.size() != ctx.tasks().size())
        throw Error("replacement schedule does not match its planning context");
    // checked on the projection so a refusal leaves the state alone
    const SimSnapshot live = snapshot_at(s, T - s.clock);
    if (live.starts.size() != ctx.starts().size()) throw DriftError("vehicle list changed since the snapshot");
    for (std::size_t u = 0; u < live.starts.size(); ++u) {
        const UavStart& a = live.starts[u];
        const UavStart& b = ctx.starts()[u];
        const double d = std::hypot(geo::distance_m(a.position, b.position), a.position.alt - b.position.alt);
        const double df = std::abs(a.fuel_kg - b.fuel_kg);
        if (d > kDriftPositionM || df > kDriftFuelFrac * std::max(b.fuel_kg, 1.0) || a.airborne != b.airborne) {
            char buf[160];
            std::snprintf(buf, sizeof buf, "%s drifted from the snapshot: %.1f m, %.2f kg",
                          s.mission.uavs[u].name.c_str(), d, df);
            throw DriftError(buf);
        }
    }
    if (s.clock < T) tick(s, T - s.clock);

    for (std::size_t u = 0; u < s.plans.size(); ++u) {
        const double ready = ctx.starts()[u].ready_s;
        std::vector<Segment> kept;
        for (const Segment& seg : s.plans[u].segments) {
            if (seg.t1 <= ready) {
                kept.push_back(seg);
            } else if (seg.t0 < ready) {
                Segment cut = seg;
                const double f = (ready - seg.t0) / (seg.t1 - seg.t0);
                cut.t1 = ready;
                cut.to = seg.at(ready);
                cut.length_m = seg.length_m * f;
                cut.waypoint_at_end = false;
                kept.push_back(cut);
            }
        }
        UavPlan np = next.uavs[u];
        np.used = np.used || !kept.empty();
        kept.insert(kept.end(), np.segments.begin(), np.segments.end());
        np.segments = std::move(kept);
        s.plans[u] = std::move(np);
    }

    std::vector<TaskState> tasks;
    for (std::size_t t = 0; t < ctx.tasks().size(); ++t) {
        const std::string& id = ctx.tasks()[t].id;
        const TaskState* old = s.task(id);
        if (ctx.frozen(t) && old) {
            tasks.push_back(*old);
            continue;
        }
        TaskState ts;
        ts.id = id;
        ts.record = next.tasks[t];
        ts.assigned = next.tasks[t].performed;
        if (!ts.assigned && old && old->assigned) ts.status = TaskStatus::obsolete;
        tasks.push_back(ts);
    }
    std::vector<Objective> still;
    for (const auto& o : s.injected)
        if (!ctx.mission().objective(o.name)) still.push_back(o);
    s.mission = ctx.mission();
    s.injected = std::move(still);
    s.tasks = std::move(tasks);
    for (std::size_t u = 0; u < s.uavs.size(); ++u) refresh_uav(s.uavs[u], s.plans[u], s.clock);

    int performed = 0, vehicles = 0;
    for (const auto& r : next.tasks) performed += r.performed && !r.frozen;
    for (const auto& p : next.uavs) vehicles += p.used;
    s.events.push_back({s.clock, "plan_switched", s.mission.name,
                        std::to_string(performed) + " open tasks on " + std::to_string(vehicles) + " vehicles"});
}

} // namespace uavmp
