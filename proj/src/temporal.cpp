#include "uavmp/temporal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace uavmp {

namespace {

constexpr double kTol = 1e-6;

// Amount by which x <= y fails.
double le(double x, double y) { return std::max(0.0, x - y - kTol); }
// Amount by which x < y fails (x must be strictly below y).
double lt(double x, double y) { return y - x > kTol ? 0.0 : (y - x > 0.0 ? kTol : x - y + kTol); }
double eq(double x, double y) { return std::abs(x - y) <= kTol ? 0.0 : std::abs(x - y); }

double rel(double measured, double limit) { return std::abs(measured - limit) / std::max(std::abs(limit), 1.0); }

} // namespace

double allen_shortfall(AllenRelation r, const Interval& a, const Interval& b, double off) {
    switch (r) {
    case AllenRelation::before: return le(a.end + off, b.start);
    case AllenRelation::meets: return eq(a.end, b.start);
    case AllenRelation::overlaps: return lt(a.start + off, b.start) + lt(b.start, a.end) + lt(a.end, b.end);
    case AllenRelation::starts: return eq(a.start, b.start) + lt(a.end, b.end);
    case AllenRelation::during: return lt(b.start + off, a.start) + lt(a.end, b.end);
    case AllenRelation::finishes: return eq(a.end, b.end) + lt(b.start, a.start);
    case AllenRelation::equals: return eq(a.start, b.start) + eq(a.end, b.end);
    }
    return 0.0;
}

bool allen_holds(AllenRelation r, const Interval& a, const Interval& b, double off) {
    return allen_shortfall(r, a, b, off) == 0.0;
}

double CheckReport::total_magnitude() const {
    double s = 0.0;
    for (const auto& v : violations) s += v.magnitude;
    return s;
}

namespace {

std::optional<Violation> relation_violation(const TaskDependency& dep, std::vector<std::size_t> a,
                                            std::vector<std::size_t> b) {
    if (dep.uav_relation == UavRelation::undefined || a.empty() || b.empty()) return std::nullopt;
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
    std::sort(b.begin(), b.end());
    b.erase(std::unique(b.begin(), b.end()), b.end());
    std::vector<std::size_t> common;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
    if (dep.uav_relation == UavRelation::same && a != b) {
        const double mismatched = static_cast<double>(a.size() + b.size() - 2 * common.size());
        return Violation{"dependency", dep.label + " (uav same)", mismatched, 0.0, 1.0};
    }
    if (dep.uav_relation == UavRelation::different && !common.empty())
        return Violation{"dependency", dep.label + " (uav different)", static_cast<double>(common.size()), 0.0, 1.0};
    return std::nullopt;
}

} // namespace

std::optional<Violation> uav_relation_check(const PlanningContext& ctx, const TaskDependency& dep,
                                            const PlanGenome& g) {
    auto collect = [&](const std::vector<std::size_t>& ts) {
        std::vector<std::size_t> out;
        for (std::size_t t : ts) {
            if (const auto& f = ctx.frozen(t)) {
                out.insert(out.end(), f->uavs.begin(), f->uavs.end());
            } else {
                for (int u : g.tasks.at(ctx.gene_of(t)).uavs) out.push_back(static_cast<std::size_t>(u));
            }
        }
        return out;
    };
    return relation_violation(dep, collect(dep.first), collect(dep.second));
}

std::optional<Violation> uav_relation_check(const TaskDependency& dep, const Schedule& s) {
    auto collect = [&](const std::vector<std::size_t>& ts) {
        std::vector<std::size_t> out;
        for (std::size_t t : ts)
            if (s.tasks[t].performed) out.insert(out.end(), s.tasks[t].uavs.begin(), s.tasks[t].uavs.end());
        return out;
    };
    return relation_violation(dep, collect(dep.first), collect(dep.second));
}

CheckReport check(const PlanningContext& ctx, const Schedule& s, const EvaluationReport& r) {
    const Mission& m = ctx.mission();
    CheckReport out;
    auto add = [&](const char* code, const std::string& subject, double measured, double limit, double magnitude) {
        out.violations.push_back({code, subject, measured, limit, magnitude > 0.0 ? magnitude : 1e-9});
    };

    // (a) dependencies
    for (const auto& d : ctx.dependencies()) {
        Interval a{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
        Interval b = a;
        bool any_a = false, any_b = false;
        for (std::size_t t : d.first)
            if (s.tasks[t].performed) {
                any_a = true;
                a.start = std::min(a.start, s.tasks[t].start_s);
                a.end = std::max(a.end, s.tasks[t].end_s);
            }
        for (std::size_t t : d.second)
            if (s.tasks[t].performed) {
                any_b = true;
                b.start = std::min(b.start, s.tasks[t].start_s);
                b.end = std::max(b.end, s.tasks[t].end_s);
            }
        if (any_a && any_b) {
            const double short_s = allen_shortfall(d.relation, a, b, d.offset_s);
            if (short_s > 0.0) add("dependency", d.label, short_s, 0.0, short_s / 60.0);
        }
        if (auto v = uav_relation_check(d, s)) out.violations.push_back(*v);
    }

    // (b) time windows
    for (std::size_t t = 0; t < s.tasks.size(); ++t) {
        const TaskRecord& rec = s.tasks[t];
        if (!rec.performed || rec.frozen) continue;
        const Objective& o = m.objectives[ctx.tasks()[t].objective];
        if (!o.window) continue;
        if (rec.start_s < o.window->start_s - kTol)
            add("time_window", rec.id, rec.start_s, o.window->start_s, (o.window->start_s - rec.start_s) / 60.0);
        if (rec.end_s > o.window->end_s + kTol)
            add("time_window", rec.id, rec.end_s, o.window->end_s, (rec.end_s - o.window->end_s) / 60.0);
    }

    // (c) vehicles
    std::map<int, int> per_gcs;
    for (std::size_t i = 0; i < s.uavs.size(); ++i) {
        const UavPlan& p = s.uavs[i];
        if (!p.used) continue;
        const Uav& u = m.uavs[p.uav];
        const VehicleType& vt = u.vtype;
        const UavPerformance& perf = r.uavs[i];
        const double fuel = ctx.starts()[p.uav].fuel_kg;
        if (p.fuel_burned_kg > fuel + kTol)
            add("fuel_capacity", u.name, p.fuel_burned_kg, fuel, rel(p.fuel_burned_kg, fuel));
        if (perf.flight_time_s > vt.max_flight_time_s + kTol)
            add("flight_time", u.name, perf.flight_time_s, vt.max_flight_time_s, rel(perf.flight_time_s, vt.max_flight_time_s));
        if (perf.distance_m > vt.max_range_m + kTol)
            add("range", u.name, perf.distance_m, vt.max_range_m, rel(perf.distance_m, vt.max_range_m));
        if (p.max_altitude_m > vt.max_altitude_m + kTol)
            add("altitude", u.name, p.max_altitude_m, vt.max_altitude_m, rel(p.max_altitude_m, vt.max_altitude_m));
        if (p.max_speed_mps > vt.max_speed_mps + kTol)
            add("speed", u.name, p.max_speed_mps, vt.max_speed_mps, rel(p.max_speed_mps, vt.max_speed_mps));
        if (u.availability) {
            if (!p.segments.empty() && p.segments.front().t0 < u.availability->start_s - kTol)
                add("availability", u.name, p.segments.front().t0, u.availability->start_s,
                    (u.availability->start_s - p.segments.front().t0) / 60.0);
            if (p.landing_s > u.availability->end_s + kTol)
                add("availability", u.name, p.landing_s, u.availability->end_s,
                    (p.landing_s - u.availability->end_s) / 60.0);
        }
        // (d) stations
        if (p.gcs >= 0) {
            ++per_gcs[p.gcs];
            const Gcs& g = m.gcss[p.gcs];
            if (!g.controls(vt.name)) add("gcs_type", u.name + " @ " + g.name, 1.0, 0.0, 1.0);
        }
        // (e) coverage
        if (perf.out_of_coverage_s > m.profile.coverage_max_s + kTol)
            add("coverage_time", u.name, perf.out_of_coverage_s, m.profile.coverage_max_s,
                rel(perf.out_of_coverage_s, m.profile.coverage_max_s));
        if (perf.los_blocked_s > kTol) add("los", u.name, perf.los_blocked_s, 0.0, perf.los_blocked_s / 60.0);
    }
    for (const auto& [g, n] : per_gcs) {
        const Gcs& gcs = m.gcss[g];
        if (n > gcs.max_vehicles)
            add("gcs_capacity", gcs.name, n, gcs.max_vehicles, rel(n, gcs.max_vehicles));
    }

    // (f) operator caps
    const Caps& c = m.profile.caps;
    auto cap = [&](const char* code, const std::optional<double>& limit, double v) {
        if (limit && v > *limit + kTol) add(code, "plan", v, *limit, rel(v, *limit));
    };
    cap("cap_makespan", c.makespan_s, r.makespan_s);
    cap("cap_cost", c.cost, r.cost);
    cap("cap_flight_time", c.flight_time_s, r.flight_time_s);
    cap("cap_fuel", c.fuel_kg, r.fuel_kg);
    cap("cap_distance", c.distance_m, r.distance_m);
    return out;
}

void FailureCounter::add(const CheckReport& r) {
    ++reports_;
    // A plan counts once per reason, however many vehicles or tasks trip it.
    std::vector<std::string> seen;
    for (const auto& v : r.violations) {
        if (std::find(seen.begin(), seen.end(), v.code) != seen.end()) continue;
        seen.push_back(v.code);
        auto it = std::find_if(counts_.begin(), counts_.end(), [&](const auto& p) { return p.first == v.code; });
        if (it == counts_.end())
            counts_.emplace_back(v.code, 1);
        else
            ++it->second;
    }
}

void FailureCounter::merge(const FailureCounter& o) {
    reports_ += o.reports_;
    for (const auto& [code, n] : o.counts_) {
        auto it = std::find_if(counts_.begin(), counts_.end(), [&](const auto& p) { return p.first == code; });
        if (it == counts_.end())
            counts_.emplace_back(code, n);
        else
            it->second += n;
    }
}

std::vector<std::pair<std::string, long>> FailureCounter::sorted() const {
    auto out = counts_;
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    return out;
}

std::vector<std::pair<std::string, long>> failure_histogram(const std::vector<CheckReport>& reports) {
    if (reports.empty()) throw Error("failure_histogram: no reports");
    FailureCounter c;
    for (const auto& r : reports) c.add(r);
    return c.sorted();
}

} // namespace uavmp
