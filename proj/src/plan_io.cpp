#include "uavmp/plan_io.hpp"

#include <cmath>

#include "uavmp/units.hpp"
#include "uavmp/wire.hpp"

namespace uavmp::io {

namespace {

json num(double v) { return std::isfinite(v) ? json(units::wire_round(v)) : json(); }
json ft(double m) { return num(units::m_to_ft(m)); }
json nm(double m) { return num(units::m_to_nm(m)); }

std::string profile_name(int p) { return std::string(to_string(static_cast<ProfileKind>(p))); }

json point_t(const GeoPoint& p, double t) {
    return {{"lat", p.lat}, {"lon", p.lon}, {"alt", ft(p.alt)}, {"t", num(t)}};
}

} // namespace

std::vector<RankedPlan> rank_solutions(const PlanningContext& ctx, const std::vector<Evaluated>& solutions,
                                       double threshold) {
    if (solutions.empty()) return {};
    std::vector<std::vector<double>> rows;
    std::vector<std::string> keys;
    std::vector<PlanGenome> genomes;
    for (const auto& e : solutions) {
        const auto c = e.report.criteria();
        rows.emplace_back(c.begin(), c.end());
        keys.push_back(canonical_key(e.genome));
        genomes.push_back(e.genome);
    }
    const auto w = weights_from_profile(ctx.mission().profile);
    const auto ranked = vikor_rank(rows, std::vector<double>(w.begin(), w.end()),
                                   std::vector<bool>(kMaximized.begin(), kMaximized.end()), 0.5, &keys);
    return filter_similar(ranked, genomes, threshold);
}

json config_json(const SearchConfig& c) {
    json profiles = json::array();
    for (int p : c.profiles.allowed) profiles.push_back(profile_name(p));
    return {{"population", c.population},
            {"maxGenerations", c.max_generations},
            {"runtime", c.runtime_s},
            {"seed", c.seed},
            {"crossoverRate", c.crossover_rate},
            {"mutationRate", c.mutation_rate ? json(*c.mutation_rate) : json()},
            {"knee", c.knee},
            {"mode", c.mode == SearchMode::plan ? "plan" : "replan"},
            {"profiles", profiles},
            {"archiveLimit", c.archive_limit}};
}

SearchConfig config_from_json(const json& j, const SearchConfig& base) {
    if (!j.is_object()) throw ValidationError("/config", "expected an object");
    SearchConfig c = base;
    std::vector<Issue> issues;
    auto get = [&](const char* key, auto& dst) {
        auto it = j.find(key);
        if (it == j.end() || it->is_null()) return;
        try {
            dst = it->get<std::decay_t<decltype(dst)>>();
        } catch (const json::exception&) {
            issues.push_back({std::string("/config/") + key, "wrong type"});
        }
    };
    get("population", c.population);
    get("maxGenerations", c.max_generations);
    get("runtime", c.runtime_s);
    get("seed", c.seed);
    get("crossoverRate", c.crossover_rate);
    get("knee", c.knee);
    get("archiveLimit", c.archive_limit);
    if (auto it = j.find("mutationRate"); it != j.end() && !it->is_null()) {
        if (it->is_number())
            c.mutation_rate = it->get<double>();
        else
            issues.push_back({"/config/mutationRate", "expected a number"});
    }
    if (auto it = j.find("mode"); it != j.end()) {
        if (*it == "plan")
            c.mode = SearchMode::plan;
        else if (*it == "replan")
            c.mode = SearchMode::replan;
        else
            issues.push_back({"/config/mode", "expected plan or replan"});
    }
    if (auto it = j.find("profiles"); it != j.end()) {
        c.profiles.allowed.clear();
        if (!it->is_array()) {
            issues.push_back({"/config/profiles", "expected an array"});
        } else {
            for (const auto& p : *it) {
                auto k = p.is_string() ? profile_from_string(p.get<std::string>()) : std::nullopt;
                if (!k || static_cast<int>(*k) >= kCruiseProfiles)
                    issues.push_back({"/config/profiles", "expected min_consumption or max_speed"});
                else
                    c.profiles.allowed.push_back(static_cast<int>(*k));
            }
        }
    }
    if (issues.empty()) {
        try {
            c.validate();
        } catch (const Error& e) {
            issues.push_back({"/config", e.what()});
        }
    }
    if (!issues.empty()) throw ValidationError(std::move(issues));
    return c;
}

json task_rows(const PlanningContext& ctx, const Schedule& s) {
    const Mission& m = ctx.mission();
    json rows = json::array();
    for (std::size_t t = 0; t < s.tasks.size(); ++t) {
        const TaskRecord& r = s.tasks[t];
        const Task& task = ctx.tasks()[t];
        json uavs = json::array();
        for (std::size_t u : r.uavs) uavs.push_back(m.uavs[u].name);
        json row = {{"id", r.id},
                    {"objective", m.objectives[task.objective].name},
                    {"task", r.id.substr(r.id.rfind('/') + 1)},
                    {"performed", r.performed},
                    {"frozen", r.frozen},
                    {"uavs", uavs}};
        if (r.performed) {
            row["departure"] = num(r.departure_s);
            row["arrival"] = num(r.arrival_s);
            row["wait"] = num(r.wait_s);
            row["start"] = num(r.start_s);
            row["duration"] = num(r.end_s - r.start_s);
            row["end"] = num(r.end_s);
            row["profile"] = profile_name(r.profile);
            row["sensor"] = r.sensor;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

json uav_blocks(const PlanningContext& ctx, const Schedule& s, const EvaluationReport& r) {
    const Mission& m = ctx.mission();
    json out = json::array();
    for (std::size_t i = 0; i < s.uavs.size(); ++i) {
        const UavPlan& p = s.uavs[i];
        const UavPerformance& perf = r.uavs[i];
        json tasks = json::array();
        for (std::size_t t : p.tasks) tasks.push_back(s.tasks[t].id);
        out.push_back({{"uav", m.uavs[p.uav].name},
                       {"type", m.uavs[p.uav].vtype.name},
                       {"used", p.used},
                       {"gcs", p.gcs >= 0 ? json(m.gcss[p.gcs].name) : json()},
                       {"returnProfile", profile_name(p.return_profile)},
                       {"departure", num(perf.departure_s)},
                       {"landing", num(perf.landing_s)},
                       {"flightTime", num(perf.flight_time_s)},
                       {"distance", nm(perf.distance_m)},
                       {"fuel", num(perf.fuel_burned_kg)},
                       {"fuelUsage", num(perf.fuel_usage_pct)},
                       {"cost", num(perf.cost)},
                       {"minGroundClearance", ft(perf.min_ground_clearance_m)},
                       {"outOfCoverage", num(perf.out_of_coverage_s)},
                       {"losBlocked", num(perf.los_blocked_s)},
                       {"maxAltitude", ft(perf.max_altitude_m)},
                       {"maxSpeed", num(units::mps_to_kt(perf.max_speed_mps))},
                       {"risks", {{"fuel", num(perf.risk_fuel)}, {"ground", num(perf.risk_ground)},
                                  {"coverage", num(perf.risk_coverage)}}},
                       {"tasks", tasks}});
    }
    return out;
}

json routes(const Schedule& s, const Mission& m) {
    json out = json::array();
    for (const UavPlan& p : s.uavs) {
        if (p.segments.empty()) continue;
        json wps = json::array();
        json w0 = point_t(p.segments.front().from, p.segments.front().t0);
        w0["kind"] = "departure";
        wps.push_back(w0);
        for (const Segment& seg : p.segments) {
            if (!seg.waypoint_at_end && seg.from != seg.to) continue;
            json w = point_t(seg.to, seg.t1);
            w["kind"] = std::string(to_string(seg.kind));
            if (seg.task != PlanningContext::npos) w["task"] = s.tasks[seg.task].id;
            wps.push_back(std::move(w));
        }
        out.push_back({{"uav", m.uavs[p.uav].name}, {"waypoints", wps}});
    }
    return out;
}

json altitude_profiles(const PlanningContext& ctx, const Schedule& s, double step_m) {
    json out = json::array();
    for (const UavPlan& p : s.uavs) {
        if (p.segments.empty()) continue;
        json samples = json::array();
        double along = 0.0;
        auto sample = [&](const GeoPoint& q, double d) {
            samples.push_back({{"distance", nm(d)}, {"alt", ft(q.alt)}, {"ground", ft(ctx.grid().elevation_at(q))}});
        };
        sample(p.segments.front().from, 0.0);
        for (const Segment& seg : p.segments) {
            if (seg.length_m <= 0.0) continue;
            const int n = std::max(1, static_cast<int>(std::ceil(seg.length_m / step_m)));
            for (int k = 1; k <= n; ++k) {
                const double f = static_cast<double>(k) / n;
                sample(geo::lerp(seg.from, seg.to, f), along + f * seg.length_m);
            }
            along += seg.length_m;
        }
        out.push_back({{"uav", ctx.mission().uavs[p.uav].name}, {"samples", samples}});
    }
    return out;
}

json solution_json(const PlanningContext& ctx, const Evaluated& e, const RankedPlan& rank) {
    const EvaluationReport& r = e.report;
    return {{"rank", rank.rank},
            {"S", rank.S},
            {"R", rank.R},
            {"Q", rank.Q},
            {"inCompromiseSet", rank.in_compromise_set},
            {"genome", to_json(ctx, e.genome)},
            {"objectives",
             {{"makespan", num(r.makespan_s)},
              {"cost", num(r.cost)},
              {"fuel", num(r.fuel_kg)},
              {"flightTime", num(r.flight_time_s)},
              {"distance", nm(r.distance_m)},
              {"nUavs", r.n_uavs},
              {"nTasks", r.n_tasks},
              {"nGcss", r.n_gcss}}},
            {"risks",
             {{"fuel", num(r.risk_fuel)},
              {"ground", num(r.risk_ground)},
              {"coverage", num(r.risk_coverage)},
              {"closeness", num(r.risk_closeness)}}},
            {"minSeparation", num(r.min_separation_m)},
            {"tasks", task_rows(ctx, e.schedule)},
            {"uavs", uav_blocks(ctx, e.schedule, r)},
            {"routes", routes(e.schedule, ctx.mission())},
            {"altitudeProfiles", altitude_profiles(ctx, e.schedule)}};
}

json histogram_json(const std::vector<std::pair<std::string, long>>& h) {
    json a = json::array();
    for (const auto& [code, n] : h) a.push_back({{"reason", code}, {"count", n}});
    return a;
}

json plan_response(const PlanningContext& ctx, const PlannerResult& r, const ResponseExtras& extras) {
    json j;
    j["planSchema"] = kPlanSchema;
    if (extras.run_id) j["runId"] = *extras.run_id;
    j["mission"] = wire::to_json(ctx.mission());
    j["mode"] = r.config.mode == SearchMode::plan ? "plan" : "replan";
    j["config"] = config_json(r.config);
    j["seed"] = r.config.seed;
    j["runtime"] = r.config.runtime_s;
    j["generations"] = r.generations;
    j["evaluations"] = r.evaluations;
    j["wallTime"] = num(r.wall_s);
    j["canceled"] = r.canceled;
    j["frontSize"] = r.front.size();
    if (extras.snapshot_time) j["snapshotTime"] = num(*extras.snapshot_time);
    json sols = json::array();
    for (const RankedPlan& rp : rank_solutions(ctx, r.solutions)) sols.push_back(solution_json(ctx, r.solutions[rp.index], rp));
    j["solutions"] = sols;
    if (sols.empty()) j["histogram"] = histogram_json(r.histogram);
    return j;
}

PlanGenome response_genome(const PlanningContext& ctx, const json& response, std::size_t index) {
    const auto& sols = response.at("solutions");
    if (index >= sols.size())
        throw Error("plan index " + std::to_string(index) + " out of range (" + std::to_string(sols.size()) + " solutions)");
    return genome_from_json(ctx, sols[index].at("genome"));
}

json uav_state_json(const SimState& s, const UavState& u) {
    return {{"uav", s.mission.uavs[u.uav].name},
            {"status", std::string(to_string(u.status))},
            {"lat", u.position.lat},
            {"lon", u.position.lon},
            {"alt", ft(u.position.alt)},
            {"fuel", num(u.fuel_kg)},
            {"nextWaypoint", u.next_waypoint},
            {"halted", u.halted}};
}

json telemetry_json(const SimState& s) {
    json uavs = json::array();
    for (const auto& u : s.uavs) uavs.push_back(uav_state_json(s, u));
    json tasks = json::array();
    for (const auto& t : s.tasks)
        tasks.push_back({{"id", t.id}, {"status", std::string(to_string(t.status))}, {"assigned", t.assigned}});
    return {{"t", num(s.clock)}, {"terminal", s.terminal()}, {"uavs", uavs}, {"tasks", tasks}};
}

json snapshot_json(const SimSnapshot& snap) {
    json uavs = json::array();
    for (std::size_t u = 0; u < snap.starts.size(); ++u) {
        const UavStart& st = snap.starts[u];
        uavs.push_back({{"uav", snap.mission.uavs[u].name},
                        {"lat", st.position.lat},
                        {"lon", st.position.lon},
                        {"alt", ft(st.position.alt)},
                        {"fuel", num(st.fuel_kg)},
                        {"ready", num(st.ready_s)},
                        {"airborne", st.airborne}});
    }
    json tasks = json::array();
    for (const auto& t : snap.tasks) tasks.push_back({{"id", t.id}, {"status", std::string(to_string(t.status))}});
    return {{"time", num(snap.time)}, {"uavs", uavs}, {"tasks", tasks}};
}

json plan_request(const Mission& m, const SearchConfig& c) {
    return {{"mission", wire::to_json(m)}, {"config", config_json(c)}};
}

} // namespace uavmp::io
