#include <cmath>

#include "json_util.hpp"
#include "uavmp/wire.hpp"

namespace uavmp {

using jsonu::json;
using jsonu::Reader;

namespace {

std::optional<TimeWindow> read_window(Reader& r, const json& obj, const char* key, const std::string& path,
                                      const std::optional<std::int64_t>& start) {
    const json* w = r.field(obj, key, path, false);
    if (!w) return std::nullopt;
    const std::string p = path + "/" + key;
    auto s = r.string(*w, "start", p);
    auto e = r.string(*w, "end", p);
    if (!s || !e) return std::nullopt;
    auto ts = parse_timestamp(*s);
    auto te = parse_timestamp(*e);
    if (!ts) r.add(p + "/start", "expected a timestamp like 2024-05-01T10:00:00Z");
    if (!te) r.add(p + "/end", "expected a timestamp like 2024-05-01T10:00:00Z");
    if (!ts || !te) return std::nullopt;
    const std::int64_t base = start.value_or(0);
    return TimeWindow{static_cast<double>(*ts - base), static_cast<double>(*te - base)};
}

json window_json(const TimeWindow& w, const std::optional<std::int64_t>& start) {
    const std::int64_t base = start.value_or(0);
    return {{"start", format_timestamp(base + static_cast<std::int64_t>(std::llround(w.start_s)))},
            {"end", format_timestamp(base + static_cast<std::int64_t>(std::llround(w.end_s)))}};
}

OperatorProfile read_profile(Reader& r, const json& j, const std::string& p, OperatorProfile op) {
    if (!j.is_object()) {
        r.add(p, "expected an object");
        return op;
    }
    op.all_tasks_mandatory = r.boolean(j, "allTasksMandatory", p, op.all_tasks_mandatory);
    auto pair = [&](const char* key, const char* lo_key, const char* hi_key, double& lo, double& hi) {
        const json* o = r.field(j, key, p, false);
        if (!o) return;
        const std::string pp = p + "/" + key;
        lo = r.number_or(*o, lo_key, pp, lo, false);
        hi = r.number_or(*o, hi_key, pp, hi, false);
    };
    pair("groundDistance", "min", "risked", op.ground_min_m, op.ground_risked_m);
    pair("fuelUsage", "risked", "max", op.fuel_risked_pct, op.fuel_max_pct);
    pair("separation", "min", "risked", op.sep_min_m, op.sep_risked_m);
    pair("coverageTime", "min", "max", op.coverage_min_s, op.coverage_max_s);
    if (const json* imp = r.field(j, "importance", p, false)) {
        const std::string ip = p + "/importance";
        if (!imp->is_object()) r.add(ip, "expected an object");
        for (std::size_t i = 0; imp->is_object() && i < kRankingVariables.size(); ++i) {
            const std::string key(kRankingVariables[i]);
            auto v = r.string(*imp, key.c_str(), ip);
            if (!v) continue;
            if (auto level = importance_from_string(*v))
                op.importance[i] = *level;
            else
                r.add(ip + "/" + key, "expected very_low, low, medium, high or very_high");
        }
        if (imp->is_object()) {
            for (const auto& [k, v] : imp->items()) {
                bool known = false;
                for (auto name : kRankingVariables) known = known || name == k;
                if (!known) r.add(ip + "/" + k, "unknown ranking variable");
            }
        }
    }
    if (const json* c = r.field(j, "caps", p, false)) {
        const std::string cp = p + "/caps";
        auto cap = [&](const char* key, std::optional<double>& slot, double scale) {
            if (r.field(*c, key, cp, false)) {
                if (auto v = r.number(*c, key, cp)) slot = *v * scale;
            }
        };
        cap("makespan", op.caps.makespan_s, 1.0);
        cap("cost", op.caps.cost, 1.0);
        cap("flightTime", op.caps.flight_time_s, 1.0);
        cap("fuel", op.caps.fuel_kg, 1.0);
        cap("distance", op.caps.distance_m, units::kNauticalMileM);
    }
    return op;
}

Objective read_objective(Reader& r, const json& j, const std::string& p, const std::optional<std::int64_t>& start) {
    Objective o;
    if (!j.is_object()) {
        r.add(p, "expected an object");
        return o;
    }
    o.name = r.string(j, "name", p).value_or("");
    o.otype = r.string(j, "type", p).value_or("");
    o.mandatory = r.boolean(j, "mandatory", p, true);
    o.requires_los = r.boolean(j, "requiresLos", p, false);
    if (r.field(j, "duration", p, false)) o.duration_s = r.number(j, "duration", p);
    o.window = read_window(r, j, "timeWindow", p, start);
    const json* g = r.field(j, "geometry", p, true);
    if (!g) return o;
    const std::string gp = p + "/geometry";
    const std::string kind = r.string(*g, "kind", gp).value_or("");
    if (kind == "zone") {
        o.kind = GeometryKind::zone;
        o.zone.vertices = r.points(*g, "vertices", gp);
        o.entry = r.point_field(*g, "entry", gp, false);
        o.exit = r.point_field(*g, "exit", gp, false);
    } else if (kind == "path") {
        o.kind = GeometryKind::path;
        o.path = r.points(*g, "vertices", gp);
    } else if (kind == "point") {
        o.kind = GeometryKind::point;
        o.point = r.point_field(*g, "position", gp, true).value_or(GeoPoint{});
    } else {
        r.add(gp + "/kind", "expected zone, path or point");
    }
    if (o.kind != GeometryKind::zone && (g->contains("entry") || g->contains("exit")))
        r.add(gp, "entry and exit points only apply to zones");
    return o;
}

Mission read_mission(Reader& r, const json& j, const Catalog& catalog) {
    Mission m;
    if (!j.is_object()) {
        r.add("", "expected a mission object");
        return m;
    }
    if (const json* v = r.field(j, "missionSchema", "", false)) {
        if (!v->is_number_integer() || v->get<long long>() != wire::kMissionSchema)
            r.add("/missionSchema", "unsupported schema version");
    }
    m.name = r.string(j, "name", "").value_or("");
    if (const json* b = r.field(j, "bounds", "", true)) {
        m.bounds.lat0 = r.number_or(*b, "lat0", "/bounds", 0);
        m.bounds.lon0 = r.number_or(*b, "lon0", "/bounds", 0);
        m.bounds.lat1 = r.number_or(*b, "lat1", "/bounds", 0);
        m.bounds.lon1 = r.number_or(*b, "lon1", "/bounds", 0);
    }
    m.arc_seconds = r.number_or(j, "arcSeconds", "", 30.0);
    if (auto s = r.string(j, "startTime", "", false)) {
        m.start_epoch = parse_timestamp(*s);
        if (!m.start_epoch) r.add("/startTime", "expected a timestamp like 2024-05-01T10:00:00Z");
    }
    m.elevation_file = r.string(j, "elevationFile", "", false);

    if (const json* a = r.array(j, "uavs", "", false)) {
        for (std::size_t i = 0; i < a->size(); ++i) {
            const json& u = (*a)[i];
            const std::string p = "/uavs/" + std::to_string(i);
            Uav uav;
            if (!u.is_object()) {
                r.add(p, "expected an object");
                continue;
            }
            uav.name = r.string(u, "name", p).value_or("");
            const std::string type = r.string(u, "type", p).value_or("");
            if (const VehicleType* vt = catalog.vehicle(type))
                uav.vtype = *vt;
            else
                r.add(p + "/type", "unknown vehicle type '" + type + "'");
            uav.vtype.name = type;
            uav.fuel_kg = r.number_or(u, "fuel", p, 0.0);
            uav.position = r.point_field(u, "position", p, true).value_or(GeoPoint{});
            uav.departure_runway_end = r.point_field(u, "departureRunwayEnd", p, false);
            uav.landing_track_start = r.point_field(u, "landingTrackStart", p, false);
            uav.end_position = r.point_field(u, "endPosition", p, false);
            uav.availability = read_window(r, u, "availability", p, m.start_epoch);
            uav.sensors = r.strings(u, "sensors", p, false);
            m.uavs.push_back(std::move(uav));
        }
    }
    if (const json* a = r.array(j, "gcss", "", false)) {
        for (std::size_t i = 0; i < a->size(); ++i) {
            const json& g = (*a)[i];
            const std::string p = "/gcss/" + std::to_string(i);
            if (!g.is_object()) {
                r.add(p, "expected an object");
                continue;
            }
            Gcs gcs;
            gcs.name = r.string(g, "name", p).value_or("");
            gcs.position = r.point_field(g, "position", p, true).value_or(GeoPoint{});
            gcs.range_m = units::nm_to_m(r.number_or(g, "range", p, 0.0));
            const double mv = r.number_or(g, "maxVehicles", p, 1.0);
            if (mv != std::floor(mv) || mv < 1 || mv > 1e6)
                r.add(p + "/maxVehicles", "expected a positive integer");
            else
                gcs.max_vehicles = static_cast<int>(mv);
            gcs.controllable_types = r.strings(g, "controllableTypes", p);
            m.gcss.push_back(std::move(gcs));
        }
    }
    if (const json* a = r.array(j, "objectives", "", false)) {
        for (std::size_t i = 0; i < a->size(); ++i)
            m.objectives.push_back(read_objective(r, (*a)[i], "/objectives/" + std::to_string(i), m.start_epoch));
    }
    if (const json* a = r.array(j, "nfzs", "", false)) {
        for (std::size_t i = 0; i < a->size(); ++i) {
            const std::string p = "/nfzs/" + std::to_string(i);
            const json& z = (*a)[i];
            if (!z.is_object()) {
                r.add(p, "expected an object");
                continue;
            }
            m.nfz_names.push_back(r.string(z, "name", p).value_or(""));
            m.nfzs.push_back(PolygonZone{r.points(z, "vertices", p)});
        }
    }
    if (const json* a = r.array(j, "dependencies", "", false)) {
        for (std::size_t i = 0; i < a->size(); ++i) {
            const std::string p = "/dependencies/" + std::to_string(i);
            const json& d = (*a)[i];
            if (!d.is_object()) {
                r.add(p, "expected an object");
                continue;
            }
            Dependency dep;
            dep.first = r.string(d, "first", p).value_or("");
            dep.second = r.string(d, "second", p).value_or("");
            const std::string rel = r.string(d, "relation", p).value_or("");
            if (auto ar = allen_from_string(rel))
                dep.relation = *ar;
            else
                r.add(p + "/relation", "unknown relation '" + rel + "'");
            if (auto ur = r.string(d, "uavRelation", p, false)) {
                if (auto x = uav_relation_from_string(*ur))
                    dep.uav_relation = *x;
                else
                    r.add(p + "/uavRelation", "expected undefined, same or different");
            }
            dep.offset_s = r.number_or(d, "offset", p, 0.0, false);
            m.dependencies.push_back(std::move(dep));
        }
    }
    if (const json* op = r.field(j, "operatorProfile", "", false))
        m.profile = read_profile(r, *op, "/operatorProfile", OperatorProfile{});
    return m;
}

} // namespace

namespace wire {

json issues_json(const std::vector<Issue>& issues) {
    json a = json::array();
    for (const auto& i : issues) a.push_back({{"path", i.path}, {"message", i.message}});
    return a;
}

json to_json(const OperatorProfile& op) {
    json imp = json::object();
    for (std::size_t i = 0; i < kRankingVariables.size(); ++i)
        imp[std::string(kRankingVariables[i])] = std::string(to_string(op.importance[i]));
    json caps = json::object();
    if (op.caps.makespan_s) caps["makespan"] = *op.caps.makespan_s;
    if (op.caps.cost) caps["cost"] = *op.caps.cost;
    if (op.caps.flight_time_s) caps["flightTime"] = *op.caps.flight_time_s;
    if (op.caps.fuel_kg) caps["fuel"] = *op.caps.fuel_kg;
    if (op.caps.distance_m) caps["distance"] = jsonu::out(units::m_to_nm(*op.caps.distance_m));
    return {{"allTasksMandatory", op.all_tasks_mandatory},
            {"groundDistance", {{"min", op.ground_min_m}, {"risked", op.ground_risked_m}}},
            {"fuelUsage", {{"max", op.fuel_max_pct}, {"risked", op.fuel_risked_pct}}},
            {"separation", {{"min", op.sep_min_m}, {"risked", op.sep_risked_m}}},
            {"coverageTime", {{"min", op.coverage_min_s}, {"max", op.coverage_max_s}}},
            {"importance", imp},
            {"caps", caps}};
}

OperatorProfile profile_from_json(const json& j, const OperatorProfile& base) {
    std::vector<Issue> issues;
    Reader r(issues);
    OperatorProfile op = read_profile(r, j, "/operatorProfile", base);
    if (!issues.empty()) throw ValidationError(std::move(issues));
    return op;
}

json to_json(const Objective& o, const Mission& m) {
    json g;
    switch (o.kind) {
    case GeometryKind::zone:
        g = {{"kind", "zone"}, {"vertices", jsonu::points_json(o.zone.vertices)}};
        if (o.entry) g["entry"] = jsonu::point_json(*o.entry);
        if (o.exit) g["exit"] = jsonu::point_json(*o.exit);
        break;
    case GeometryKind::path: g = {{"kind", "path"}, {"vertices", jsonu::points_json(o.path)}}; break;
    case GeometryKind::point: g = {{"kind", "point"}, {"position", jsonu::point_json(o.point)}}; break;
    }
    json j = {{"name", o.name},
              {"type", o.otype},
              {"geometry", g},
              {"mandatory", o.mandatory},
              {"requiresLos", o.requires_los}};
    if (o.duration_s) j["duration"] = *o.duration_s;
    if (o.window) j["timeWindow"] = window_json(*o.window, m.start_epoch);
    return j;
}

json to_json(const Mission& m) {
    json j;
    j["missionSchema"] = kMissionSchema;
    j["name"] = m.name;
    j["bounds"] = {{"lat0", m.bounds.lat0}, {"lon0", m.bounds.lon0}, {"lat1", m.bounds.lat1}, {"lon1", m.bounds.lon1}};
    j["arcSeconds"] = m.arc_seconds;
    if (m.start_epoch) j["startTime"] = format_timestamp(*m.start_epoch);
    if (m.elevation_file) j["elevationFile"] = *m.elevation_file;
    json uavs = json::array();
    for (const auto& u : m.uavs) {
        json x = {{"name", u.name},
                  {"type", u.vtype.name},
                  {"fuel", u.fuel_kg},
                  {"position", jsonu::point_json(u.position)},
                  {"sensors", u.sensors}};
        if (u.departure_runway_end) x["departureRunwayEnd"] = jsonu::point_json(*u.departure_runway_end);
        if (u.landing_track_start) x["landingTrackStart"] = jsonu::point_json(*u.landing_track_start);
        if (u.end_position) x["endPosition"] = jsonu::point_json(*u.end_position);
        if (u.availability) x["availability"] = window_json(*u.availability, m.start_epoch);
        uavs.push_back(std::move(x));
    }
    j["uavs"] = uavs;
    json gcss = json::array();
    for (const auto& g : m.gcss)
        gcss.push_back({{"name", g.name},
                        {"position", jsonu::point_json(g.position)},
                        {"range", jsonu::out(units::m_to_nm(g.range_m))},
                        {"maxVehicles", g.max_vehicles},
                        {"controllableTypes", g.controllable_types}});
    j["gcss"] = gcss;
    json objs = json::array();
    for (const auto& o : m.objectives) objs.push_back(to_json(o, m));
    j["objectives"] = objs;
    json nfzs = json::array();
    for (std::size_t i = 0; i < m.nfzs.size(); ++i)
        nfzs.push_back({{"name", i < m.nfz_names.size() ? m.nfz_names[i] : std::string()},
                        {"vertices", jsonu::points_json(m.nfzs[i].vertices)}});
    j["nfzs"] = nfzs;
    json deps = json::array();
    for (const auto& d : m.dependencies)
        deps.push_back({{"first", d.first},
                        {"relation", std::string(to_string(d.relation))},
                        {"second", d.second},
                        {"uavRelation", std::string(to_string(d.uav_relation))},
                        {"offset", d.offset_s}});
    j["dependencies"] = deps;
    j["operatorProfile"] = to_json(m.profile);
    return j;
}

Mission mission_from_json(const json& j, const Catalog& catalog) {
    std::vector<Issue> issues;
    Reader r(issues);
    Mission m = read_mission(r, j, catalog);
    if (issues.empty()) issues = validate_mission(m, catalog);
    if (!issues.empty()) throw ValidationError(std::move(issues));
    return m;
}

Objective objective_from_json(const json& j, const Mission& m, const Catalog& catalog) {
    std::vector<Issue> issues;
    Reader r(issues);
    Objective o = read_objective(r, j, "", m.start_epoch);
    if (issues.empty()) issues = validate_new_objective(m, o, catalog);
    if (!issues.empty()) throw ValidationError(std::move(issues));
    return o;
}

} // namespace wire

Mission parse_mission(std::string_view text, const Catalog& catalog) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ValidationError("", "not valid JSON");
    return wire::mission_from_json(j, catalog);
}

std::string serialize_mission(const Mission& m) { return wire::to_json(m).dump(2) + "\n"; }

Objective parse_objective(std::string_view text, const Mission& m, const Catalog& catalog) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ValidationError("", "not valid JSON");
    return wire::objective_from_json(j, m, catalog);
}

} // namespace uavmp
