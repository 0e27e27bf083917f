#include "uavmp/mission.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace uavmp {

bool Uav::carries(const std::string& sensor) const {
    return std::find(sensors.begin(), sensors.end(), sensor) != sensors.end();
}

bool Gcs::controls(const std::string& vtype) const {
    return std::find(controllable_types.begin(), controllable_types.end(), vtype) != controllable_types.end();
}

std::string_view to_string(GeometryKind k) {
    switch (k) {
    case GeometryKind::zone: return "zone";
    case GeometryKind::path: return "path";
    case GeometryKind::point: return "point";
    }
    return "?";
}

GeoPoint Objective::work_point() const {
    switch (kind) {
    case GeometryKind::zone: return geo::centroid(zone);
    case GeometryKind::path: return path.empty() ? GeoPoint{} : path.front();
    case GeometryKind::point: return point;
    }
    return point;
}

std::string_view to_string(AllenRelation r) {
    switch (r) {
    case AllenRelation::before: return "before";
    case AllenRelation::meets: return "meets";
    case AllenRelation::overlaps: return "overlaps";
    case AllenRelation::starts: return "starts";
    case AllenRelation::during: return "during";
    case AllenRelation::finishes: return "finishes";
    case AllenRelation::equals: return "equals";
    }
    return "?";
}

std::optional<AllenRelation> allen_from_string(std::string_view s) {
    for (auto r : kAllenRelations)
        if (to_string(r) == s) return r;
    return std::nullopt;
}

std::string_view to_string(UavRelation r) {
    switch (r) {
    case UavRelation::undefined: return "undefined";
    case UavRelation::same: return "same";
    case UavRelation::different: return "different";
    }
    return "?";
}

std::optional<UavRelation> uav_relation_from_string(std::string_view s) {
    for (auto r : {UavRelation::undefined, UavRelation::same, UavRelation::different})
        if (to_string(r) == s) return r;
    return std::nullopt;
}

std::string_view to_string(Importance i) {
    switch (i) {
    case Importance::very_low: return "very_low";
    case Importance::low: return "low";
    case Importance::medium: return "medium";
    case Importance::high: return "high";
    case Importance::very_high: return "very_high";
    }
    return "?";
}

std::optional<Importance> importance_from_string(std::string_view s) {
    for (int i = 1; i <= 5; ++i)
        if (to_string(static_cast<Importance>(i)) == s) return static_cast<Importance>(i);
    return std::nullopt;
}

const Objective* Mission::objective(std::string_view n) const {
    for (const auto& o : objectives)
        if (o.name == n) return &o;
    return nullptr;
}

Expansion expand_objective(const Objective& o, std::size_t objective_index, const Catalog& catalog,
                           bool all_mandatory) {
    const ObjectiveType* ot = catalog.objective_type(o.otype);
    if (!ot) throw ValidationError("/otype", "unknown objective type '" + o.otype + "'");
    Expansion e;
    for (std::size_t i = 0; i < ot->tasks.size(); ++i) {
        const TaskTemplate& tt = ot->tasks[i];
        Task t;
        t.id = o.name + "/" + tt.name;
        t.objective = objective_index;
        t.index = i;
        t.sensors = tt.sensors;
        t.multi_vehicle = tt.multi_vehicle;
        t.mandatory = o.mandatory || all_mandatory;
        if (o.kind != GeometryKind::path) t.duration_s = o.duration_s.value_or(tt.default_duration_s);
        e.tasks.push_back(std::move(t));
    }
    if (e.tasks.size() > 1) {
        const auto rel = allen_from_string(ot->intra_relation).value_or(AllenRelation::equals);
        for (std::size_t i = 1; i < e.tasks.size(); ++i)
            e.dependencies.push_back({e.tasks[i - 1].id, rel, e.tasks[i].id, UavRelation::undefined, 0.0});
    }
    return e;
}

Expansion expand_mission(const Mission& m, const Catalog& catalog) {
    Expansion all;
    for (std::size_t i = 0; i < m.objectives.size(); ++i) {
        Expansion e = expand_objective(m.objectives[i], i, catalog, m.profile.all_tasks_mandatory);
        all.tasks.insert(all.tasks.end(), e.tasks.begin(), e.tasks.end());
        all.dependencies.insert(all.dependencies.end(), e.dependencies.begin(), e.dependencies.end());
    }
    return all;
}

namespace {

bool finite_pos(double v) { return std::isfinite(v) && v > 0.0; }

struct Checker {
    const Mission& m;
    const Catalog& catalog;
    std::vector<Issue>& out;
    std::vector<PolygonZone> inflated;

    Checker(const Mission& mm, const Catalog& c, std::vector<Issue>& o) : m(mm), catalog(c), out(o) {
        for (const auto& z : m.nfzs)
            if (geo::polygon_problem(z).empty()) inflated.push_back(geo::inflate(z, geo::kDefaultNfzMarginM));
    }

    void add(std::string path, std::string msg) { out.push_back({std::move(path), std::move(msg)}); }

    void point(const GeoPoint& p, const std::string& path, bool avoid_nfz) {
        if (!geo::is_valid(p)) {
            add(path, "invalid coordinates");
            return;
        }
        if (!m.bounds.contains(p, 1e-9)) add(path, "outside the mission bounds");
        if (avoid_nfz) {
            for (const auto& z : inflated) {
                if (geo::point_in_polygon(z, p)) {
                    add(path, "inside a no-fly zone");
                    break;
                }
            }
        }
    }

    void window(const std::optional<TimeWindow>& w, const std::string& path) {
        if (!w) return;
        if (!m.start_epoch) add(path, "time windows need a mission start time");
        if (!(std::isfinite(w->start_s) && std::isfinite(w->end_s)) || !(w->start_s < w->end_s))
            add(path, "start must be before end");
    }

    void objective(const Objective& o, const std::string& p) {
        if (o.name.empty()) add(p + "/name", "empty name");
        if (!catalog.objective_type(o.otype)) add(p + "/type", "unknown objective type '" + o.otype + "'");
        switch (o.kind) {
        case GeometryKind::zone: {
            const std::string problem = geo::polygon_problem(o.zone);
            if (!problem.empty()) {
                add(p + "/geometry/vertices", problem);
            } else {
                for (std::size_t i = 0; i < o.zone.vertices.size(); ++i)
                    point(o.zone.vertices[i], p + "/geometry/vertices/" + std::to_string(i), false);
                point(o.work_point(), p + "/geometry", true);
            }
            if (o.entry) point(*o.entry, p + "/geometry/entry", true);
            if (o.exit) point(*o.exit, p + "/geometry/exit", true);
            break;
        }
        case GeometryKind::path:
            if (o.path.size() < 2) add(p + "/geometry/vertices", "a path needs at least two vertices");
            for (std::size_t i = 0; i < o.path.size(); ++i)
                point(o.path[i], p + "/geometry/vertices/" + std::to_string(i), true);
            for (std::size_t i = 1; i < o.path.size(); ++i)
                if (o.path[i].same_latlon(o.path[i - 1]))
                    add(p + "/geometry/vertices/" + std::to_string(i), "repeated vertex");
            if (o.duration_s) add(p + "/duration", "duration only applies to zone and point objectives");
            break;
        case GeometryKind::point: point(o.point, p + "/geometry/position", true); break;
        }
        if (o.kind != GeometryKind::zone && (o.entry || o.exit))
            add(p + "/geometry", "entry and exit points only apply to zones");
        if (o.duration_s && !finite_pos(*o.duration_s)) add(p + "/duration", "must be positive");
        window(o.window, p + "/timeWindow");
    }
};

} // namespace

std::vector<Issue> validate_mission(const Mission& m, const Catalog& catalog) {
    std::vector<Issue> out;
    Checker c(m, catalog, out);
    if (m.name.empty()) c.add("/name", "empty name");
    const Bounds& b = m.bounds;
    if (!(std::isfinite(b.lat0) && std::isfinite(b.lat1) && std::isfinite(b.lon0) && std::isfinite(b.lon1)) ||
        b.lat0 < -90 || b.lat1 > 90 || b.lon0 < -180 || b.lon1 > 180 || !(b.lat0 < b.lat1) || !(b.lon0 < b.lon1))
        c.add("/bounds", "bounds must satisfy lat0 < lat1 and lon0 < lon1 within valid ranges");
    if (!geo::ElevationGrid::valid_arc_seconds(m.arc_seconds)) c.add("/arcSeconds", "must be one of 30, 15, 7.5");

    std::set<std::string> names;
    auto unique = [&](const std::string& n, const std::string& path) {
        if (!names.insert(n).second) c.add(path, "duplicate element name '" + n + "'");
    };

    for (std::size_t i = 0; i < m.nfzs.size(); ++i) {
        const std::string p = "/nfzs/" + std::to_string(i);
        const std::string n = i < m.nfz_names.size() ? m.nfz_names[i] : std::string();
        if (n.empty()) c.add(p + "/name", "empty name");
        unique(n, p + "/name");
        const std::string problem = geo::polygon_problem(m.nfzs[i]);
        if (!problem.empty()) c.add(p + "/vertices", problem);
        for (std::size_t k = 0; k < m.nfzs[i].vertices.size(); ++k)
            c.point(m.nfzs[i].vertices[k], p + "/vertices/" + std::to_string(k), false);
    }
    if (m.nfz_names.size() != m.nfzs.size()) c.add("/nfzs", "names and polygons out of step");

    for (std::size_t i = 0; i < m.uavs.size(); ++i) {
        const Uav& u = m.uavs[i];
        const std::string p = "/uavs/" + std::to_string(i);
        if (u.name.empty()) c.add(p + "/name", "empty name");
        unique(u.name, p + "/name");
        if (!catalog.vehicle(u.vtype.name)) c.add(p + "/type", "unknown vehicle type '" + u.vtype.name + "'");
        if (!finite_pos(u.fuel_kg)) c.add(p + "/fuel", "must be positive");
        else if (u.fuel_kg > u.vtype.max_fuel_kg) c.add(p + "/fuel", "exceeds the vehicle's fuel capacity");
        c.point(u.position, p + "/position", true);
        if (u.position.alt < -500.0 || u.position.alt > u.vtype.max_altitude_m) c.add(p + "/position/alt", "out of range");
        if (u.departure_runway_end) c.point(*u.departure_runway_end, p + "/departureRunwayEnd", true);
        if (u.landing_track_start) c.point(*u.landing_track_start, p + "/landingTrackStart", true);
        if (u.end_position) c.point(*u.end_position, p + "/endPosition", true);
        c.window(u.availability, p + "/availability");
        std::set<std::string> seen;
        for (std::size_t k = 0; k < u.sensors.size(); ++k) {
            if (!catalog.has_sensor(u.sensors[k]))
                c.add(p + "/sensors/" + std::to_string(k), "unknown sensor '" + u.sensors[k] + "'");
            if (!seen.insert(u.sensors[k]).second) c.add(p + "/sensors/" + std::to_string(k), "duplicate sensor");
        }
    }

    for (std::size_t i = 0; i < m.gcss.size(); ++i) {
        const Gcs& g = m.gcss[i];
        const std::string p = "/gcss/" + std::to_string(i);
        if (g.name.empty()) c.add(p + "/name", "empty name");
        unique(g.name, p + "/name");
        c.point(g.position, p + "/position", false);
        if (!finite_pos(g.range_m)) c.add(p + "/range", "must be positive");
        if (g.max_vehicles < 1) c.add(p + "/maxVehicles", "must be at least 1");
        for (std::size_t k = 0; k < g.controllable_types.size(); ++k)
            if (!catalog.vehicle(g.controllable_types[k]))
                c.add(p + "/controllableTypes/" + std::to_string(k),
                      "unknown vehicle type '" + g.controllable_types[k] + "'");
    }

    for (std::size_t i = 0; i < m.objectives.size(); ++i) {
        const std::string p = "/objectives/" + std::to_string(i);
        unique(m.objectives[i].name, p + "/name");
        c.objective(m.objectives[i], p);
    }

    for (std::size_t i = 0; i < m.dependencies.size(); ++i) {
        const Dependency& d = m.dependencies[i];
        const std::string p = "/dependencies/" + std::to_string(i);
        if (!m.objective(d.first)) c.add(p + "/first", "unknown objective '" + d.first + "'");
        if (!m.objective(d.second)) c.add(p + "/second", "unknown objective '" + d.second + "'");
        if (d.first == d.second) c.add(p, "an objective cannot depend on itself");
        if (!std::isfinite(d.offset_s) || d.offset_s < 0.0) c.add(p + "/offset", "must be non-negative");
        const bool equality = d.relation == AllenRelation::meets || d.relation == AllenRelation::equals ||
                              d.relation == AllenRelation::starts || d.relation == AllenRelation::finishes;
        if (equality && d.offset_s != 0.0) c.add(p + "/offset", "must be 0 for this relation");
    }

    const OperatorProfile& op = m.profile;
    const std::string pp = "/operatorProfile";
    auto interval = [&](double lo, double hi, const std::string& path) {
        if (!(std::isfinite(lo) && std::isfinite(hi)) || lo < 0.0 || !(lo < hi)) c.add(path, "needs 0 <= low < high");
    };
    interval(op.ground_min_m, op.ground_risked_m, pp + "/groundDistance");
    interval(op.fuel_risked_pct, op.fuel_max_pct, pp + "/fuelUsage");
    interval(op.sep_min_m, op.sep_risked_m, pp + "/separation");
    interval(op.coverage_min_s, op.coverage_max_s, pp + "/coverageTime");
    auto cap = [&](const std::optional<double>& v, const char* key) {
        if (v && !finite_pos(*v)) c.add(pp + "/caps/" + key, "must be positive");
    };
    cap(op.caps.makespan_s, "makespan");
    cap(op.caps.cost, "cost");
    cap(op.caps.flight_time_s, "flightTime");
    cap(op.caps.fuel_kg, "fuel");
    cap(op.caps.distance_m, "distance");
    return out;
}

std::vector<Issue> validate_new_objective(const Mission& m, const Objective& o, const Catalog& catalog) {
    std::vector<Issue> out;
    Checker c(m, catalog, out);
    auto clash = [&](const std::string& n) { return n == o.name; };
    bool dup = std::any_of(m.objectives.begin(), m.objectives.end(), [&](const Objective& x) { return clash(x.name); }) ||
               std::any_of(m.uavs.begin(), m.uavs.end(), [&](const Uav& x) { return clash(x.name); }) ||
               std::any_of(m.gcss.begin(), m.gcss.end(), [&](const Gcs& x) { return clash(x.name); }) ||
               std::any_of(m.nfz_names.begin(), m.nfz_names.end(), clash);
    if (dup) c.add("/name", "duplicate element name '" + o.name + "'");
    c.objective(o, "");
    return out;
}

} // namespace uavmp
