#include "uavmp/catalog.hpp"

#include <algorithm>

#include <json.hpp>

#include "uavmp/errors.hpp"
#include "uavmp/units.hpp"

namespace uavmp {

namespace detail {
extern const std::string_view kBuiltinCatalogJson;
}

using nlohmann::json;

std::string_view to_string(ProfileKind k) {
    switch (k) {
    case ProfileKind::min_consumption: return "min_consumption";
    case ProfileKind::max_speed: return "max_speed";
    case ProfileKind::climb: return "climb";
    case ProfileKind::descent: return "descent";
    }
    return "?";
}

std::optional<ProfileKind> profile_from_string(std::string_view s) {
    for (int i = 0; i < 4; ++i) {
        auto k = static_cast<ProfileKind>(i);
        if (to_string(k) == s) return k;
    }
    return std::nullopt;
}

namespace {

double positive(const json& j, const char* key, const std::string& path, std::vector<Issue>& issues) {
    if (!j.is_object() || !j.contains(key) || !j[key].is_number()) {
        issues.push_back({path + "/" + key, "missing or not a number"});
        return 1.0;
    }
    const double v = j[key].get<double>();
    if (!(v > 0.0)) issues.push_back({path + "/" + key, "must be positive"});
    return v;
}

} // namespace

Catalog Catalog::parse(std::string_view text) {
    json doc = json::parse(text, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) throw ValidationError("", "catalog is not a JSON object");
    std::vector<Issue> issues;
    Catalog c;
    c.version_ = doc.value("catalogVersion", 0);
    if (c.version_ < 1) issues.push_back({"/catalogVersion", "missing catalog version"});
    if (doc.contains("sensors") && doc["sensors"].is_array()) {
        for (const auto& s : doc["sensors"])
            if (s.is_string()) c.sensors_.push_back(s.get<std::string>());
    } else {
        issues.push_back({"/sensors", "missing sensor list"});
    }

    if (doc.contains("vehicleTypes") && doc["vehicleTypes"].is_object()) {
        for (const auto& [name, v] : doc["vehicleTypes"].items()) {
            const std::string p = "/vehicleTypes/" + name;
            VehicleType t;
            t.name = name;
            t.mass_kg = positive(v, "mass", p, issues);
            t.max_fuel_kg = positive(v, "maxFuel", p, issues);
            t.cost_per_hour = positive(v, "costPerHour", p, issues);
            t.max_altitude_m = units::ft_to_m(positive(v, "maxAltitude", p, issues));
            t.max_speed_mps = units::kt_to_mps(positive(v, "maxSpeed", p, issues));
            t.max_flight_time_s = units::h_to_s(positive(v, "maxFlightTime", p, issues));
            t.max_range_m = units::nm_to_m(positive(v, "maxRange", p, issues));
            const json profs = v.is_object() ? v.value("profiles", json::object()) : json::object();
            for (int i = 0; i < 4; ++i) {
                const auto kind = static_cast<ProfileKind>(i);
                const std::string key(to_string(kind));
                const std::string pp = p + "/profiles/" + key;
                const json pj = profs.value(key, json());
                FlightProfile& fp = t.profiles[i];
                fp.kind = kind;
                fp.speed_mps = units::kt_to_mps(positive(pj, "speed", pp, issues));
                fp.fuel_rate_kgps = units::kgph_to_kgps(positive(pj, "fuelRate", pp, issues));
                if (i < kCruiseProfiles) {
                    fp.altitude_m = units::ft_to_m(positive(pj, "altitude", pp, issues));
                    if (fp.altitude_m > t.max_altitude_m) issues.push_back({pp + "/altitude", "above max altitude"});
                } else {
                    fp.angle_deg = positive(pj, "angle", pp, issues);
                    if (fp.angle_deg >= 90.0) issues.push_back({pp + "/angle", "must be below 90 degrees"});
                }
                if (fp.speed_mps > t.max_speed_mps * (1 + 1e-12))
                    issues.push_back({pp + "/speed", "above max speed"});
            }
            c.vehicles_.emplace(name, std::move(t));
        }
    } else {
        issues.push_back({"/vehicleTypes", "missing vehicle types"});
    }

    if (doc.contains("objectiveTypes") && doc["objectiveTypes"].is_object()) {
        for (const auto& [name, o] : doc["objectiveTypes"].items()) {
            const std::string p = "/objectiveTypes/" + name;
            ObjectiveType ot;
            ot.name = name;
            ot.intra_relation = o.is_object() ? o.value("intraRelation", std::string()) : std::string();
            const json tasks = o.is_object() ? o.value("tasks", json::array()) : json::array();
            if (tasks.empty() || !tasks.is_array()) issues.push_back({p + "/tasks", "needs at least one task"});
            for (std::size_t i = 0; tasks.is_array() && i < tasks.size(); ++i) {
                const std::string tp = p + "/tasks/" + std::to_string(i);
                const json& tj = tasks[i];
                TaskTemplate tt;
                tt.name = tj.is_object() ? tj.value("name", std::string()) : std::string();
                if (tt.name.empty()) issues.push_back({tp + "/name", "missing task name"});
                if (tj.is_object() && tj.contains("sensors") && tj["sensors"].is_array()) {
                    for (const auto& s : tj["sensors"]) {
                        const std::string sn = s.is_string() ? s.get<std::string>() : std::string();
                        if (std::find(c.sensors_.begin(), c.sensors_.end(), sn) == c.sensors_.end())
                            issues.push_back({tp + "/sensors", "unknown sensor '" + sn + "'"});
                        tt.sensors.push_back(sn);
                    }
                }
                if (tt.sensors.empty()) issues.push_back({tp + "/sensors", "needs at least one sensor"});
                tt.multi_vehicle = tj.is_object() && tj.value("multiVehicle", false);
                tt.default_duration_s = positive(tj, "defaultDuration", tp, issues);
                ot.tasks.push_back(std::move(tt));
            }
            if (ot.tasks.size() > 1 && ot.intra_relation.empty())
                issues.push_back({p + "/intraRelation", "multi-task types need a relation"});
            c.objectives_.emplace(name, std::move(ot));
        }
    } else {
        issues.push_back({"/objectiveTypes", "missing objective types"});
    }
    if (!issues.empty()) throw ValidationError(std::move(issues));
    return c;
}

const Catalog& Catalog::builtin() {
    static const Catalog c = parse(detail::kBuiltinCatalogJson);
    return c;
}

const VehicleType* Catalog::vehicle(const std::string& name) const {
    auto it = vehicles_.find(name);
    return it == vehicles_.end() ? nullptr : &it->second;
}

const ObjectiveType* Catalog::objective_type(const std::string& name) const {
    auto it = objectives_.find(name);
    return it == objectives_.end() ? nullptr : &it->second;
}

bool Catalog::has_sensor(const std::string& s) const {
    return std::find(sensors_.begin(), sensors_.end(), s) != sensors_.end();
}

} // namespace uavmp
