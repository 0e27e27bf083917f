#pragma once

// Lenient JSON accessors that record problems instead of throwing.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "uavmp/errors.hpp"
#include "uavmp/geo.hpp"
#include "uavmp/units.hpp"

namespace uavmp::jsonu {

using nlohmann::json;

class Reader {
public:
    explicit Reader(std::vector<Issue>& issues) : issues_(issues) {}

    void add(const std::string& path, std::string msg) { issues_.push_back({path, std::move(msg)}); }

    const json* field(const json& obj, const char* key, const std::string& path, bool required) {
        if (!obj.is_object()) {
            if (required) add(path, "expected an object");
            return nullptr;
        }
        auto it = obj.find(key);
        if (it == obj.end() || it->is_null()) {
            if (required) add(path + "/" + key, "missing");
            return nullptr;
        }
        return &*it;
    }

    std::optional<double> number(const json& obj, const char* key, const std::string& path, bool required = true) {
        const json* j = field(obj, key, path, required);
        if (!j) return std::nullopt;
        if (!j->is_number()) {
            add(path + "/" + key, "expected a number");
            return std::nullopt;
        }
        return j->get<double>();
    }

    double number_or(const json& obj, const char* key, const std::string& path, double fallback,
                     bool required = true) {
        return number(obj, key, path, required).value_or(fallback);
    }

    std::optional<std::string> string(const json& obj, const char* key, const std::string& path,
                                      bool required = true) {
        const json* j = field(obj, key, path, required);
        if (!j) return std::nullopt;
        if (!j->is_string()) {
            add(path + "/" + key, "expected a string");
            return std::nullopt;
        }
        return j->get<std::string>();
    }

    bool boolean(const json& obj, const char* key, const std::string& path, bool fallback) {
        const json* j = field(obj, key, path, false);
        if (!j) return fallback;
        if (!j->is_boolean()) {
            add(path + "/" + key, "expected a boolean");
            return fallback;
        }
        return j->get<bool>();
    }

    const json* array(const json& obj, const char* key, const std::string& path, bool required = true) {
        const json* j = field(obj, key, path, required);
        if (!j) return nullptr;
        if (!j->is_array()) {
            add(path + "/" + key, "expected an array");
            return nullptr;
        }
        return j;
    }

    std::vector<std::string> strings(const json& obj, const char* key, const std::string& path,
                                     bool required = true) {
        std::vector<std::string> out;
        const json* a = array(obj, key, path, required);
        if (!a) return out;
        for (std::size_t i = 0; i < a->size(); ++i) {
            if (!(*a)[i].is_string())
                add(path + "/" + key + "/" + std::to_string(i), "expected a string");
            else
                out.push_back((*a)[i].get<std::string>());
        }
        return out;
    }

    /// {lat, lon, alt?} with alt in feet on the wire.
    std::optional<geo::GeoPoint> point(const json& j, const std::string& path) {
        if (!j.is_object()) {
            add(path, "expected a point object");
            return std::nullopt;
        }
        auto lat = number(j, "lat", path);
        auto lon = number(j, "lon", path);
        auto alt = number(j, "alt", path, false);
        if (!lat || !lon) return std::nullopt;
        return geo::GeoPoint{*lat, *lon, units::ft_to_m(alt.value_or(0.0))};
    }

    std::optional<geo::GeoPoint> point_field(const json& obj, const char* key, const std::string& path,
                                             bool required) {
        const json* j = field(obj, key, path, required);
        if (!j) return std::nullopt;
        return point(*j, path + "/" + key);
    }

    std::vector<geo::GeoPoint> points(const json& obj, const char* key, const std::string& path) {
        std::vector<geo::GeoPoint> out;
        const json* a = array(obj, key, path);
        if (!a) return out;
        for (std::size_t i = 0; i < a->size(); ++i)
            if (auto p = point((*a)[i], path + "/" + key + "/" + std::to_string(i))) out.push_back(*p);
        return out;
    }

private:
    std::vector<Issue>& issues_;
};

inline json point_json(const geo::GeoPoint& p) {
    json j = {{"lat", p.lat}, {"lon", p.lon}};
    if (p.alt != 0.0) j["alt"] = units::wire_round(units::m_to_ft(p.alt));
    return j;
}

inline json points_json(const std::vector<geo::GeoPoint>& ps) {
    json a = json::array();
    for (const auto& p : ps) a.push_back(point_json(p));
    return a;
}

/// Meters to wire value for a unit converter, rounded for stable round trips.
inline double out(double v) { return units::wire_round(v); }

} // namespace uavmp::jsonu
