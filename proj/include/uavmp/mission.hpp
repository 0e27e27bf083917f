#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "uavmp/catalog.hpp"
#include "uavmp/errors.hpp"
#include "uavmp/geo.hpp"

namespace uavmp {

using geo::Bounds;
using geo::GeoPoint;
using geo::PolygonZone;

/// Seconds since mission start.
struct TimeWindow {
    double start_s = 0.0;
    double end_s = 0.0;

    bool contains(double t) const { return t >= start_s && t <= end_s; }
    bool operator==(const TimeWindow&) const = default;
};

struct Uav {
    std::string name;
    VehicleType vtype;
    double fuel_kg = 0.0;
    GeoPoint position;
    std::optional<GeoPoint> departure_runway_end;
    std::optional<GeoPoint> landing_track_start;
    std::optional<GeoPoint> end_position;
    std::optional<TimeWindow> availability;
    std::vector<std::string> sensors;

    bool carries(const std::string& sensor) const;
    const GeoPoint& home() const { return end_position ? *end_position : position; }
    bool operator==(const Uav&) const = default;
};

struct Gcs {
    std::string name;
    GeoPoint position;
    double range_m = 0.0;
    int max_vehicles = 1;
    std::vector<std::string> controllable_types;

    bool controls(const std::string& vtype) const;
    bool operator==(const Gcs&) const = default;
};

enum class GeometryKind { zone, path, point };

std::string_view to_string(GeometryKind k);

struct Objective {
    std::string name;
    std::string otype;
    GeometryKind kind = GeometryKind::point;
    PolygonZone zone;                // kind == zone
    std::optional<GeoPoint> entry;   // zone only
    std::optional<GeoPoint> exit;    // zone only
    std::vector<GeoPoint> path;      // kind == path
    GeoPoint point;                  // kind == point
    std::optional<TimeWindow> window;
    std::optional<double> duration_s; // zone / point only
    bool mandatory = true;
    bool requires_los = false;

    /// Where the vehicle holds while working (zone centroid or the point itself).
    GeoPoint work_point() const;
    bool operator==(const Objective&) const = default;
};

enum class AllenRelation { before, meets, overlaps, starts, during, finishes, equals };
inline constexpr std::array<AllenRelation, 7> kAllenRelations{
    AllenRelation::before, AllenRelation::meets,    AllenRelation::overlaps, AllenRelation::starts,
    AllenRelation::during, AllenRelation::finishes, AllenRelation::equals};

std::string_view to_string(AllenRelation r);
std::optional<AllenRelation> allen_from_string(std::string_view s);

enum class UavRelation { undefined, same, different };

std::string_view to_string(UavRelation r);
std::optional<UavRelation> uav_relation_from_string(std::string_view s);

/// Between two objectives (by name), or between two tasks of one objective (by task id)
/// when produced by objective expansion.
struct Dependency {
    std::string first;
    AllenRelation relation = AllenRelation::before;
    std::string second;
    UavRelation uav_relation = UavRelation::undefined;
    double offset_s = 0.0;

    bool operator==(const Dependency&) const = default;
};

enum class Importance { very_low = 1, low = 2, medium = 3, high = 4, very_high = 5 };

std::string_view to_string(Importance i);
std::optional<Importance> importance_from_string(std::string_view s);

/// The twelve ranking variables, in criteria-matrix column order.
inline constexpr std::array<std::string_view, 12> kRankingVariables{
    "makespan",  "cost",       "fuel",          "flightTime", "distance", "riskFuel",
    "riskGround", "riskCoverage", "riskCloseness", "nUavs",      "nTasks",   "nGcss"};

struct Caps {
    std::optional<double> makespan_s;
    std::optional<double> cost;
    std::optional<double> flight_time_s;
    std::optional<double> fuel_kg;
    std::optional<double> distance_m;

    bool operator==(const Caps&) const = default;
};

struct OperatorProfile {
    bool all_tasks_mandatory = false;
    double ground_min_m = 50.0;
    double ground_risked_m = 300.0;
    double fuel_max_pct = 90.0;
    double fuel_risked_pct = 50.0;
    double sep_min_m = 150.0;
    double sep_risked_m = 1000.0;
    double coverage_min_s = 60.0;
    double coverage_max_s = 600.0;
    std::array<Importance, 12> importance{
        Importance::medium, Importance::medium, Importance::medium, Importance::medium,
        Importance::medium, Importance::medium, Importance::medium, Importance::medium,
        Importance::medium, Importance::medium, Importance::medium, Importance::medium};
    Caps caps;

    bool operator==(const OperatorProfile&) const = default;
};

struct Mission {
    std::string name;
    Bounds bounds;
    double arc_seconds = 30.0;
    std::optional<std::int64_t> start_epoch; // UTC seconds
    std::optional<std::string> elevation_file;
    std::vector<Uav> uavs;
    std::vector<Gcs> gcss;
    std::vector<Objective> objectives;
    std::vector<PolygonZone> nfzs;
    std::vector<std::string> nfz_names;
    std::vector<Dependency> dependencies;
    OperatorProfile profile;

    const Objective* objective(std::string_view name) const;
    bool operator==(const Mission&) const = default;
};

struct Task {
    std::string id; // "<objective>/<task>"
    std::size_t objective = 0;
    std::size_t index = 0; // within the objective
    std::vector<std::string> sensors;
    bool multi_vehicle = false;
    bool mandatory = true;
    std::optional<double> duration_s; // unset for path traversals (depends on speed)
};

struct Expansion {
    std::vector<Task> tasks;
    std::vector<Dependency> dependencies; // between task ids
};

/// Tasks of one objective plus the dependencies linking them. Throws ValidationError
/// for an unknown objective type.
Expansion expand_objective(const Objective& o, std::size_t objective_index, const Catalog& catalog,
                           bool all_mandatory = false);

/// Expansion of every objective in mission order.
Expansion expand_mission(const Mission& m, const Catalog& catalog = Catalog::builtin());

/// Checks every invariant of a mission value. Returns all issues found.
std::vector<Issue> validate_mission(const Mission& m, const Catalog& catalog = Catalog::builtin());

/// Checks one objective against a mission (used when injecting objectives mid-run).
std::vector<Issue> validate_new_objective(const Mission& m, const Objective& o,
                                          const Catalog& catalog = Catalog::builtin());

/// JSON text to validated Mission. Throws ValidationError listing every issue.
Mission parse_mission(std::string_view json_text, const Catalog& catalog = Catalog::builtin());
/// Canonical JSON text (sorted keys, two-space indent).
std::string serialize_mission(const Mission& m);

/// Objective in its wire form; relative times need the mission start.
Objective parse_objective(std::string_view json_text, const Mission& m, const Catalog& catalog = Catalog::builtin());

// Time helpers. Wire timestamps look like 2024-05-01T10:00:00Z.
std::optional<std::int64_t> parse_timestamp(std::string_view s);
std::string format_timestamp(std::int64_t epoch_s);

} // namespace uavmp
