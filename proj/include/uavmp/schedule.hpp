#pragma once

#include <string>
#include <vector>

#include "uavmp/context.hpp"
#include "uavmp/genome.hpp"

namespace uavmp {

enum class SegmentKind { transit, wait, task };
enum class Phase { takeoff_climb, climb, cruise, descent, landing_descent, hold };

std::string_view to_string(SegmentKind k);
std::string_view to_string(Phase p);

/// Straight piece of a UAV timeline flown at constant speed and fuel rate.
/// Waits and zone/point work are stationary holds (from == to).
struct Segment {
    SegmentKind kind = SegmentKind::transit;
    Phase phase = Phase::cruise;
    GeoPoint from, to;
    double t0 = 0.0, t1 = 0.0;
    double fuel_rate_kgps = 0.0;
    double speed_mps = 0.0;
    double length_m = 0.0;
    int profile = 0; // ProfileKind
    std::size_t task = PlanningContext::npos;
    bool waypoint_at_end = false;

    double duration() const { return t1 - t0; }
    double fuel_kg() const { return fuel_rate_kgps * (t1 - t0); }
    GeoPoint at(double t) const;
};

struct UavPlan {
    std::size_t uav = 0;
    bool used = false;
    int gcs = -1;
    int return_profile = 0;
    std::vector<std::size_t> tasks; // performed in this order
    std::vector<Segment> segments;
    double departure_s = 0.0; // takeoff (original takeoff when already airborne)
    double landing_s = 0.0;
    double fuel_burned_kg = 0.0; // this plan only
    double distance_m = 0.0;     // this plan only
    double max_altitude_m = 0.0;
    double max_speed_mps = 0.0;
};

struct TaskRecord {
    std::string id;
    bool performed = false;
    bool frozen = false;
    std::vector<std::size_t> uavs;
    double departure_s = 0.0; // when the first assigned UAV leaves for the task
    double arrival_s = 0.0;   // when the last assigned UAV arrives
    double wait_s = 0.0;      // longest wait loiter among assigned UAVs
    double start_s = 0.0;
    double end_s = 0.0;
    int profile = 0;
    std::string sensor;
};

struct Schedule {
    std::vector<UavPlan> uavs;
    std::vector<TaskRecord> tasks; // indexed like PlanningContext::tasks()
    bool timing_converged = true;
};

/// Earliest-start decoding. Throws StructureError when the genome does not fit.
Schedule decode_schedule(const PlanningContext& ctx, const PlanGenome& g);

/// Position along a UAV's timeline; before the first segment it is the first point,
/// after the last one the final point.
GeoPoint position_at(const UavPlan& p, double t);
/// Fuel burned by the plan from its first segment up to time t.
double fuel_burned_until(const UavPlan& p, double t);
/// True while a segment other than a pre-departure one is in progress.
bool airborne_at(const UavPlan& p, double t);

} // namespace uavmp
