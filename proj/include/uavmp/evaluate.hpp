#pragma once

#include <array>
#include <vector>

#include "uavmp/schedule.hpp"

namespace uavmp {

enum class RiskDirection {
    increasing, // value <= low -> 0 %, value >= high -> 100 %
    decreasing  // value <= low -> 100 %, value >= high -> 0 %
};

/// Piecewise-linear risk in percent. Throws Error unless low < high.
double risk_interp(double value, double low, double high, RiskDirection dir);

inline constexpr double kSampleStepS = 1.0;      // coverage and separation sampling
inline constexpr double kClearanceStepM = 100.0; // terrain sampling along legs
inline constexpr double kLosStepM = 60.0;        // terrain sampling along GCS sight lines
inline constexpr double kGcsMastM = 10.0;        // antenna height above the station's terrain

/// Performance block per UAV (also what the UAV table of a plan shows).
struct UavPerformance {
    std::size_t uav = 0;
    bool used = false;
    int gcs = -1;
    double departure_s = 0.0;
    double landing_s = 0.0;
    double flight_time_s = 0.0; // including time already flown before a replan
    double distance_m = 0.0;    // including distance already flown
    double fuel_burned_kg = 0.0;
    double fuel_usage_pct = 0.0;
    double cost = 0.0;
    double min_ground_clearance_m = 0.0;
    double out_of_coverage_s = 0.0;
    double los_blocked_s = 0.0; // during tasks that require line of sight
    double max_altitude_m = 0.0;
    double max_speed_mps = 0.0;
    double risk_fuel = 0.0;
    double risk_ground = 0.0;
    double risk_coverage = 0.0;
};

struct EvaluationReport {
    double makespan_s = 0.0;
    double cost = 0.0;
    double fuel_kg = 0.0;
    double flight_time_s = 0.0;
    double distance_m = 0.0;
    int n_uavs = 0;
    int n_tasks = 0;
    int n_gcss = 0;
    double risk_fuel = 0.0;
    double risk_ground = 0.0;
    double risk_coverage = 0.0;
    double risk_closeness = 0.0;
    double min_separation_m = 0.0; // infinity with fewer than two airborne UAVs
    std::vector<UavPerformance> uavs;

    /// The eight minimized search objectives (number of tasks negated).
    std::array<double, 8> objectives() const;
    /// The twelve ranking variables in kRankingVariables order.
    std::array<double, 12> criteria() const;
};

EvaluationReport evaluate(const PlanningContext& ctx, const Schedule& s);

/// Minimum 3-D distance between any two used UAVs over synchronized samples while both
/// are airborne. Infinity when no pair is ever airborne together.
double min_separation(const PlanningContext& ctx, const Schedule& s, double step_s = kSampleStepS);

/// Risk of closeness from min_separation; zero with fewer than two UAVs.
double closeness_risk(const PlanningContext& ctx, const Schedule& s, double step_s = kSampleStepS);

/// Lowest terrain clearance over a UAV's segments, excluding takeoff climb and landing
/// descent. Infinity when nothing is flown.
double min_ground_clearance(const geo::ElevationGrid& g, const UavPlan& p, double step_m = kClearanceStepM);

} // namespace uavmp
