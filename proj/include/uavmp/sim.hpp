#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "uavmp/schedule.hpp"

namespace uavmp {

enum class UavStatus { parked, enroute, loitering, performing, returning, landed };
enum class TaskStatus { pending, active, done, obsolete };

std::string_view to_string(UavStatus s);
std::string_view to_string(TaskStatus s);

struct SimEvent {
    double t = 0.0;
    std::string kind; // waypoint_passed, task_started, task_completed, plan_switched, objective_injected, fault
    std::string subject;
    std::string detail;

    bool operator==(const SimEvent&) const = default;
};

nlohmann::json to_json(const SimEvent& e);
/// One JSON object per line, in log order.
std::string to_jsonl(const std::vector<SimEvent>& events);

struct UavState {
    std::size_t uav = 0;
    GeoPoint position;
    double fuel_kg = 0.0;
    UavStatus status = UavStatus::parked;
    std::size_t segment = 0;   // current piece of the timeline
    double fraction = 0.0;     // progress through it
    std::size_t next_waypoint = 0;
    bool halted = false;       // ran out of fuel
};

struct TaskState {
    std::string id;
    TaskStatus status = TaskStatus::pending;
    bool assigned = true; // false for injected objectives not planned yet
    TaskRecord record;
};

struct SimState {
    Mission mission;
    std::vector<UavPlan> plans; // live timeline of every UAV, indexed like mission.uavs
    std::vector<UavState> uavs;
    std::vector<TaskState> tasks;
    std::vector<Objective> injected; // pending until a replacement plan covers them
    double clock = 0.0;
    std::vector<SimEvent> events;

    bool terminal() const;
    /// Time after which nothing changes any more.
    double horizon() const;
    const TaskState* task(std::string_view id) const;
};

/// Clock 0, every UAV parked at its initial position with its initial fuel, every task pending.
/// Throws Error when the schedule does not belong to the mission.
SimState start(const Mission& m, const Schedule& s);

/// Advances the clock by dt (> 0) along the timelines, integrating fuel and appending the
/// events that fall in (clock, clock + dt]. Event times are exact, not step-quantized.
void tick(SimState& s, double dt);

/// Ticks with a fixed step until the state is terminal.
void run_to_end(SimState& s, double dt);

/// Records an objective as pending and unassigned; the running plan is unchanged.
/// Throws ValidationError like mission validation does.
void inject_objective(SimState& s, const Objective& o);

struct SimSnapshot {
    double time = 0.0;
    Mission mission; // original objectives plus injected ones
    std::vector<UavStart> starts;
    std::vector<std::optional<FrozenTask>> frozen; // indexed like expand_mission(mission)
    std::vector<TaskState> tasks;                   // statuses at `time`
    std::vector<UavState> uavs;                     // projected vehicle states at `time`
};

/// Pure projection `delta` seconds ahead. Tasks finished by then are frozen as done;
/// tasks in progress stay with their vehicles, which become free when they end.
SimSnapshot snapshot_at(const SimState& s, double delta);

/// Planning context for replanning from a snapshot.
std::unique_ptr<PlanningContext> replan_context(const SimSnapshot& snap, std::shared_ptr<const geo::ElevationGrid> grid);

inline constexpr double kDriftPositionM = 50.0;
inline constexpr double kDriftFuelFrac = 0.01;

/// Switches to a plan computed from a snapshot. Advances the state to the snapshot time
/// first when needed. Throws DriftError when the live state no longer matches the starts
/// the plan was computed from, or when the snapshot is already in the past.
void apply_replacement(SimState& s, const PlanningContext& ctx, const Schedule& next);

} // namespace uavmp
