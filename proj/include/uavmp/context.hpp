#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "uavmp/geo.hpp"
#include "uavmp/mission.hpp"

namespace uavmp {

/// Where a vehicle stands when the planner takes over. A fresh plan starts every UAV
/// parked at its initial position; a replan starts from a simulation snapshot.
struct UavStart {
    GeoPoint position;
    double fuel_kg = 0.0;
    double ready_s = 0.0;
    bool airborne = false;
    std::optional<GeoPoint> via; // exit point still to be flown through (after a zone task)
    double elapsed_flight_s = 0.0;
    double elapsed_distance_m = 0.0;
    double burned_kg = 0.0;
    std::optional<double> departed_s; // original takeoff time when already airborne
};

/// A task whose execution is settled (done, or in progress at the snapshot).
struct FrozenTask {
    std::vector<std::size_t> uavs;
    double start_s = 0.0;
    double end_s = 0.0;
    std::string sensor;
    int profile = 0;
    bool done = false;
};

/// Dependency resolved to task indices. Objective-level dependencies cover every task
/// of each objective; the interval of a side is [min start, max end] of its tasks.
struct TaskDependency {
    std::vector<std::size_t> first;
    std::vector<std::size_t> second;
    AllenRelation relation = AllenRelation::before;
    UavRelation uav_relation = UavRelation::undefined;
    double offset_s = 0.0;
    std::string label;
};

/// 2-D polyline flown between two anchors; altitudes are assigned during decoding.
struct Leg {
    std::vector<GeoPoint> points;
    double length_m = 0.0;
};

/// Everything derived from a mission that decoding and evaluation need, computed once.
/// Immutable after construction and safe to share between threads.
class PlanningContext {
public:
    PlanningContext(Mission m, std::shared_ptr<const geo::ElevationGrid> grid,
                    const Catalog& catalog = Catalog::builtin());
    PlanningContext(Mission m, std::shared_ptr<const geo::ElevationGrid> grid, std::vector<UavStart> starts,
                    std::vector<std::optional<FrozenTask>> frozen, double origin_s,
                    const Catalog& catalog = Catalog::builtin());

    PlanningContext(const PlanningContext&) = delete;
    PlanningContext& operator=(const PlanningContext&) = delete;

    const Mission& mission() const { return mission_; }
    const geo::ElevationGrid& grid() const { return *grid_; }
    std::shared_ptr<const geo::ElevationGrid> grid_ptr() const { return grid_; }
    const geo::LocalFrame& frame() const { return frame_; }
    const geo::RoutePlanner& router() const { return *router_; }

    const std::vector<Task>& tasks() const { return tasks_; }
    std::size_t task_index(const std::string& id) const; // npos when unknown
    const std::vector<TaskDependency>& dependencies() const { return deps_; }

    /// Tasks decided by the genome, in gene order.
    const std::vector<std::size_t>& open_tasks() const { return open_; }
    /// Gene position of a task, or npos when frozen.
    std::size_t gene_of(std::size_t task) const { return gene_of_[task]; }
    const std::optional<FrozenTask>& frozen(std::size_t task) const { return frozen_[task]; }

    const std::vector<UavStart>& starts() const { return starts_; }
    double origin_s() const { return origin_s_; }
    bool replanning() const { return replanning_; }

    /// UAVs carrying at least one sensor usable for the task.
    const std::vector<std::size_t>& capable_uavs(std::size_t task) const { return capable_[task]; }
    /// GCSs able to control the UAV's vehicle type.
    const std::vector<std::size_t>& compatible_gcss(std::size_t uav) const { return gcs_ok_[uav]; }

    // Anchor graph: from a UAV start or a task end, to a task start or a UAV home.
    const Leg& leg_from_start(std::size_t uav, std::size_t task) const;
    const Leg& leg_between(std::size_t from_task, std::size_t to_task) const;
    const Leg& return_from_start(std::size_t uav) const;
    const Leg& return_from_task(std::size_t from_task, std::size_t uav) const;
    /// Vertices traversed while performing a path task (single point for zones and points).
    const Leg& task_track(std::size_t task) const { return tracks_[task]; }

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

private:
    void build(const Catalog& catalog);
    Leg chain(const std::vector<GeoPoint>& anchors) const;

    Mission mission_;
    std::shared_ptr<const geo::ElevationGrid> grid_;
    geo::LocalFrame frame_;
    std::unique_ptr<geo::RoutePlanner> router_;
    std::vector<Task> tasks_;
    std::vector<TaskDependency> deps_;
    std::vector<std::size_t> open_;
    std::vector<std::size_t> gene_of_;
    std::vector<std::optional<FrozenTask>> frozen_;
    std::vector<UavStart> starts_;
    double origin_s_ = 0.0;
    bool replanning_ = false;
    std::vector<std::vector<std::size_t>> capable_;
    std::vector<std::vector<std::size_t>> gcs_ok_;
    std::vector<Leg> legs_; // (U + T) x (T + U)
    std::vector<Leg> tracks_;
};

/// UAV starts for a fresh plan: parked at the initial position with the initial fuel.
std::vector<UavStart> initial_starts(const Mission& m);

/// Terrain for a mission: the referenced elevation file (relative paths resolved against
/// `base_dir`) or flat sea-level terrain when the mission names none.
std::shared_ptr<const geo::ElevationGrid> load_mission_grid(const Mission& m, const std::string& base_dir);

} // namespace uavmp
