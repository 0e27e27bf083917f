#pragma once

#include <memory>

#include "uavmp/nsga2.hpp"
#include "uavmp/sim.hpp"

namespace uavmp {

struct Replanned {
    SimSnapshot snapshot;
    std::shared_ptr<const PlanningContext> ctx; // built from the snapshot
    PlannerResult result;
};

/// Replans a running mission. The state is projected cfg.runtime_s seconds ahead (the
/// time the search is allowed to take), the running plan is carried over to the open
/// tasks of that snapshot and seeds the search. The live state is not touched.
Replanned replan_from(const SimState& live, const PlanningContext& running, const PlanGenome& running_genome,
                      std::shared_ptr<const geo::ElevationGrid> grid, SearchConfig cfg,
                      const PlannerHooks& hooks = {});

} // namespace uavmp
