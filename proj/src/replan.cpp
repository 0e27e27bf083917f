#include "uavmp/replan.hpp"

namespace uavmp {

Replanned replan_from(const SimState& live, const PlanningContext& running, const PlanGenome& running_genome,
                      std::shared_ptr<const geo::ElevationGrid> grid, SearchConfig cfg, const PlannerHooks& hooks) {
    cfg.mode = SearchMode::replan;
    cfg.validate();
    Replanned out;
    out.snapshot = snapshot_at(live, cfg.runtime_s);
    out.ctx = replan_context(out.snapshot, std::move(grid));
    const PlanGenome seed = carry_over(running, running_genome, *out.ctx);
    out.result = replan(*out.ctx, seed, cfg, hooks);
    return out;
}

} // namespace uavmp
