#pragma once

// Plan-response documents: what the planner hands to the CLI, the HTTP service and any
// external client. Wire units as in missions (ft, NM, kg, seconds since mission start).

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "uavmp/dss.hpp"
#include "uavmp/nsga2.hpp"
#include "uavmp/sim.hpp"

namespace uavmp::io {

using nlohmann::json;

inline constexpr int kPlanSchema = 1;
inline constexpr double kDefaultFilterThreshold = 0.1;

/// VIKOR ranking of a result's solutions followed by the similarity filter.
std::vector<RankedPlan> rank_solutions(const PlanningContext& ctx, const std::vector<Evaluated>& solutions,
                                       double threshold = kDefaultFilterThreshold);

json config_json(const SearchConfig& c);
/// Reads overrides from `j` on top of `base`. Throws ValidationError.
SearchConfig config_from_json(const json& j, const SearchConfig& base);

json task_rows(const PlanningContext& ctx, const Schedule& s);
json uav_blocks(const PlanningContext& ctx, const Schedule& s, const EvaluationReport& r);
json routes(const Schedule& s, const Mission& m);
json altitude_profiles(const PlanningContext& ctx, const Schedule& s, double step_m = 250.0);
json solution_json(const PlanningContext& ctx, const Evaluated& e, const RankedPlan& rank);
json histogram_json(const std::vector<std::pair<std::string, long>>& h);

struct ResponseExtras {
    std::optional<double> snapshot_time;
    std::optional<std::string> run_id;
};

/// Full response: ranked solutions (or the failure histogram when there are none),
/// search statistics, the echoed configuration and the mission document.
json plan_response(const PlanningContext& ctx, const PlannerResult& r, const ResponseExtras& extras = {});

/// Genome of solution `index` in a response, decoded against ctx.
PlanGenome response_genome(const PlanningContext& ctx, const json& response, std::size_t index);

json uav_state_json(const SimState& s, const UavState& u);
/// Telemetry frame: clock, vehicles and task statuses.
json telemetry_json(const SimState& s);
json snapshot_json(const SimSnapshot& snap);

/// Planner request used by the stdin/stdout planner protocol: {mission, config}.
json plan_request(const Mission& m, const SearchConfig& c);

} // namespace uavmp::io
