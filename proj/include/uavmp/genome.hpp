#pragma once

#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "uavmp/context.hpp"

namespace uavmp {

struct TaskGene {
    std::vector<int> uavs; // empty = omitted; sorted, unique
    double order = 0.0;    // sequence key within each assigned UAV
    int profile = 0;       // cruise profile of the leg flown to this task
    int sensor = 0;        // index into the task's sensor list

    bool operator==(const TaskGene&) const = default;
};

struct UavGene {
    int gcs = -1;           // controlling station, -1 when the mission has none
    int return_profile = 0; // cruise profile of the return leg

    bool operator==(const UavGene&) const = default;
};

/// Decision variables for the open tasks of a planning context, in gene order.
struct PlanGenome {
    std::vector<TaskGene> tasks;
    std::vector<UavGene> uavs;

    bool operator==(const PlanGenome&) const = default;
};

using Rng = std::mt19937_64;

/// Cruise profiles the search may choose from (subset of min_consumption / max_speed).
struct ProfileChoice {
    std::vector<int> allowed{0, 1};
};

/// Per-UAV task order implied by a genome: sorted by (order key, gene index).
std::vector<std::vector<std::size_t>> uav_sequences(const PlanGenome& g, std::size_t n_uavs);

/// Throws StructureError naming the first gene that does not fit the context.
void check_structure(const PlanningContext& ctx, const PlanGenome& g);

PlanGenome random_genome(const PlanningContext& ctx, Rng& rng, const ProfileChoice& profiles = {});

/// Makes a genome structurally valid: capable UAVs, carried sensors, controllable GCSs,
/// mandatory tasks assigned, UAV-relation dependencies honored where possible.
void repair(const PlanningContext& ctx, PlanGenome& g, Rng& rng, const ProfileChoice& profiles = {});

/// Number of decision variables (used for the default mutation rate).
std::size_t gene_count(const PlanGenome& g);

/// Genome with UAV, GCS and sensor names, keyed by task id.
nlohmann::json to_json(const PlanningContext& ctx, const PlanGenome& g);
/// Inverse of to_json. Tasks missing from the document become unassigned genes;
/// unknown names raise StructureError.
PlanGenome genome_from_json(const PlanningContext& ctx, const nlohmann::json& j);

/// Stable textual identity of a genome, used for tie-breaking and de-duplication.
std::string canonical_key(const PlanGenome& g);

} // namespace uavmp
