#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "uavmp/population.hpp"

namespace uavmp {

enum class SearchMode { plan, replan };

struct SearchConfig {
    int population = 64;
    int max_generations = 250;
    double runtime_s = 60.0;
    std::uint64_t seed = 1;
    double crossover_rate = 0.9;
    std::optional<double> mutation_rate; // default 1 / number of genes
    bool knee = true;
    SearchMode mode = SearchMode::plan;
    ProfileChoice profiles;
    std::size_t archive_limit = 200;

    static SearchConfig defaults(SearchMode mode);
    /// Throws Error describing the first invalid field.
    void validate() const;
};

struct Progress {
    int generation = 0;
    long evaluations = 0;
    int feasible = 0;     // in the current population
    int front_size = 0;   // feasible non-dominated archive
    double wall_s = 0.0;
};

struct PlannerHooks {
    const std::atomic<bool>* cancel = nullptr;
    std::function<void(const Progress&)> progress;
};

struct PlannerResult {
    std::vector<Evaluated> solutions; // knee-filtered front (whole front with knee off)
    std::vector<Evaluated> front;     // every feasible non-dominated plan found
    std::vector<std::pair<std::string, long>> histogram; // failing plans per reason code
    int generations = 0;
    long evaluations = 0;
    double wall_s = 0.0;
    SearchConfig config;
    bool canceled = false;
};

/// x dominates y (all objectives <=, one <).
bool dominates(const std::array<double, 8>& x, const std::array<double, 8>& y);

/// Fronts of a fast non-dominated sort, as index lists.
std::vector<std::vector<std::size_t>> nondominated_sort(const std::vector<std::array<double, 8>>& pts);

PlannerResult plan(const PlanningContext& ctx, const SearchConfig& cfg, const PlannerHooks& hooks = {});

/// Replanning run. `previous` must already be expressed over ctx's open tasks (see
/// carry_over); it is repaired and seeds the first population with mutants of it.
PlannerResult replan(const PlanningContext& ctx, const PlanGenome& previous, const SearchConfig& cfg,
                     const PlannerHooks& hooks = {});

/// Re-expresses a genome of one context over the open tasks of another, matching tasks
/// by id and vehicles/stations by name. New tasks come out unassigned.
PlanGenome carry_over(const PlanningContext& from, const PlanGenome& g, const PlanningContext& to);

} // namespace uavmp
