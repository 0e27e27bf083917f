#pragma once

#include <array>
#include <vector>

#include "uavmp/temporal.hpp"

namespace uavmp {

/// A genome with everything derived from it.
struct Evaluated {
    PlanGenome genome;
    Schedule schedule;
    EvaluationReport report;
    CheckReport check;
    std::array<double, 8> objectives{};

    bool feasible() const { return check.valid(); }
};

Evaluated evaluate_genome(const PlanningContext& ctx, PlanGenome g);

/// Reference implementation, one genome after another.
std::vector<Evaluated> evaluate_population_serial(const PlanningContext& ctx, const std::vector<PlanGenome>& pop);

/// Same results as the serial version; spreads genomes over OpenMP threads when built
/// with OpenMP.
std::vector<Evaluated> evaluate_population(const PlanningContext& ctx, const std::vector<PlanGenome>& pop);

/// Number of worker threads evaluate_population will use.
int evaluation_threads();

} // namespace uavmp
