#include "uavmp/population.hpp"

#include <exception>

#ifdef UAVMP_HAVE_OPENMP
#include <omp.h>
#endif

namespace uavmp {

Evaluated evaluate_genome(const PlanningContext& ctx, PlanGenome g) {
    Evaluated e;
    e.schedule = decode_schedule(ctx, g);
    e.genome = std::move(g);
    e.report = evaluate(ctx, e.schedule);
    e.check = check(ctx, e.schedule, e.report);
    e.objectives = e.report.objectives();
    return e;
}

std::vector<Evaluated> evaluate_population_serial(const PlanningContext& ctx, const std::vector<PlanGenome>& pop) {
    std::vector<Evaluated> out;
    out.reserve(pop.size());
    for (const auto& g : pop) out.push_back(evaluate_genome(ctx, g));
    return out;
}

std::vector<Evaluated> evaluate_population(const PlanningContext& ctx, const std::vector<PlanGenome>& pop) {
#ifdef UAVMP_HAVE_OPENMP
    std::vector<Evaluated> out(pop.size());
    std::exception_ptr err;
    const long n = static_cast<long>(pop.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (long i = 0; i < n; ++i) {
        try {
            out[i] = evaluate_genome(ctx, pop[i]);
        } catch (...) {
#pragma omp critical(uavmp_eval_error)
            if (!err) err = std::current_exception();
        }
    }
    if (err) std::rethrow_exception(err);
    return out;
#else
    return evaluate_population_serial(ctx, pop);
#endif
}

int evaluation_threads() {
#ifdef UAVMP_HAVE_OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

} // namespace uavmp
