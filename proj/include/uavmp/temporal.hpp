#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "uavmp/evaluate.hpp"

namespace uavmp {

struct Interval {
    double start = 0.0;
    double end = 0.0;
};

/// Linear-inequality encoding of an Allen relation between intervals a (first) and
/// b (second). The offset tightens the first inequality of each relation.
bool allen_holds(AllenRelation r, const Interval& a, const Interval& b, double offset = 0.0);

/// How far a pair of intervals is from satisfying the relation, in seconds (0 when it holds).
double allen_shortfall(AllenRelation r, const Interval& a, const Interval& b, double offset = 0.0);

inline constexpr std::array<std::string_view, 17> kReasonCodes{
    "dependency", "time_window", "fuel_capacity", "flight_time", "range",        "altitude",
    "speed",      "gcs_capacity", "gcs_type",     "coverage_time", "los",        "availability",
    "cap_makespan", "cap_cost",   "cap_flight_time", "cap_fuel",   "cap_distance"};

struct Violation {
    std::string code;    // one of kReasonCodes
    std::string subject; // task, UAV, GCS or dependency label
    double measured = 0.0;
    double limit = 0.0;
    double magnitude = 0.0; // relative excess, > 0
};

struct CheckReport {
    std::vector<Violation> violations;

    bool valid() const { return violations.empty(); }
    double total_magnitude() const;
};

/// Evaluates every constraint family and reports all violations.
CheckReport check(const PlanningContext& ctx, const Schedule& s, const EvaluationReport& r);

/// UAV-relation part of a dependency against the assignment in a genome (frozen tasks
/// use their recorded vehicles).
std::optional<Violation> uav_relation_check(const PlanningContext& ctx, const TaskDependency& dep,
                                            const PlanGenome& g);
/// Same check against a decoded schedule.
std::optional<Violation> uav_relation_check(const TaskDependency& dep, const Schedule& s);

/// Number of reports failing each reason code, descending, ties by code name. Throws Error on
/// an empty report list.
std::vector<std::pair<std::string, long>> failure_histogram(const std::vector<CheckReport>& reports);

/// Histogram accumulator for streams of reports.
class FailureCounter {
public:
    void add(const CheckReport& r);
    void merge(const FailureCounter& o);
    std::vector<std::pair<std::string, long>> sorted() const;
    long reports() const { return reports_; }

private:
    std::vector<std::pair<std::string, long>> counts_;
    long reports_ = 0;
};

} // namespace uavmp
