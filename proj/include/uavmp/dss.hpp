#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "uavmp/genome.hpp"
#include "uavmp/mission.hpp"

namespace uavmp {

inline constexpr std::size_t kCriteria = 12;
/// Column orientation of the criteria matrix: only the number of tasks is maximized.
inline constexpr std::array<bool, kCriteria> kMaximized{false, false, false, false, false, false,
                                                         false, false, false, false, true,  false};

/// Importance levels 1..5 normalized to sum 1, in kRankingVariables order.
std::array<double, kCriteria> weights_from_profile(const OperatorProfile& p);

struct RankedPlan {
    std::size_t index = 0; // row of the criteria matrix
    double S = 0.0;        // group utility (weighted Manhattan)
    double R = 0.0;        // individual regret (weighted Chebyshev)
    double Q = 0.0;
    int rank = 0; // 1-based
    bool in_compromise_set = false;
};

/// VIKOR ranking. Rows are solutions; `maximize` flags columns where larger is better.
/// Ties on Q fall back to S, then R, then `tie_keys` (when given), then row order.
/// Returned in rank order. Throws Error on dimension mismatch or an empty matrix.
std::vector<RankedPlan> vikor_rank(const std::vector<std::vector<double>>& rows, const std::vector<double>& weights,
                                   const std::vector<bool>& maximize, double v = 0.5,
                                   const std::vector<std::string>* tie_keys = nullptr);

struct DistanceWeights {
    double assignment = 8.0;
    double order = 4.0;
    double gcs = 2.0;
    double sensor = 2.0;
    double profile = 1.0;
};

/// Weighted mean of per-class mismatch fractions, in [0,1]. Order compares each task's
/// position in its vehicle's sequence; profiles cover every task leg and return leg.
/// Throws StructureError when the genomes have different shapes.
double genome_distance(const PlanGenome& a, const PlanGenome& b, const DistanceWeights& w = {});

/// Greedy sweep in rank order: keeps a plan when it is at least `threshold` away from
/// every plan kept so far. Ranks are renumbered from 1. `genomes` is indexed by
/// RankedPlan::index.
std::vector<RankedPlan> filter_similar(const std::vector<RankedPlan>& ranked, const std::vector<PlanGenome>& genomes,
                                       double threshold = 0.1, const DistanceWeights& w = {});

} // namespace uavmp
