#include "uavmp/dss.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace uavmp {

std::array<double, kCriteria> weights_from_profile(const OperatorProfile& p) {
    std::array<double, kCriteria> w{};
    double sum = 0.0;
    for (std::size_t j = 0; j < kCriteria; ++j) {
        const int level = static_cast<int>(p.importance[j]);
        if (level < 1 || level > 5) throw Error("importance of " + std::string(kRankingVariables[j]) + " out of range");
        w[j] = level;
        sum += level;
    }
    for (auto& x : w) x /= sum;
    return w;
}

std::vector<RankedPlan> vikor_rank(const std::vector<std::vector<double>>& rows, const std::vector<double>& weights,
                                   const std::vector<bool>& maximize, double v, const std::vector<std::string>* tie_keys) {
    const std::size_t n = rows.size();
    if (n == 0) throw Error("vikor_rank: no alternatives");
    const std::size_t m = weights.size();
    if (maximize.size() != m) throw Error("vikor_rank: orientation flags do not match the weights");
    for (const auto& r : rows)
        if (r.size() != m) throw Error("vikor_rank: row width does not match the weights");
    if (tie_keys && tie_keys->size() != n) throw Error("vikor_rank: tie keys do not match the rows");
    if (!(v >= 0.0 && v <= 1.0)) throw Error("vikor_rank: v must be in [0,1]");

    std::vector<RankedPlan> out(n);
    for (std::size_t j = 0; j < m; ++j) {
        double best = rows[0][j], worst = rows[0][j];
        for (const auto& r : rows) {
            if (!std::isfinite(r[j])) throw Error("vikor_rank: non-finite entry");
            best = maximize[j] ? std::max(best, r[j]) : std::min(best, r[j]);
            worst = maximize[j] ? std::min(worst, r[j]) : std::max(worst, r[j]);
        }
        for (std::size_t i = 0; i < n; ++i) {
            const double d = best == worst ? 0.0 : weights[j] * (rows[i][j] - best) / (worst - best);
            out[i].S += d;
            out[i].R = std::max(out[i].R, d);
        }
    }
    double s_lo = out[0].S, s_hi = out[0].S, r_lo = out[0].R, r_hi = out[0].R;
    for (const auto& p : out) {
        s_lo = std::min(s_lo, p.S);
        s_hi = std::max(s_hi, p.S);
        r_lo = std::min(r_lo, p.R);
        r_hi = std::max(r_hi, p.R);
    }
    for (std::size_t i = 0; i < n; ++i) {
        RankedPlan& p = out[i];
        p.index = i;
        const double qs = s_hi > s_lo ? (p.S - s_lo) / (s_hi - s_lo) : 0.0;
        const double qr = r_hi > r_lo ? (p.R - r_lo) / (r_hi - r_lo) : 0.0;
        p.Q = v * qs + (1.0 - v) * qr;
    }
    std::sort(out.begin(), out.end(), [&](const RankedPlan& a, const RankedPlan& b) {
        if (a.Q != b.Q) return a.Q < b.Q;
        if (a.S != b.S) return a.S < b.S;
        if (a.R != b.R) return a.R < b.R;
        if (tie_keys && (*tie_keys)[a.index] != (*tie_keys)[b.index]) return (*tie_keys)[a.index] < (*tie_keys)[b.index];
        return a.index < b.index;
    });
    for (std::size_t k = 0; k < n; ++k) out[k].rank = static_cast<int>(k) + 1;

    // Compromise set: acceptable advantage (C1) and acceptable stability (C2).
    out[0].in_compromise_set = true;
    if (n > 1) {
        const double dq = 1.0 / static_cast<double>(n - 1);
        const bool c1 = out[1].Q - out[0].Q >= dq - 1e-12;
        const bool c2 = out[0].S <= s_lo || out[0].R <= r_lo;
        if (c1 && !c2) {
            out[1].in_compromise_set = true;
        } else if (!c1) {
            for (std::size_t k = 1; k < n && out[k].Q - out[0].Q < dq - 1e-12; ++k) out[k].in_compromise_set = true;
        }
    }
    return out;
}

namespace {

std::vector<int> positions(const PlanGenome& g) {
    std::vector<int> pos(g.tasks.size(), -1);
    const auto seq = uav_sequences(g, g.uavs.size());
    for (std::size_t t = 0; t < g.tasks.size(); ++t) {
        if (g.tasks[t].uavs.empty()) continue;
        const auto& s = seq[g.tasks[t].uavs.front()];
        pos[t] = static_cast<int>(std::find(s.begin(), s.end(), t) - s.begin());
    }
    return pos;
}

} // namespace

double genome_distance(const PlanGenome& a, const PlanGenome& b, const DistanceWeights& w) {
    if (a.tasks.size() != b.tasks.size() || a.uavs.size() != b.uavs.size())
        throw StructureError("genome_distance: genomes of different missions");
    const std::size_t T = a.tasks.size(), U = a.uavs.size();
    auto frac = [](std::size_t k, std::size_t n) { return n ? static_cast<double>(k) / static_cast<double>(n) : 0.0; };
    std::size_t assign = 0, order = 0, sensor = 0, profile = 0, gcs = 0;
    const auto pa = positions(a), pb = positions(b);
    for (std::size_t t = 0; t < T; ++t) {
        assign += a.tasks[t].uavs != b.tasks[t].uavs;
        order += pa[t] != pb[t];
        sensor += a.tasks[t].sensor != b.tasks[t].sensor;
        profile += a.tasks[t].profile != b.tasks[t].profile;
    }
    for (std::size_t u = 0; u < U; ++u) {
        gcs += a.uavs[u].gcs != b.uavs[u].gcs;
        profile += a.uavs[u].return_profile != b.uavs[u].return_profile;
    }
    const double total = w.assignment + w.order + w.gcs + w.sensor + w.profile;
    return (w.assignment * frac(assign, T) + w.order * frac(order, T) + w.gcs * frac(gcs, U) +
            w.sensor * frac(sensor, T) + w.profile * frac(profile, T + U)) /
           total;
}

std::vector<RankedPlan> filter_similar(const std::vector<RankedPlan>& ranked, const std::vector<PlanGenome>& genomes,
                                       double threshold, const DistanceWeights& w) {
    std::vector<RankedPlan> kept;
    for (const RankedPlan& r : ranked) {
        const PlanGenome& g = genomes.at(r.index);
        bool distinct = true;
        for (const RankedPlan& k : kept)
            if (genome_distance(g, genomes.at(k.index), w) < threshold) {
                distinct = false;
                break;
            }
        if (distinct) kept.push_back(r);
    }
    for (std::size_t k = 0; k < kept.size(); ++k) kept[k].rank = static_cast<int>(k) + 1;
    return kept;
}

} // namespace uavmp
