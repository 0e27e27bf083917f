#include "uavmp/knee.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

#include "uavmp/errors.hpp"

namespace uavmp {

namespace {

struct KneeGeometry {
    std::vector<std::size_t> extremes;
    std::vector<double> dist;
};

// Solves A x = b in place with partial pivoting; nullopt when singular.
std::optional<std::vector<double>> solve(std::vector<std::vector<double>> A, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(A[r][c]) > std::abs(A[piv][c])) piv = r;
        if (std::abs(A[piv][c]) < 1e-12) return std::nullopt;
        std::swap(A[c], A[piv]);
        std::swap(b[c], b[piv]);
        for (std::size_t r = c + 1; r < n; ++r) {
            const double f = A[r][c] / A[c][c];
            for (std::size_t k = c; k < n; ++k) A[r][k] -= f * A[c][k];
            b[r] -= f * b[c];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t k = i + 1; k < n; ++k) s -= A[i][k] * x[k];
        x[i] = s / A[i][i];
    }
    return x;
}

KneeGeometry geometry(const std::vector<std::vector<double>>& front) {
    KneeGeometry kg;
    const std::size_t n = front.size();
    kg.dist.assign(n, 0.0);
    if (n == 0) return kg;
    const std::size_t dims = front.front().size();
    for (const auto& p : front)
        if (p.size() != dims) throw Error("knee_filter: points of different dimension");

    std::vector<std::size_t> active;
    std::vector<double> lo(dims), hi(dims);
    for (std::size_t d = 0; d < dims; ++d) {
        lo[d] = hi[d] = front[0][d];
        for (const auto& p : front) {
            lo[d] = std::min(lo[d], p[d]);
            hi[d] = std::max(hi[d], p[d]);
        }
        if (hi[d] - lo[d] > 1e-12 * std::max(1.0, std::abs(hi[d]))) active.push_back(d);
    }
    if (active.empty()) {
        kg.extremes.push_back(0);
        return kg;
    }
    const std::size_t k = active.size();
    std::vector<std::vector<double>> z(n, std::vector<double>(k));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < k; ++j) {
            const std::size_t d = active[j];
            z[i][j] = (front[i][d] - lo[d]) / (hi[d] - lo[d]);
        }

    // Extreme of objective j: its minimizer, ties broken by the smallest sum of the rest.
    for (std::size_t j = 0; j < k; ++j) {
        std::size_t best = 0;
        double best_rest = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double rest = std::accumulate(z[i].begin(), z[i].end(), 0.0) - z[i][j];
            if (i == 0 || z[i][j] < z[best][j] || (z[i][j] == z[best][j] && rest < best_rest)) {
                best = i;
                best_rest = rest;
            }
        }
        kg.extremes.push_back(best);
    }

    std::vector<double> normal(k, 1.0);
    double offset = 0.0;
    std::optional<std::vector<double>> w;
    {
        std::vector<std::vector<double>> A;
        for (std::size_t e : kg.extremes) A.push_back(z[e]);
        w = solve(A, std::vector<double>(k, 1.0));
    }
    if (w) {
        normal = *w;
        offset = 1.0;
    } else {
        for (std::size_t e : kg.extremes) offset += std::accumulate(z[e].begin(), z[e].end(), 0.0);
        offset /= static_cast<double>(kg.extremes.size());
    }
    const double norm = std::sqrt(std::inner_product(normal.begin(), normal.end(), normal.begin(), 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        const double dot = std::inner_product(normal.begin(), normal.end(), z[i].begin(), 0.0);
        kg.dist[i] = (offset - dot) / norm;
    }
    std::sort(kg.extremes.begin(), kg.extremes.end());
    kg.extremes.erase(std::unique(kg.extremes.begin(), kg.extremes.end()), kg.extremes.end());
    return kg;
}

} // namespace

std::vector<double> knee_distances(const std::vector<std::vector<double>>& front) { return geometry(front).dist; }

std::vector<std::size_t> knee_filter(const std::vector<std::vector<double>>& front) {
    if (front.empty()) return {};
    const KneeGeometry kg = geometry(front);
    const double mean = std::accumulate(kg.dist.begin(), kg.dist.end(), 0.0) / static_cast<double>(front.size());
    std::vector<std::size_t> keep = kg.extremes;
    for (std::size_t i = 0; i < front.size(); ++i)
        if (kg.dist[i] > mean + 1e-12) keep.push_back(i);
    std::sort(keep.begin(), keep.end());
    keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
    return keep;
}

} // namespace uavmp
