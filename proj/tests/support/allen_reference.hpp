#pragma once

#include <algorithm>
#include <vector>

#include "uavmp/temporal.hpp"

namespace uavmp::reference {

// Intervals as closed point sets, probed on a half-integer grid so that strict and
// non-strict endpoint orderings are told apart.
struct PointSet {
    std::vector<double> pts;
    PointSet(const Interval& i) {
        for (int k = 0; k <= 40; ++k) {
            const double x = k / 2.0;
            if (x >= i.start && x <= i.end) pts.push_back(x);
        }
    }
    bool has(double x) const { return std::find(pts.begin(), pts.end(), x) != pts.end(); }
    bool subset_of(const PointSet& o) const {
        return std::all_of(pts.begin(), pts.end(), [&](double x) { return o.has(x); });
    }
    std::vector<double> minus(const PointSet& o) const {
        std::vector<double> r;
        for (double x : pts)
            if (!o.has(x)) r.push_back(x);
        return r;
    }
    std::vector<double> common(const PointSet& o) const {
        std::vector<double> r;
        for (double x : pts)
            if (o.has(x)) r.push_back(x);
        return r;
    }
};

inline bool all_before(const PointSet& a, const PointSet& b) {
    for (double x : a.pts)
        for (double y : b.pts)
            if (x > y) return false;
    return true;
}

inline bool allen(AllenRelation r, const Interval& ia, const Interval& ib) {
    const PointSet a(ia), b(ib);
    const auto shared = a.common(b);
    switch (r) {
    case AllenRelation::before: return all_before(a, b);
    case AllenRelation::meets: return all_before(a, b) && shared.size() == 1;
    case AllenRelation::overlaps: {
        const auto only_a = a.minus(b), only_b = b.minus(a);
        if (only_a.empty() || only_b.empty() || shared.size() < 2) return false;
        return *std::max_element(only_a.begin(), only_a.end()) < b.pts.front() &&
               *std::min_element(only_b.begin(), only_b.end()) > a.pts.back();
    }
    case AllenRelation::starts: return a.subset_of(b) && !b.subset_of(a) && a.pts.front() == b.pts.front();
    case AllenRelation::during:
        return a.subset_of(b) && b.pts.front() < a.pts.front() && b.pts.back() > a.pts.back();
    case AllenRelation::finishes: return a.subset_of(b) && !b.subset_of(a) && a.pts.back() == b.pts.back();
    case AllenRelation::equals: return a.subset_of(b) && b.subset_of(a);
    }
    return false;
}

} // namespace uavmp::reference
