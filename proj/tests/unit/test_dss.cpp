#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "testing.hpp"
#include "uavmp/dss.hpp"

using namespace uavmp;
using nlohmann::json;

namespace {

std::vector<std::vector<double>> rows_of(const json& c) { return c["rows"].get<std::vector<std::vector<double>>>(); }

std::vector<std::size_t> order_of(const std::vector<RankedPlan>& r) {
    std::vector<std::size_t> o;
    for (const auto& p : r) o.push_back(p.index);
    return o;
}

const RankedPlan& by_index(const std::vector<RankedPlan>& r, std::size_t i) {
    return *std::find_if(r.begin(), r.end(), [&](const RankedPlan& p) { return p.index == i; });
}

// Two tasks, two vehicles.
PlanGenome small(int uav, double o0, double o1, int sensor, int profile, int gcs) {
    PlanGenome g;
    g.tasks = {TaskGene{{uav}, o0, profile, sensor}, TaskGene{{uav}, o1, profile, sensor}};
    g.uavs = {UavGene{gcs, profile}, UavGene{gcs, profile}};
    return g;
}

} // namespace

TEST_CASE("VIKOR matches the pinned cases") {
    const json cases = testing::oracle("vikor_cases.json")["cases"];
    REQUIRE(cases.size() == 2);
    for (const auto& c : cases) {
        INFO(c["name"].get<std::string>());
        const auto r = vikor_rank(rows_of(c), c["weights"].get<std::vector<double>>(), c["maximize"].get<std::vector<bool>>());
        CHECK(order_of(r) == c["order"].get<std::vector<std::size_t>>());
        for (std::size_t i = 0; i < c["S"].size(); ++i) {
            const RankedPlan& p = by_index(r, i);
            CHECK(std::abs(p.S - c["S"][i].get<double>()) <= 1e-9);
            CHECK(std::abs(p.R - c["R"][i].get<double>()) <= 1e-9);
            CHECK(std::abs(p.Q - c["Q"][i].get<double>()) <= 1e-9);
        }
        std::vector<std::size_t> comp;
        for (const auto& p : r)
            if (p.in_compromise_set) comp.push_back(p.index);
        std::sort(comp.begin(), comp.end());
        CHECK(comp == c["compromise"].get<std::vector<std::size_t>>());
        for (std::size_t k = 0; k < r.size(); ++k) CHECK(r[k].rank == static_cast<int>(k) + 1);
    }
}

TEST_CASE("VIKOR small cases and errors") {
    const auto one = vikor_rank({{1, 2, 3}}, {0.2, 0.3, 0.5}, {false, false, false});
    REQUIRE(one.size() == 1);
    CHECK(one[0].Q == 0.0);
    CHECK(one[0].rank == 1);
    CHECK(one[0].in_compromise_set);
    const auto two = vikor_rank({{5, 5, 5}, {4, 5, 1}}, {0.2, 0.3, 0.5}, {false, false, false});
    CHECK(two[0].index == 1);
    CHECK_THROWS_AS(vikor_rank({}, {}, {}), Error);
    CHECK_THROWS_AS(vikor_rank({{1, 2}}, {0.5, 0.3, 0.2}, {false, false, false}), Error);
    CHECK_THROWS_AS(vikor_rank({{1, 2, 3}, {1, 2}}, {0.5, 0.3, 0.2}, {false, false, false}), Error);
}

TEST_CASE("VIKOR is invariant to positive column rescaling and equivariant to row order") {
    Rng rng(31);
    std::uniform_real_distribution<double> u(0, 100), scale(0.01, 1000), shift(-500, 500);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + rng() % 9, m = 2 + rng() % 11;
        std::vector<std::vector<double>> rows(n, std::vector<double>(m));
        for (auto& r : rows)
            for (auto& x : r) x = u(rng);
        std::vector<double> w(m);
        for (auto& x : w) x = 0.1 + u(rng);
        const double sum = std::accumulate(w.begin(), w.end(), 0.0);
        for (auto& x : w) x /= sum;
        std::vector<bool> mx(m);
        for (std::size_t j = 0; j < m; ++j) mx[j] = rng() % 3 == 0;

        const auto base = vikor_rank(rows, w, mx);
        auto scaled = rows;
        for (std::size_t j = 0; j < m; ++j) {
            const double a = scale(rng), b = shift(rng);
            for (auto& r : scaled) r[j] = a * r[j] + b;
        }
        const auto again = vikor_rank(scaled, w, mx);
        CHECK(order_of(again) == order_of(base));
        for (std::size_t k = 0; k < base.size(); ++k) {
            CHECK(again[k].Q == doctest::Approx(base[k].Q).epsilon(1e-9));
            CHECK(again[k].in_compromise_set == base[k].in_compromise_set);
        }

        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        std::vector<std::vector<double>> shuffled(n);
        for (std::size_t i = 0; i < n; ++i) shuffled[i] = rows[perm[i]];
        const auto p = vikor_rank(shuffled, w, mx);
        for (std::size_t k = 0; k < n; ++k) {
            CHECK(perm[p[k].index] == base[k].index);
            CHECK(p[k].S == doctest::Approx(base[k].S).epsilon(1e-12));
        }
        for (const auto& r : base) {
            CHECK(r.Q >= -1e-12);
            CHECK(r.Q <= 1 + 1e-12);
        }
    }
}

TEST_CASE("weights from importance levels") {
    OperatorProfile p;
    for (double w : weights_from_profile(p)) CHECK(w == doctest::Approx(1.0 / 12));
    p.importance.fill(Importance::very_low);
    p.importance[3] = Importance::very_high;
    const auto w = weights_from_profile(p);
    CHECK(w[3] == doctest::Approx(5.0 / 16));
    CHECK(w[0] == doctest::Approx(1.0 / 16));

    const auto uc1 = weights_from_profile(testing::fixture_mission("usecase1.json").profile);
    const auto pinned = testing::oracle("vikor_cases.json")["uc1Weights"].get<std::vector<double>>();
    REQUIRE(pinned.size() == 12);
    for (std::size_t k = 0; k < 12; ++k) CHECK(uc1[k] == doctest::Approx(pinned[k]).epsilon(1e-12));
    CHECK(std::accumulate(uc1.begin(), uc1.end(), 0.0) == doctest::Approx(1.0));
}

TEST_CASE("genome distance") {
    const PlanGenome a = small(0, 0, 1, 0, 0, 0);
    CHECK(genome_distance(a, a) == 0.0);
    const PlanGenome b = small(1, 1, 0, 1, 1, 1);
    CHECK(genome_distance(a, b) == doctest::Approx(1.0));
    CHECK(genome_distance(b, a) == doctest::Approx(1.0));

    // one of four legs flown with another profile
    PlanGenome c = a;
    c.uavs[1].return_profile = 1;
    CHECK(genome_distance(a, c) == doctest::Approx(1.0 / 17 / 4).epsilon(1e-12));
    CHECK(genome_distance(a, c) == doctest::Approx(0.0147).epsilon(0.01));

    PlanGenome wrong = a;
    wrong.tasks.pop_back();
    CHECK_THROWS_AS(genome_distance(a, wrong), StructureError);

    // pseudometric on random genomes of the tiny mission
    auto ctx = testing::fixture_context("tiny.json");
    Rng rng(17);
    std::vector<PlanGenome> gs;
    for (int i = 0; i < 30; ++i) gs.push_back(random_genome(*ctx, rng));
    for (const auto& x : gs)
        for (const auto& y : gs) {
            const double d = genome_distance(x, y);
            CHECK(d >= 0.0);
            CHECK(d <= 1.0 + 1e-12);
            CHECK(d == doctest::Approx(genome_distance(y, x)));
            if (x == y) CHECK(d == 0.0);
            for (std::size_t k = 0; k < 5; ++k) CHECK(d <= genome_distance(x, gs[k]) + genome_distance(gs[k], y) + 1e-12);
        }
}

TEST_CASE("similarity filter") {
    const PlanGenome a = small(0, 0, 1, 0, 0, 0);
    PlanGenome profile_only = a;
    profile_only.tasks[0].profile = 1;
    const PlanGenome other = small(1, 1, 0, 1, 1, 1);
    const std::vector<PlanGenome> gs{a, a, profile_only, other};
    std::vector<RankedPlan> ranked;
    for (std::size_t i : {1, 0, 2, 3}) ranked.push_back(RankedPlan{i, 0, 0, 0, static_cast<int>(ranked.size()) + 1, false});

    const auto kept = filter_similar(ranked, gs);
    REQUIRE(kept.size() == 2);
    CHECK(kept[0].index == 1); // rank 1 always stays
    CHECK(kept[1].index == 3);
    CHECK(kept[0].rank == 1);
    CHECK(kept[1].rank == 2);

    // at threshold 0 even exact duplicates pass
    CHECK(filter_similar(ranked, gs, 0.0).size() == 4);
    CHECK(filter_similar({}, gs).empty());

    // properties over random rankings
    auto ctx = testing::fixture_context("tiny.json");
    Rng rng(23);
    for (int t = 0; t < 50; ++t) {
        std::vector<PlanGenome> pool;
        for (int i = 0; i < 12; ++i) pool.push_back(random_genome(*ctx, rng));
        pool.push_back(pool[rng() % pool.size()]);
        std::vector<std::size_t> idx(pool.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::shuffle(idx.begin(), idx.end(), rng);
        std::vector<RankedPlan> r;
        for (auto i : idx) r.push_back(RankedPlan{i, 0, 0, 0, static_cast<int>(r.size()) + 1, false});
        const auto f = filter_similar(r, pool, 0.1);
        REQUIRE(!f.empty());
        CHECK(f[0].index == r[0].index);
        // order preserved and pairwise distinct
        std::size_t pos = 0;
        for (const auto& k : f) {
            while (pos < r.size() && r[pos].index != k.index) ++pos;
            CHECK(pos < r.size());
        }
        for (std::size_t i = 0; i < f.size(); ++i)
            for (std::size_t j = i + 1; j < f.size(); ++j) CHECK(genome_distance(pool[f[i].index], pool[f[j].index]) >= 0.1);
    }
}
