#include "uavmp/nsga2.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "uavmp/knee.hpp"

namespace uavmp {

SearchConfig SearchConfig::defaults(SearchMode mode) {
    SearchConfig c;
    c.mode = mode;
    c.runtime_s = mode == SearchMode::plan ? 60.0 : 120.0;
    return c;
}

void SearchConfig::validate() const {
    auto bad = [](const std::string& what) { throw Error("invalid search config: " + what); };
    if (population < 4 || population % 2 != 0) bad("population must be even and at least 4");
    if (max_generations < 0) bad("max generations must be >= 0");
    if (!(runtime_s > 0.0) || !std::isfinite(runtime_s)) bad("runtime limit must be > 0");
    if (!(crossover_rate >= 0.0 && crossover_rate <= 1.0)) bad("crossover rate must be in [0,1]");
    if (mutation_rate && !(*mutation_rate >= 0.0 && *mutation_rate <= 1.0)) bad("mutation rate must be in [0,1]");
    if (profiles.allowed.empty()) bad("no flight profile allowed");
    for (int p : profiles.allowed)
        if (p < 0 || p >= kCruiseProfiles) bad("profile choice must be min_consumption or max_speed");
    if (archive_limit < 1) bad("archive limit must be >= 1");
}

bool dominates(const std::array<double, 8>& x, const std::array<double, 8>& y) {
    bool strict = false;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] > y[i]) return false;
        if (x[i] < y[i]) strict = true;
    }
    return strict;
}

std::vector<std::vector<std::size_t>> nondominated_sort(const std::vector<std::array<double, 8>>& pts) {
    const std::size_t n = pts.size();
    std::vector<std::vector<std::size_t>> dominated(n);
    std::vector<int> count(n, 0);
    std::vector<std::vector<std::size_t>> fronts(1);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            if (dominates(pts[i], pts[j]))
                dominated[i].push_back(j);
            else if (dominates(pts[j], pts[i]))
                ++count[i];
        }
        if (count[i] == 0) fronts[0].push_back(i);
    }
    if (fronts[0].empty()) return {};
    for (std::size_t f = 0; !fronts[f].empty(); ++f) {
        std::vector<std::size_t> next;
        for (std::size_t i : fronts[f])
            for (std::size_t j : dominated[i])
                if (--count[j] == 0) next.push_back(j);
        std::sort(next.begin(), next.end());
        fronts.push_back(std::move(next));
    }
    fronts.pop_back();
    return fronts;
}

namespace {

using Clock = std::chrono::steady_clock;

std::vector<double> crowding(const std::vector<const std::array<double, 8>*>& pts) {
    const std::size_t n = pts.size();
    std::vector<double> d(n, 0.0);
    if (n <= 2) {
        std::fill(d.begin(), d.end(), std::numeric_limits<double>::infinity());
        return d;
    }
    std::vector<std::size_t> idx(n);
    for (std::size_t m = 0; m < 8; ++m) {
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return (*pts[a])[m] < (*pts[b])[m]; });
        const double lo = (*pts[idx.front()])[m], hi = (*pts[idx.back()])[m];
        d[idx.front()] = d[idx.back()] = std::numeric_limits<double>::infinity();
        if (hi - lo <= 0.0) continue;
        for (std::size_t k = 1; k + 1 < n; ++k)
            d[idx[k]] += ((*pts[idx[k + 1]])[m] - (*pts[idx[k - 1]])[m]) / (hi - lo);
    }
    return d;
}

struct Standing {
    bool feasible = false;
    int rank = 0;
    double crowd = 0.0;
    std::size_t violations = 0;
    double magnitude = 0.0;
};

bool better(const Standing& a, const Standing& b) {
    if (a.feasible != b.feasible) return a.feasible;
    if (!a.feasible) {
        if (a.violations != b.violations) return a.violations < b.violations;
        return a.magnitude < b.magnitude;
    }
    if (a.rank != b.rank) return a.rank < b.rank;
    return a.crowd > b.crowd;
}

bool infeasible_less(const Evaluated& a, const Evaluated& b) {
    if (a.check.violations.size() != b.check.violations.size())
        return a.check.violations.size() < b.check.violations.size();
    return a.check.total_magnitude() < b.check.total_magnitude();
}

// Survivor selection over the merged population; fills `standing` for the survivors.
std::vector<Evaluated> select_survivors(std::vector<Evaluated> all, std::size_t n, std::vector<Standing>& standing) {
    std::vector<std::size_t> feas, infeas;
    for (std::size_t i = 0; i < all.size(); ++i) (all[i].feasible() ? feas : infeas).push_back(i);
    std::vector<std::array<double, 8>> pts;
    for (std::size_t i : feas) pts.push_back(all[i].objectives);
    const auto fronts = nondominated_sort(pts);

    std::vector<std::size_t> chosen;
    standing.clear();
    for (std::size_t f = 0; f < fronts.size() && chosen.size() < n; ++f) {
        std::vector<const std::array<double, 8>*> fp;
        for (std::size_t k : fronts[f]) fp.push_back(&pts[k]);
        const auto cd = crowding(fp);
        std::vector<std::size_t> order(fronts[f].size());
        std::iota(order.begin(), order.end(), 0);
        if (chosen.size() + order.size() > n)
            std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return cd[a] > cd[b]; });
        for (std::size_t k : order) {
            if (chosen.size() >= n) break;
            chosen.push_back(feas[fronts[f][k]]);
            standing.push_back({true, static_cast<int>(f), cd[k], 0, 0.0});
        }
    }
    if (chosen.size() < n) {
        std::stable_sort(infeas.begin(), infeas.end(),
                         [&](std::size_t a, std::size_t b) { return infeasible_less(all[a], all[b]); });
        for (std::size_t i : infeas) {
            if (chosen.size() >= n) break;
            chosen.push_back(i);
            standing.push_back({false, 0, 0.0, all[i].check.violations.size(), all[i].check.total_magnitude()});
        }
    }
    std::vector<Evaluated> out;
    out.reserve(chosen.size());
    for (std::size_t i : chosen) out.push_back(std::move(all[i]));
    return out;
}

bool coin(Rng& rng, double p) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p; }

template <class T>
const T& pick(const std::vector<T>& v, Rng& rng) {
    return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
}

void mutate(const PlanningContext& ctx, PlanGenome& g, Rng& rng, double pm, const ProfileChoice& pc) {
    const std::size_t n = g.tasks.size();
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t t = ctx.open_tasks()[i];
        const Task& task = ctx.tasks()[t];
        const auto& cap = ctx.capable_uavs(t);
        TaskGene& tg = g.tasks[i];
        if (coin(rng, pm) && !cap.empty()) {
            if (tg.uavs.empty()) {
                tg.uavs = {static_cast<int>(pick(cap, rng))};
            } else if (!task.mandatory && coin(rng, 0.2)) {
                tg.uavs.clear();
            } else if (task.multi_vehicle && cap.size() > 1 && coin(rng, 0.5)) {
                const int u = static_cast<int>(pick(cap, rng));
                auto it = std::find(tg.uavs.begin(), tg.uavs.end(), u);
                if (it == tg.uavs.end())
                    tg.uavs.insert(std::upper_bound(tg.uavs.begin(), tg.uavs.end(), u), u);
                else if (tg.uavs.size() > 1)
                    tg.uavs.erase(it);
            } else {
                tg.uavs = {static_cast<int>(pick(cap, rng))};
            }
        }
        if (coin(rng, pm)) {
            if (n > 1) {
                std::size_t j = std::uniform_int_distribution<std::size_t>(0, n - 2)(rng);
                if (j >= i) ++j;
                std::swap(tg.order, g.tasks[j].order);
            } else {
                tg.order = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
            }
        }
        if (coin(rng, pm) && pc.allowed.size() > 1) tg.profile = pick(pc.allowed, rng);
        if (coin(rng, pm) && task.sensors.size() > 1)
            tg.sensor = std::uniform_int_distribution<int>(0, static_cast<int>(task.sensors.size()) - 1)(rng);
    }
    for (std::size_t u = 0; u < g.uavs.size(); ++u) {
        const auto& ok = ctx.compatible_gcss(u);
        if (coin(rng, pm) && !ok.empty()) g.uavs[u].gcs = static_cast<int>(pick(ok, rng));
        if (coin(rng, pm) && pc.allowed.size() > 1) g.uavs[u].return_profile = pick(pc.allowed, rng);
    }
}

void crossover(PlanGenome& a, PlanGenome& b, Rng& rng) {
    for (std::size_t i = 0; i < a.tasks.size(); ++i) {
        TaskGene& x = a.tasks[i];
        TaskGene& y = b.tasks[i];
        if (coin(rng, 0.5)) std::swap(x.uavs, y.uavs);
        if (coin(rng, 0.5)) std::swap(x.order, y.order);
        if (coin(rng, 0.5)) std::swap(x.profile, y.profile);
        if (coin(rng, 0.5)) std::swap(x.sensor, y.sensor);
    }
    for (std::size_t u = 0; u < a.uavs.size(); ++u) {
        if (coin(rng, 0.5)) std::swap(a.uavs[u].gcs, b.uavs[u].gcs);
        if (coin(rng, 0.5)) std::swap(a.uavs[u].return_profile, b.uavs[u].return_profile);
    }
}

bool same_point(const std::array<double, 8>& a, const std::array<double, 8>& b) {
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::abs(a[i] - b[i]) > 1e-9 * std::max({1.0, std::abs(a[i]), std::abs(b[i])})) return false;
    return true;
}

class Archive {
public:
    explicit Archive(std::size_t limit) : limit_(limit) {}

    void offer(const Evaluated& e) {
        if (!e.feasible()) return;
        for (const auto& a : items_)
            if (same_point(a.objectives, e.objectives) || dominates(a.objectives, e.objectives)) return;
        std::erase_if(items_, [&](const Evaluated& a) { return dominates(e.objectives, a.objectives); });
        items_.push_back(e);
        while (items_.size() > limit_) {
            std::vector<const std::array<double, 8>*> pts;
            for (const auto& a : items_) pts.push_back(&a.objectives);
            const auto cd = crowding(pts);
            const auto it = std::min_element(cd.begin(), cd.end());
            items_.erase(items_.begin() + (it - cd.begin()));
        }
    }

    std::vector<Evaluated> sorted() const {
        auto out = items_;
        std::sort(out.begin(), out.end(), [](const Evaluated& a, const Evaluated& b) {
            if (a.objectives != b.objectives) return a.objectives < b.objectives;
            return canonical_key(a.genome) < canonical_key(b.genome);
        });
        return out;
    }

    std::size_t size() const { return items_.size(); }

private:
    std::size_t limit_;
    std::vector<Evaluated> items_;
};

PlannerResult run(const PlanningContext& ctx, const SearchConfig& cfg, const PlannerHooks& hooks,
                  const PlanGenome* previous) {
    cfg.validate();
    const auto t0 = Clock::now();
    auto elapsed = [&] { return std::chrono::duration<double>(Clock::now() - t0).count(); };
    auto canceled = [&] { return hooks.cancel && hooks.cancel->load(); };

    Rng rng(cfg.seed);
    const std::size_t N = static_cast<std::size_t>(cfg.population);
    PlanGenome probe = random_genome(ctx, rng, cfg.profiles);
    const double pm = cfg.mutation_rate.value_or(1.0 / static_cast<double>(std::max<std::size_t>(1, gene_count(probe))));

    std::vector<PlanGenome> init;
    init.reserve(N);
    if (previous) {
        PlanGenome seed = *previous;
        repair(ctx, seed, rng, cfg.profiles);
        init.push_back(seed);
        const std::size_t mutants = N / 4;
        for (std::size_t k = 0; k < mutants; ++k) {
            PlanGenome m = seed;
            mutate(ctx, m, rng, std::max(4.0 * pm, 0.1), cfg.profiles);
            repair(ctx, m, rng, cfg.profiles);
            init.push_back(std::move(m));
        }
    } else {
        repair(ctx, probe, rng, cfg.profiles);
        init.push_back(std::move(probe));
    }
    while (init.size() < N) {
        PlanGenome g = random_genome(ctx, rng, cfg.profiles);
        repair(ctx, g, rng, cfg.profiles);
        init.push_back(std::move(g));
    }

    PlannerResult res;
    res.config = cfg;
    FailureCounter failures;
    Archive archive(cfg.archive_limit);
    auto absorb = [&](const std::vector<Evaluated>& batch) {
        for (const auto& e : batch) {
            if (e.feasible())
                archive.offer(e);
            else
                failures.add(e.check);
        }
        res.evaluations += static_cast<long>(batch.size());
    };

    std::vector<Evaluated> pop = evaluate_population(ctx, init);
    absorb(pop);
    std::vector<Standing> standing;
    pop = select_survivors(std::move(pop), N, standing);

    auto report = [&] {
        if (!hooks.progress) return;
        Progress p;
        p.generation = res.generations;
        p.evaluations = res.evaluations;
        for (const auto& s : standing) p.feasible += s.feasible ? 1 : 0;
        p.front_size = static_cast<int>(archive.size());
        p.wall_s = elapsed();
        hooks.progress(p);
    };
    report();

    while (res.generations < cfg.max_generations && elapsed() < cfg.runtime_s) {
        if (canceled()) {
            res.canceled = true;
            break;
        }
        std::vector<PlanGenome> kids;
        kids.reserve(N);
        auto tournament = [&]() -> const PlanGenome& {
            const std::size_t i = std::uniform_int_distribution<std::size_t>(0, pop.size() - 1)(rng);
            const std::size_t j = std::uniform_int_distribution<std::size_t>(0, pop.size() - 1)(rng);
            return better(standing[j], standing[i]) ? pop[j].genome : pop[i].genome;
        };
        while (kids.size() < N) {
            PlanGenome a = tournament();
            PlanGenome b = tournament();
            if (coin(rng, cfg.crossover_rate)) crossover(a, b, rng);
            mutate(ctx, a, rng, pm, cfg.profiles);
            mutate(ctx, b, rng, pm, cfg.profiles);
            repair(ctx, a, rng, cfg.profiles);
            repair(ctx, b, rng, cfg.profiles);
            kids.push_back(std::move(a));
            kids.push_back(std::move(b));
        }
        std::vector<Evaluated> off = evaluate_population(ctx, kids);
        absorb(off);
        for (auto& e : off) pop.push_back(std::move(e));
        pop = select_survivors(std::move(pop), N, standing);
        ++res.generations;
        report();
    }
    if (!res.canceled && canceled()) res.canceled = true;

    res.front = archive.sorted();
    if (cfg.knee && !res.front.empty()) {
        std::vector<std::vector<double>> pts;
        for (const auto& e : res.front) pts.emplace_back(e.objectives.begin(), e.objectives.end());
        for (std::size_t i : knee_filter(pts)) res.solutions.push_back(res.front[i]);
    } else {
        res.solutions = res.front;
    }
    res.histogram = failures.sorted();
    res.wall_s = elapsed();
    return res;
}

} // namespace

PlannerResult plan(const PlanningContext& ctx, const SearchConfig& cfg, const PlannerHooks& hooks) {
    return run(ctx, cfg, hooks, nullptr);
}

PlannerResult replan(const PlanningContext& ctx, const PlanGenome& previous, const SearchConfig& cfg,
                     const PlannerHooks& hooks) {
    if (previous.tasks.size() != ctx.open_tasks().size() || previous.uavs.size() != ctx.mission().uavs.size())
        throw StructureError("previous plan does not match the replanning context");
    return run(ctx, cfg, hooks, &previous);
}

PlanGenome carry_over(const PlanningContext& from, const PlanGenome& g, const PlanningContext& to) {
    return genome_from_json(to, to_json(from, g));
}

} // namespace uavmp
