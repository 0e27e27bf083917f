#include "uavmp/genome.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>

namespace uavmp {

using nlohmann::json;

std::vector<std::vector<std::size_t>> uav_sequences(const PlanGenome& g, std::size_t n_uavs) {
    std::vector<std::vector<std::size_t>> seq(n_uavs);
    for (std::size_t i = 0; i < g.tasks.size(); ++i)
        for (int u : g.tasks[i].uavs)
            if (u >= 0 && static_cast<std::size_t>(u) < n_uavs) seq[u].push_back(i);
    for (auto& s : seq)
        std::stable_sort(s.begin(), s.end(), [&](std::size_t a, std::size_t b) {
            if (g.tasks[a].order != g.tasks[b].order) return g.tasks[a].order < g.tasks[b].order;
            return a < b;
        });
    return seq;
}

std::size_t gene_count(const PlanGenome& g) { return 4 * g.tasks.size() + 2 * g.uavs.size(); }

void check_structure(const PlanningContext& ctx, const PlanGenome& g) {
    const Mission& m = ctx.mission();
    if (g.tasks.size() != ctx.open_tasks().size())
        throw StructureError("genome has " + std::to_string(g.tasks.size()) + " task genes, expected " +
                             std::to_string(ctx.open_tasks().size()));
    if (g.uavs.size() != m.uavs.size())
        throw StructureError("genome has " + std::to_string(g.uavs.size()) + " UAV genes, expected " +
                             std::to_string(m.uavs.size()));
    for (std::size_t i = 0; i < g.tasks.size(); ++i) {
        const Task& t = ctx.tasks()[ctx.open_tasks()[i]];
        const TaskGene& tg = g.tasks[i];
        const std::string where = "task gene " + t.id;
        if (tg.uavs.empty() && t.mandatory) throw StructureError(where + ": mandatory task omitted");
        if (!t.multi_vehicle && tg.uavs.size() > 1) throw StructureError(where + ": single-vehicle task with several UAVs");
        if (tg.sensor < 0 || static_cast<std::size_t>(tg.sensor) >= t.sensors.size())
            throw StructureError(where + ": sensor index out of range");
        if (tg.profile < 0 || tg.profile >= kCruiseProfiles) throw StructureError(where + ": bad flight profile");
        for (std::size_t k = 0; k < tg.uavs.size(); ++k) {
            const int u = tg.uavs[k];
            if (u < 0 || static_cast<std::size_t>(u) >= m.uavs.size()) throw StructureError(where + ": UAV out of range");
            if (k > 0 && tg.uavs[k - 1] >= u) throw StructureError(where + ": UAV list not sorted and unique");
            if (!m.uavs[u].carries(t.sensors[tg.sensor]))
                throw StructureError(where + ": " + m.uavs[u].name + " does not carry " + t.sensors[tg.sensor]);
        }
        if (!std::isfinite(tg.order)) throw StructureError(where + ": order key not finite");
    }
    for (std::size_t u = 0; u < g.uavs.size(); ++u) {
        const UavGene& ug = g.uavs[u];
        const std::string where = "UAV gene " + m.uavs[u].name;
        if (m.gcss.empty() ? ug.gcs != -1 : (ug.gcs < 0 || static_cast<std::size_t>(ug.gcs) >= m.gcss.size()))
            throw StructureError(where + ": GCS out of range");
        if (ug.return_profile < 0 || ug.return_profile >= kCruiseProfiles)
            throw StructureError(where + ": bad return profile");
    }
}

namespace {

int pick(const std::vector<int>& v, Rng& rng) {
    std::uniform_int_distribution<std::size_t> d(0, v.size() - 1);
    return v[d(rng)];
}

bool allowed(const ProfileChoice& p, int k) { return std::find(p.allowed.begin(), p.allowed.end(), k) != p.allowed.end(); }

// Sensor indices of task t usable by every UAV in the set.
std::vector<int> common_sensors(const PlanningContext& ctx, std::size_t t, const std::vector<int>& uavs) {
    std::vector<int> out;
    const Task& task = ctx.tasks()[t];
    for (std::size_t s = 0; s < task.sensors.size(); ++s) {
        bool ok = true;
        for (int u : uavs) ok = ok && ctx.mission().uavs[u].carries(task.sensors[s]);
        if (ok) out.push_back(static_cast<int>(s));
    }
    return out;
}

} // namespace

PlanGenome random_genome(const PlanningContext& ctx, Rng& rng, const ProfileChoice& profiles) {
    PlanGenome g;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const Mission& m = ctx.mission();
    for (std::size_t t : ctx.open_tasks()) {
        const Task& task = ctx.tasks()[t];
        TaskGene tg;
        const auto& cap = ctx.capable_uavs(t);
        const bool omit = !task.mandatory && unit(rng) < 0.25;
        if (!cap.empty() && !omit) {
            tg.uavs.push_back(static_cast<int>(cap[std::uniform_int_distribution<std::size_t>(0, cap.size() - 1)(rng)]));
            if (task.multi_vehicle) {
                for (std::size_t u : cap)
                    if (static_cast<int>(u) != tg.uavs.front() && unit(rng) < 0.3) tg.uavs.push_back(static_cast<int>(u));
                std::sort(tg.uavs.begin(), tg.uavs.end());
            }
        }
        tg.order = unit(rng);
        tg.profile = pick(profiles.allowed, rng);
        tg.sensor = 0;
        g.tasks.push_back(std::move(tg));
    }
    for (std::size_t u = 0; u < m.uavs.size(); ++u) {
        UavGene ug;
        const auto& ok = ctx.compatible_gcss(u);
        if (!ok.empty())
            ug.gcs = static_cast<int>(ok[std::uniform_int_distribution<std::size_t>(0, ok.size() - 1)(rng)]);
        else if (!m.gcss.empty())
            ug.gcs = static_cast<int>(std::uniform_int_distribution<std::size_t>(0, m.gcss.size() - 1)(rng));
        ug.return_profile = pick(profiles.allowed, rng);
        g.uavs.push_back(ug);
    }
    repair(ctx, g, rng, profiles);
    return g;
}

void repair(const PlanningContext& ctx, PlanGenome& g, Rng& rng, const ProfileChoice& profiles) {
    const Mission& m = ctx.mission();
    g.tasks.resize(ctx.open_tasks().size());
    g.uavs.resize(m.uavs.size());
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    auto fix_task = [&](std::size_t i) {
        const std::size_t t = ctx.open_tasks()[i];
        const Task& task = ctx.tasks()[t];
        TaskGene& tg = g.tasks[i];
        const auto& cap = ctx.capable_uavs(t);
        std::vector<int> kept;
        for (int u : tg.uavs)
            if (std::find(cap.begin(), cap.end(), static_cast<std::size_t>(u)) != cap.end()) kept.push_back(u);
        std::sort(kept.begin(), kept.end());
        kept.erase(std::unique(kept.begin(), kept.end()), kept.end());
        if (!task.multi_vehicle && kept.size() > 1) kept = {kept[std::uniform_int_distribution<std::size_t>(0, kept.size() - 1)(rng)]};
        if (kept.empty() && !tg.uavs.empty() && !cap.empty())
            kept.push_back(static_cast<int>(cap[std::uniform_int_distribution<std::size_t>(0, cap.size() - 1)(rng)]));
        if (kept.empty() && task.mandatory && !cap.empty())
            kept.push_back(static_cast<int>(cap[std::uniform_int_distribution<std::size_t>(0, cap.size() - 1)(rng)]));
        // A multi-vehicle set must share one sensor; drop members until it does.
        while (kept.size() > 1 && common_sensors(ctx, t, kept).empty())
            kept.erase(kept.begin() + static_cast<long>(std::uniform_int_distribution<std::size_t>(0, kept.size() - 1)(rng)));
        tg.uavs = kept;
        if (!tg.uavs.empty()) {
            const auto ok = common_sensors(ctx, t, tg.uavs);
            if (std::find(ok.begin(), ok.end(), tg.sensor) == ok.end()) tg.sensor = ok.empty() ? 0 : ok.front();
        } else if (tg.sensor < 0 || static_cast<std::size_t>(tg.sensor) >= task.sensors.size()) {
            tg.sensor = 0;
        }
        if (!allowed(profiles, tg.profile)) tg.profile = pick(profiles.allowed, rng);
        if (!std::isfinite(tg.order)) tg.order = unit(rng);
    };
    for (std::size_t i = 0; i < g.tasks.size(); ++i) fix_task(i);

    // UAV relations between single-vehicle tasks: copy or avoid the partner's vehicle.
    for (const auto& d : ctx.dependencies()) {
        if (d.uav_relation == UavRelation::undefined) continue;
        std::vector<int> first_set;
        for (std::size_t t : d.first) {
            const std::size_t gi = ctx.gene_of(t);
            const auto& us = gi == PlanningContext::npos ? std::vector<int>{} : g.tasks[gi].uavs;
            if (gi == PlanningContext::npos && ctx.frozen(t))
                for (auto u : ctx.frozen(t)->uavs) first_set.push_back(static_cast<int>(u));
            first_set.insert(first_set.end(), us.begin(), us.end());
        }
        std::sort(first_set.begin(), first_set.end());
        first_set.erase(std::unique(first_set.begin(), first_set.end()), first_set.end());
        if (first_set.empty()) continue;
        for (std::size_t t : d.second) {
            const std::size_t gi = ctx.gene_of(t);
            if (gi == PlanningContext::npos || g.tasks[gi].uavs.empty()) continue;
            TaskGene& tg = g.tasks[gi];
            const auto& cap = ctx.capable_uavs(t);
            if (d.uav_relation == UavRelation::same) {
                if (tg.uavs == first_set) continue;
                bool all_capable = true;
                for (int u : first_set)
                    all_capable = all_capable && std::find(cap.begin(), cap.end(), static_cast<std::size_t>(u)) != cap.end();
                if (all_capable && (first_set.size() == 1 || ctx.tasks()[t].multi_vehicle) &&
                    !common_sensors(ctx, t, first_set).empty())
                    tg.uavs = first_set;
            } else {
                std::vector<int> rest;
                for (int u : tg.uavs)
                    if (!std::binary_search(first_set.begin(), first_set.end(), u)) rest.push_back(u);
                if (rest.empty()) {
                    std::vector<int> alt;
                    for (std::size_t u : cap)
                        if (!std::binary_search(first_set.begin(), first_set.end(), static_cast<int>(u)))
                            alt.push_back(static_cast<int>(u));
                    if (!alt.empty()) rest.push_back(pick(alt, rng));
                }
                if (!rest.empty()) tg.uavs = rest;
            }
            fix_task(gi);
        }
    }

    for (std::size_t u = 0; u < g.uavs.size(); ++u) {
        UavGene& ug = g.uavs[u];
        const auto& ok = ctx.compatible_gcss(u);
        if (m.gcss.empty()) {
            ug.gcs = -1;
        } else if (!ok.empty() && std::find(ok.begin(), ok.end(), static_cast<std::size_t>(std::max(ug.gcs, 0))) == ok.end()) {
            ug.gcs = static_cast<int>(ok[std::uniform_int_distribution<std::size_t>(0, ok.size() - 1)(rng)]);
        } else if (ug.gcs < 0 || static_cast<std::size_t>(ug.gcs) >= m.gcss.size()) {
            ug.gcs = 0;
        }
        if (!allowed(profiles, ug.return_profile)) ug.return_profile = pick(profiles.allowed, rng);
    }
}

json to_json(const PlanningContext& ctx, const PlanGenome& g) {
    const Mission& m = ctx.mission();
    json tasks = json::array();
    for (std::size_t i = 0; i < g.tasks.size() && i < ctx.open_tasks().size(); ++i) {
        const Task& t = ctx.tasks()[ctx.open_tasks()[i]];
        const TaskGene& tg = g.tasks[i];
        json us = json::array();
        for (int u : tg.uavs) us.push_back(m.uavs[u].name);
        tasks.push_back({{"task", t.id},
                         {"uavs", us},
                         {"order", tg.order},
                         {"profile", std::string(to_string(static_cast<ProfileKind>(tg.profile)))},
                         {"sensor", t.sensors.at(tg.sensor)}});
    }
    json uavs = json::array();
    for (std::size_t u = 0; u < g.uavs.size(); ++u)
        uavs.push_back({{"uav", m.uavs[u].name},
                        {"gcs", g.uavs[u].gcs >= 0 ? json(m.gcss[g.uavs[u].gcs].name) : json()},
                        {"returnProfile", std::string(to_string(static_cast<ProfileKind>(g.uavs[u].return_profile)))}});
    return {{"tasks", tasks}, {"uavs", uavs}};
}

PlanGenome genome_from_json(const PlanningContext& ctx, const json& j) {
    const Mission& m = ctx.mission();
    PlanGenome g;
    g.tasks.resize(ctx.open_tasks().size());
    g.uavs.resize(m.uavs.size());
    auto uav_index = [&](const std::string& n) {
        for (std::size_t u = 0; u < m.uavs.size(); ++u)
            if (m.uavs[u].name == n) return static_cast<int>(u);
        throw StructureError("unknown UAV '" + n + "' in genome");
    };
    auto profile = [](const json& v) {
        auto k = v.is_string() ? profile_from_string(v.get<std::string>()) : std::nullopt;
        if (!k || static_cast<int>(*k) >= kCruiseProfiles) throw StructureError("bad flight profile in genome");
        return static_cast<int>(*k);
    };
    if (!j.is_object()) throw StructureError("genome must be an object");
    try {
        for (const auto& tj : j.value("tasks", json::array())) {
            const std::size_t t = ctx.task_index(tj.at("task").get<std::string>());
            if (t == PlanningContext::npos || ctx.gene_of(t) == PlanningContext::npos) continue; // dropped or frozen
            TaskGene& tg = g.tasks[ctx.gene_of(t)];
            for (const auto& u : tj.at("uavs")) tg.uavs.push_back(uav_index(u.get<std::string>()));
            std::sort(tg.uavs.begin(), tg.uavs.end());
            tg.order = tj.at("order").get<double>();
            tg.profile = profile(tj.at("profile"));
            const auto& sensors = ctx.tasks()[t].sensors;
            const std::string s = tj.at("sensor").get<std::string>();
            auto it = std::find(sensors.begin(), sensors.end(), s);
            if (it == sensors.end()) throw StructureError("sensor '" + s + "' not usable for " + ctx.tasks()[t].id);
            tg.sensor = static_cast<int>(it - sensors.begin());
        }
        for (const auto& uj : j.value("uavs", json::array())) {
            const int u = uav_index(uj.at("uav").get<std::string>());
            UavGene& ug = g.uavs[u];
            ug.gcs = -1;
            if (uj.contains("gcs") && uj["gcs"].is_string()) {
                const std::string n = uj["gcs"].get<std::string>();
                for (std::size_t k = 0; k < m.gcss.size(); ++k)
                    if (m.gcss[k].name == n) ug.gcs = static_cast<int>(k);
                if (ug.gcs < 0) throw StructureError("unknown GCS '" + n + "' in genome");
            }
            ug.return_profile = profile(uj.at("returnProfile"));
        }
    } catch (const json::exception& e) {
        throw StructureError(std::string("malformed genome: ") + e.what());
    }
    return g;
}

std::string canonical_key(const PlanGenome& g) {
    std::string s;
    char buf[64];
    for (const auto& t : g.tasks) {
        s += '[';
        for (int u : t.uavs) s += std::to_string(u) + ',';
        std::snprintf(buf, sizeof buf, "|%.17g|%d|%d]", t.order, t.profile, t.sensor);
        s += buf;
    }
    for (const auto& u : g.uavs) s += "(" + std::to_string(u.gcs) + "," + std::to_string(u.return_profile) + ")";
    return s;
}

} // namespace uavmp
