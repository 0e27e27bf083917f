#include "uavmp/context.hpp"

#include <algorithm>
#include <filesystem>
#include <functional>

namespace uavmp {

std::vector<UavStart> initial_starts(const Mission& m) {
    std::vector<UavStart> out;
    for (const auto& u : m.uavs) {
        UavStart s;
        s.position = u.position;
        s.fuel_kg = u.fuel_kg;
        s.ready_s = u.availability ? std::max(0.0, u.availability->start_s) : 0.0;
        out.push_back(s);
    }
    return out;
}

std::shared_ptr<const geo::ElevationGrid> load_mission_grid(const Mission& m, const std::string& base_dir) {
    if (!m.elevation_file) return std::make_shared<const geo::ElevationGrid>(geo::flat_grid(m.bounds, m.arc_seconds, 0.0));
    std::filesystem::path p(*m.elevation_file);
    if (p.is_relative() && !base_dir.empty()) p = std::filesystem::path(base_dir) / p;
    auto g = std::make_shared<const geo::ElevationGrid>(geo::ElevationGrid::load(p.string()));
    const double cell = g->arc_seconds() / 3600.0;
    const Bounds& gb = g->bounds();
    const Bounds& mb = m.bounds;
    if (g->arc_seconds() != m.arc_seconds)
        throw ValidationError("/elevationFile", "grid resolution differs from arcSeconds");
    if (gb.lat0 > mb.lat0 + cell || gb.lon0 > mb.lon0 + cell || gb.lat1 < mb.lat1 - cell || gb.lon1 < mb.lon1 - cell)
        throw ValidationError("/elevationFile", "grid does not cover the mission bounds");
    return g;
}

PlanningContext::PlanningContext(Mission m, std::shared_ptr<const geo::ElevationGrid> grid, const Catalog& catalog)
    : mission_(std::move(m)), grid_(std::move(grid)) {
    starts_ = initial_starts(mission_);
    build(catalog);
}

PlanningContext::PlanningContext(Mission m, std::shared_ptr<const geo::ElevationGrid> grid,
                                 std::vector<UavStart> starts, std::vector<std::optional<FrozenTask>> frozen,
                                 double origin_s, const Catalog& catalog)
    : mission_(std::move(m)), grid_(std::move(grid)), frozen_(std::move(frozen)), starts_(std::move(starts)),
      origin_s_(origin_s), replanning_(true) {
    if (starts_.size() != mission_.uavs.size()) throw Error("snapshot does not match the mission's UAV list");
    build(catalog);
}

std::size_t PlanningContext::task_index(const std::string& id) const {
    for (std::size_t i = 0; i < tasks_.size(); ++i)
        if (tasks_[i].id == id) return i;
    return npos;
}

Leg PlanningContext::chain(const std::vector<GeoPoint>& anchors) const {
    Leg leg;
    for (const auto& a : anchors) {
        GeoPoint p{a.lat, a.lon, 0.0};
        if (leg.points.empty()) {
            leg.points.push_back(p);
            continue;
        }
        if (leg.points.back().same_latlon(p)) continue;
        const geo::Route r = router_->route(leg.points.back(), p);
        for (std::size_t i = 1; i < r.waypoints.size(); ++i) {
            GeoPoint w = r.waypoints[i];
            w.alt = 0.0;
            leg.points.push_back(w);
        }
    }
    for (std::size_t i = 1; i < leg.points.size(); ++i) leg.length_m += geo::distance_m(leg.points[i - 1], leg.points[i]);
    return leg;
}

void PlanningContext::build(const Catalog& catalog) {
    frame_ = geo::LocalFrame(GeoPoint{0.5 * (mission_.bounds.lat0 + mission_.bounds.lat1),
                                      0.5 * (mission_.bounds.lon0 + mission_.bounds.lon1), 0.0});
    router_ = std::make_unique<geo::RoutePlanner>(mission_.nfzs, geo::kDefaultNfzMarginM);
    Expansion e = expand_mission(mission_, catalog);
    tasks_ = std::move(e.tasks);
    const std::size_t T = tasks_.size();
    const std::size_t U = mission_.uavs.size();
    if (frozen_.empty()) frozen_.resize(T);
    if (frozen_.size() != T) throw Error("snapshot does not match the mission's task list");

    gene_of_.assign(T, npos);
    for (std::size_t t = 0; t < T; ++t) {
        if (frozen_[t]) continue;
        gene_of_[t] = open_.size();
        open_.push_back(t);
    }

    auto objective_tasks = [&](const std::string& name) {
        std::vector<std::size_t> out;
        for (std::size_t t = 0; t < T; ++t)
            if (mission_.objectives[tasks_[t].objective].name == name) out.push_back(t);
        return out;
    };
    for (const auto& d : mission_.dependencies) {
        deps_.push_back({objective_tasks(d.first), objective_tasks(d.second), d.relation, d.uav_relation, d.offset_s,
                         d.first + " " + std::string(to_string(d.relation)) + " " + d.second});
    }
    for (const auto& d : e.dependencies) {
        deps_.push_back({{task_index(d.first)}, {task_index(d.second)}, d.relation, d.uav_relation, d.offset_s,
                         d.first + " " + std::string(to_string(d.relation)) + " " + d.second});
    }

    capable_.assign(T, {});
    for (std::size_t t = 0; t < T; ++t)
        for (std::size_t u = 0; u < U; ++u)
            for (const auto& s : tasks_[t].sensors)
                if (mission_.uavs[u].carries(s)) {
                    capable_[t].push_back(u);
                    break;
                }
    gcs_ok_.assign(U, {});
    for (std::size_t u = 0; u < U; ++u)
        for (std::size_t g = 0; g < mission_.gcss.size(); ++g)
            if (mission_.gcss[g].controls(mission_.uavs[u].vtype.name)) gcs_ok_[u].push_back(g);

    // Anchor chains. Any NoPathError here means the mission cannot be flown at all.
    std::vector<std::vector<GeoPoint>> from(U + T), to(T + U);
    for (std::size_t u = 0; u < U; ++u) {
        const Uav& uav = mission_.uavs[u];
        const UavStart& s = starts_[u];
        from[u].push_back(s.position);
        if (s.airborne) {
            if (s.via) from[u].push_back(*s.via);
        } else if (uav.departure_runway_end && s.position.same_latlon(uav.position)) {
            from[u].push_back(*uav.departure_runway_end);
        }
        if (uav.landing_track_start) to[T + u].push_back(*uav.landing_track_start);
        to[T + u].push_back(uav.home());
    }
    tracks_.resize(T);
    try {
        for (std::size_t t = 0; t < T; ++t) {
            const Objective& o = mission_.objectives[tasks_[t].objective];
            switch (o.kind) {
            case GeometryKind::zone:
                if (o.entry) to[t].push_back(*o.entry);
                to[t].push_back(o.work_point());
                from[U + t].push_back(o.work_point());
                if (o.exit) from[U + t].push_back(*o.exit);
                tracks_[t] = chain({o.work_point()});
                break;
            case GeometryKind::path:
                to[t].push_back(o.path.front());
                from[U + t].push_back(o.path.back());
                tracks_[t] = chain(o.path);
                break;
            case GeometryKind::point:
                to[t].push_back(o.point);
                from[U + t].push_back(o.point);
                tracks_[t] = chain({o.point});
                break;
            }
        }
        legs_.resize((U + T) * (T + U));
        for (std::size_t f = 0; f < U + T; ++f) {
            for (std::size_t k = 0; k < T + U; ++k) {
                if (f >= U && k < T && f - U == k) continue; // task to itself never happens
                std::vector<GeoPoint> anchors = from[f];
                anchors.insert(anchors.end(), to[k].begin(), to[k].end());
                legs_[f * (T + U) + k] = chain(anchors);
            }
        }
        for (const auto& legs : {std::cref(legs_), std::cref(tracks_)})
            for (const Leg& leg : legs.get())
                for (const auto& pt : leg.points)
                    if (!grid_->contains(pt))
                        throw ValidationError("/nfzs", "a route around the no-fly zones leaves the elevation grid");
    } catch (const NoPathError& ex) {
        throw ValidationError("/nfzs", std::string("no route between mission anchors: ") + ex.what());
    }
}

const Leg& PlanningContext::leg_from_start(std::size_t uav, std::size_t task) const {
    const std::size_t T = tasks_.size();
    return legs_[uav * (T + mission_.uavs.size()) + task];
}

const Leg& PlanningContext::leg_between(std::size_t a, std::size_t b) const {
    const std::size_t T = tasks_.size(), U = mission_.uavs.size();
    return legs_[(U + a) * (T + U) + b];
}

const Leg& PlanningContext::return_from_start(std::size_t uav) const {
    const std::size_t T = tasks_.size(), U = mission_.uavs.size();
    return legs_[uav * (T + U) + T + uav];
}

const Leg& PlanningContext::return_from_task(std::size_t a, std::size_t uav) const {
    const std::size_t T = tasks_.size(), U = mission_.uavs.size();
    return legs_[(U + a) * (T + U) + T + uav];
}

} // namespace uavmp
