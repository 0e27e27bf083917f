// uavmp command line: validate, plan, replan, simulate, serve.
// Exit codes: 0 ok, 1 other failure, 2 invalid input, 3 no solution found.

#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "uavmp/app.hpp"
#include "uavmp/plan_io.hpp"
#include "uavmp/population.hpp"
#include "uavmp/replan.hpp"
#include "uavmp/server.hpp"
#include "uavmp/wire.hpp"

using namespace uavmp;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0, kFailed = 1, kInvalid = 2, kNoSolution = 3;

struct Usage : Error {
    using Error::Error;
};

std::string slurp(const std::string& path) {
    if (path == "-") {
        std::ostringstream ss;
        ss << std::cin.rdbuf();
        return ss.str();
    }
    std::ifstream f(path, std::ios::binary);
    if (!f) throw svc::IoError(path + ": cannot open");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

json read_json(const std::string& path) {
    json j = json::parse(slurp(path), nullptr, false);
    if (j.is_discarded()) throw ValidationError("", path + ": not valid JSON");
    return j;
}

void emit(const std::string& out, const std::string& text) {
    if (out.empty() || out == "-")
        std::cout << text << std::flush;
    else
        svc::atomic_write(out, text);
}

// Elevation files are referenced relative to the mission document; once the mission is
// embedded in other documents the reference has to be absolute.
void anchor_elevation(Mission& m, const fs::path& doc) {
    if (!m.elevation_file) return;
    fs::path p(*m.elevation_file);
    if (p.is_relative()) p = fs::absolute(doc.parent_path() / p);
    m.elevation_file = p.lexically_normal().string();
}

Mission load_mission(const std::string& path) {
    json j = read_json(path);
    Mission m = wire::mission_from_json(j);
    anchor_elevation(m, path == "-" ? fs::current_path() / "stdin" : fs::path(path));
    return m;
}

std::shared_ptr<const geo::ElevationGrid> grid_of(const Mission& m) { return load_mission_grid(m, ""); }

struct PlanRef {
    json response;
    std::size_t index = 0;
};

PlanRef load_plan(const std::string& ref) {
    PlanRef out;
    std::string path = ref;
    if (auto pos = ref.rfind('#'); pos != std::string::npos) {
        path = ref.substr(0, pos);
        const std::string idx = ref.substr(pos + 1);
        if (idx.empty() || idx.find_first_not_of("0123456789") != std::string::npos)
            throw Usage("--plan expects FILE#INDEX, got " + ref);
        out.index = std::stoul(idx);
    }
    out.response = read_json(path);
    if (!out.response.contains("mission") || !out.response.contains("solutions"))
        throw ValidationError("", path + ": not a plan response");
    if (out.response.at("mission").contains("elevationFile")) {
        fs::path p = out.response["mission"]["elevationFile"].get<std::string>();
        if (p.is_relative()) out.response["mission"]["elevationFile"] = (fs::absolute(path).parent_path() / p).string();
    }
    return out;
}

json summary(const json& response) {
    json s = {{"solutions", response["solutions"].size()},
              {"seed", response["seed"]},
              {"runtime", response["runtime"]},
              {"generations", response["generations"]},
              {"evaluations", response["evaluations"]},
              {"wallTime", response["wallTime"]},
              {"frontSize", response["frontSize"]}};
    if (response.contains("snapshotTime")) s["snapshotTime"] = response["snapshotTime"];
    if (response.contains("histogram")) s["histogram"] = response["histogram"];
    return s;
}

struct Options {
    std::string mission, profile, out, plan, inject, request, events, data_dir = ".", host = "127.0.0.1", planner_cmd;
    std::optional<double> runtime;
    double tick = 0.5, at = 0.0, speed = 1.0;
    std::optional<std::uint64_t> seed;
    std::optional<int> population;
    std::vector<std::string> profiles;
    std::size_t apply_index = 0;
    int port = 8080;
    bool headless = false;
};

SearchConfig config_for(const Options& o, SearchMode mode) {
    SearchConfig c = SearchConfig::defaults(mode);
    if (o.runtime) c.runtime_s = *o.runtime;
    if (o.seed) c.seed = *o.seed;
    if (o.population) c.population = *o.population;
    if (!o.profiles.empty()) {
        json p = {{"profiles", o.profiles}};
        c = io::config_from_json(p, c);
    }
    try {
        c.validate();
    } catch (const ValidationError&) {
        throw;
    } catch (const Error& e) {
        throw ValidationError("", e.what()); // bad flag values are usage errors
    }
    return c;
}

int cmd_validate(const Options& o) {
    Mission m = load_mission(o.mission);
    PlanningContext ctx(m, grid_of(m));
    json out = {{"valid", true},
                {"name", m.name},
                {"uavs", m.uavs.size()},
                {"objectives", m.objectives.size()},
                {"tasks", ctx.tasks().size()}};
    std::cout << out.dump() << "\n";
    return kOk;
}

int cmd_plan(const Options& o) {
    Mission m;
    SearchConfig cfg;
    if (!o.request.empty()) {
        // stdin/stdout planner protocol: {mission, config} in, plan response out
        json req = read_json(o.request);
        if (!req.is_object() || !req.contains("mission")) throw ValidationError("/mission", "required");
        m = wire::mission_from_json(req["mission"]);
        anchor_elevation(m, o.request == "-" ? fs::current_path() / "stdin" : fs::path(o.request));
        cfg = io::config_from_json(req.value("config", json::object()), SearchConfig::defaults(SearchMode::plan));
    } else {
        if (o.mission.empty()) throw Usage("plan needs --mission or --request");
        m = load_mission(o.mission);
        cfg = config_for(o, SearchMode::plan);
    }
    if (!o.profile.empty()) m.profile = wire::profile_from_json(read_json(o.profile), m.profile);
    PlanningContext ctx(m, grid_of(m));
    const PlannerResult r = plan(ctx, cfg);
    const json response = io::plan_response(ctx, r);
    if (o.out.empty() || o.request.size()) {
        emit(o.out, response.dump() + "\n");
    } else {
        emit(o.out, response.dump(1) + "\n");
        std::cout << summary(response).dump() << "\n";
    }
    return response["solutions"].empty() ? kNoSolution : kOk;
}

struct Loaded {
    std::shared_ptr<const geo::ElevationGrid> grid;
    std::shared_ptr<PlanningContext> ctx;
    Evaluated chosen;
};

Loaded load_run(const PlanRef& ref) {
    Loaded l;
    Mission m = wire::mission_from_json(ref.response["mission"]);
    l.grid = grid_of(m);
    l.ctx = std::make_shared<PlanningContext>(m, l.grid);
    l.chosen = evaluate_genome(*l.ctx, io::response_genome(*l.ctx, ref.response, ref.index));
    return l;
}

int cmd_simulate(const Options& o) {
    if (o.plan.empty()) throw Usage("simulate needs --plan FILE#INDEX");
    if (!(o.tick > 0.0)) throw Usage("--tick must be > 0");
    const PlanRef ref = load_plan(o.plan);
    Loaded l = load_run(ref);
    SimState s = start(l.ctx->mission(), l.chosen.schedule);
    if (o.headless) {
        run_to_end(s, o.tick);
        emit(o.out, to_jsonl(s.events));
        return kOk;
    }
    // Real-time run: events go out as they happen, --speed simulated seconds per second.
    std::size_t seen = 0;
    while (!s.terminal()) {
        tick(s, o.tick);
        for (; seen < s.events.size(); ++seen) std::cout << to_json(s.events[seen]).dump() << "\n" << std::flush;
        if (o.speed > 0.0) std::this_thread::sleep_for(std::chrono::duration<double>(o.tick / o.speed));
    }
    return kOk;
}

int cmd_replan(const Options& o) {
    if (o.plan.empty()) throw Usage("replan needs --plan FILE#INDEX");
    if (!(o.tick > 0.0)) throw Usage("--tick must be > 0");
    if (!(o.at >= 0.0)) throw Usage("--at must be >= 0");
    const PlanRef ref = load_plan(o.plan);
    Loaded l = load_run(ref);
    SimState s = start(l.ctx->mission(), l.chosen.schedule);
    while (s.clock < o.at - 1e-9) tick(s, std::min(o.tick, o.at - s.clock));

    if (!o.inject.empty()) {
        json objs = read_json(o.inject);
        if (objs.is_object()) objs = json::array({objs});
        for (const auto& j : objs) {
            Mission current = s.mission;
            for (const auto& x : s.injected) current.objectives.push_back(x);
            inject_objective(s, wire::objective_from_json(j, current));
        }
    }
    SearchConfig cfg = config_for(o, SearchMode::replan);
    const Replanned r = replan_from(s, *l.ctx, l.chosen.genome, l.grid, cfg);
    const json response = io::plan_response(*r.ctx, r.result, {r.snapshot.time, std::nullopt});
    if (!o.out.empty()) emit(o.out, response.dump(1) + "\n");
    json report = summary(response);
    if (response["solutions"].empty()) {
        std::cout << report.dump() << "\n";
        return kNoSolution;
    }
    if (o.apply_index >= response["solutions"].size()) throw Usage("--apply index out of range");
    const Evaluated next = evaluate_genome(*r.ctx, io::response_genome(*r.ctx, response, o.apply_index));
    apply_replacement(s, *r.ctx, next.schedule);
    run_to_end(s, o.tick);
    if (!o.events.empty()) emit(o.events, to_jsonl(s.events));
    json tasks = json::array();
    for (const auto& t : s.tasks)
        tasks.push_back({{"id", t.id}, {"status", std::string(to_string(t.status))}});
    report["applied"] = o.apply_index;
    report["endTime"] = s.clock;
    report["tasks"] = tasks;
    std::cout << report.dump() << "\n";
    return kOk;
}

svc::HttpServer* g_server = nullptr;

int cmd_serve(const Options& o) {
    svc::Store store(o.data_dir);
    svc::ServiceOptions so;
    so.data_dir = o.data_dir;
    so.planner_cmd = o.planner_cmd;
    so.tick_s = o.tick;
    svc::Service service(store, so);
    svc::HttpServer server(service);
    const int port = server.bind(o.host, o.port);
    if (port < 0) throw Error("cannot bind " + o.host + ":" + std::to_string(o.port));
    std::cerr << json({{"listening", o.host}, {"port", port}, {"data", fs::absolute(o.data_dir).string()}}).dump() << "\n";
    g_server = &server;
    std::signal(SIGINT, [](int) { if (g_server) g_server->stop(); });
    std::signal(SIGTERM, [](int) { if (g_server) g_server->stop(); });
    server.listen();
    g_server = nullptr;
    return kOk;
}

int fail(int code, const std::string& type, const std::string& message, const json& issues = json()) {
    json d = {{"error", type}, {"message", message}};
    if (!issues.is_null()) d["issues"] = issues;
    std::cerr << d.dump() << "\n";
    return code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"UAV mission planner"};
    app.require_subcommand(1);
    Options o;

    auto* validate = app.add_subcommand("validate", "Check a mission document");
    validate->add_option("--mission", o.mission, "Mission JSON file")->required();

    auto* planc = app.add_subcommand("plan", "Search for ranked mission plans");
    planc->add_option("--mission", o.mission, "Mission JSON file");
    planc->add_option("--request", o.request, "Planner request {mission, config}; - reads stdin");
    planc->add_option("--profile", o.profile, "Operator profile JSON overriding the mission's");
    planc->add_option("--runtime", o.runtime, "Search budget in seconds");
    planc->add_option("--seed", o.seed, "Random seed");
    planc->add_option("--population", o.population, "Population size");
    planc->add_option("--profiles", o.profiles, "Allowed cruise profiles");
    planc->add_option("--out", o.out, "Write the plan response here");

    auto* replanc = app.add_subcommand("replan", "Simulate, inject objectives, replan and switch over");
    replanc->add_option("--plan", o.plan, "FILE#INDEX of the plan being flown")->required();
    replanc->add_option("--inject", o.inject, "Objective or array of objectives to inject");
    replanc->add_option("--at", o.at, "Simulation time of the injection, seconds");
    replanc->add_option("--runtime", o.runtime, "Replanning budget; the snapshot is taken this far ahead");
    replanc->add_option("--seed", o.seed, "Random seed");
    replanc->add_option("--population", o.population, "Population size");
    replanc->add_option("--apply", o.apply_index, "Solution to switch to");
    replanc->add_option("--tick", o.tick, "Simulation step, seconds");
    replanc->add_option("--out", o.out, "Write the replan response here");
    replanc->add_option("--events", o.events, "Write the full event log here");

    auto* simc = app.add_subcommand("simulate", "Fly a plan and print the event log");
    simc->add_option("--plan", o.plan, "FILE#INDEX")->required();
    simc->add_option("--tick", o.tick, "Simulation step, seconds");
    simc->add_flag("--headless", o.headless, "Run as fast as possible and print the log at the end");
    simc->add_option("--speed", o.speed, "Simulated seconds per wall-clock second");
    simc->add_option("--out", o.out, "Write the event log here");

    auto* serve = app.add_subcommand("serve", "Run the HTTP service");
    serve->add_option("--port", o.port, "TCP port, 0 picks one");
    serve->add_option("--host", o.host, "Listen address");
    serve->add_option("--data", o.data_dir, "Data directory");
    serve->add_option("--tick", o.tick, "Simulation step, seconds");
    serve->add_option("--planner-cmd", o.planner_cmd, "External planner command (stdin request, stdout response)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail(kInvalid, "usage", e.what());
    }

    try {
        if (*validate) return cmd_validate(o);
        if (*planc) return cmd_plan(o);
        if (*replanc) return cmd_replan(o);
        if (*simc) return cmd_simulate(o);
        if (*serve) return cmd_serve(o);
    } catch (const ValidationError& e) {
        return fail(kInvalid, "validation_error", e.what(), wire::issues_json(e.issues()));
    } catch (const Usage& e) {
        return fail(kInvalid, "usage", e.what());
    } catch (const DriftError& e) {
        return fail(kFailed, "drift", e.what());
    } catch (const std::exception& e) {
        return fail(kFailed, "error", e.what());
    }
    return kFailed;
}
