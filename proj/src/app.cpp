#include "uavmp/app.hpp"

#include <cstdlib>
#include <random>

#include <sys/wait.h>

#include "uavmp/plan_io.hpp"
#include "uavmp/population.hpp"
#include "uavmp/replan.hpp"
#include "uavmp/wire.hpp"

namespace uavmp::svc {

std::string_view to_string(JobState s) {
    switch (s) {
    case JobState::queued: return "queued";
    case JobState::running: return "running";
    case JobState::done: return "done";
    case JobState::canceled: return "canceled";
    case JobState::failed: return "failed";
    }
    return "?";
}

std::optional<std::string> Subscription::next(std::chrono::milliseconds wait) {
    std::unique_lock lk(mu_);
    cv_.wait_for(lk, wait, [&] { return !queue_.empty() || closed_; });
    if (queue_.empty()) return std::nullopt;
    std::string s = std::move(queue_.front());
    queue_.pop_front();
    return s;
}

bool Subscription::closed() const {
    std::lock_guard lk(mu_);
    return closed_ && queue_.empty();
}

void Subscription::close() {
    {
        std::lock_guard lk(mu_);
        closed_ = true;
    }
    cv_.notify_all();
}

void Subscription::push(const std::string& line) {
    {
        std::lock_guard lk(mu_);
        if (closed_) return;
        queue_.push_back(line);
    }
    cv_.notify_all();
}

struct Service::Job {
    std::string id, mission, kind, run, session;
    SearchConfig cfg;
    std::atomic<bool> cancel{false};
    JobState state = JobState::queued; // guarded by Service::mu_
    Progress progress;
    std::string error;
    long solutions = -1;
    std::thread thread;
};

struct Service::Session {
    std::string id, mission, dir;
    mutable std::mutex mu;
    std::condition_variable cv;
    SimState state;
    std::shared_ptr<const geo::ElevationGrid> grid;
    std::shared_ptr<const PlanningContext> ctx; // context of the running plan
    PlanGenome genome;
    std::map<std::string, std::shared_ptr<const PlanningContext>> replans;
    std::optional<double> hold_at; // pending replan snapshot; pacing stops there
    json record;
    std::size_t flushed = 0;
    std::vector<std::string> lines;
    std::vector<std::shared_ptr<Subscription>> subs;
    double factor = 0.0;
    bool stop = false;
    std::thread pacer;
};

namespace {

std::uint64_t fresh_seed() {
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32 | rd()) & 0x7fffffffffffffffULL;
}

double number(const json& body, const char* key, std::optional<double> fallback = std::nullopt) {
    auto it = body.find(key);
    if (it == body.end() || it->is_null()) {
        if (fallback) return *fallback;
        throw ValidationError(std::string("/") + key, "required");
    }
    if (!it->is_number()) throw ValidationError(std::string("/") + key, "expected a number");
    return it->get<double>();
}

std::size_t index_of(const json& body, const char* key) {
    auto it = body.find(key);
    if (it == body.end() || it->is_null()) return 0;
    if (!it->is_number_integer() || it->get<long>() < 0)
        throw ValidationError(std::string("/") + key, "expected a non-negative integer");
    return it->get<std::size_t>();
}

std::string text(const json& body, const char* key) {
    auto it = body.find(key);
    if (it == body.end() || !it->is_string()) throw ValidationError(std::string("/") + key, "expected a string");
    return it->get<std::string>();
}

// Config keys in a request body, with the seed drawn when the client left it out.
SearchConfig request_config(const json& body, SearchMode mode) {
    if (!body.is_object()) throw ValidationError("", "expected an object");
    json c = body;
    c.erase("profileOverrides");
    c.erase("missionId");
    c.erase("mode");
    if (!c.contains("seed") || c["seed"].is_null()) c["seed"] = fresh_seed();
    return io::config_from_json(c, SearchConfig::defaults(mode));
}

} // namespace

Service::Service(Store& store, ServiceOptions opts) : store_(store), opts_(std::move(opts)) {
    if (!(opts_.tick_s > 0.0)) throw Error("tick must be > 0");
}

Service::~Service() {
    std::vector<std::shared_ptr<Job>> jobs;
    std::vector<std::shared_ptr<Session>> sessions;
    {
        std::lock_guard lk(mu_);
        for (auto& [_, j] : jobs_) jobs.push_back(j);
        for (auto& [_, s] : sessions_) sessions.push_back(s);
    }
    for (auto& j : jobs) j->cancel = true;
    for (auto& j : jobs)
        if (j->thread.joinable()) j->thread.join();
    for (auto& s : sessions) {
        {
            std::lock_guard lk(s->mu);
            s->stop = true;
            for (auto& sub : s->subs) sub->close();
        }
        s->cv.notify_all();
        if (s->pacer.joinable()) s->pacer.join();
    }
}

std::shared_ptr<const geo::ElevationGrid> Service::grid_for(const Mission& m) const {
    return load_mission_grid(m, opts_.data_dir.string());
}

// ---- missions

json Service::create_mission(const json& doc) {
    Mission m = wire::mission_from_json(doc);
    PlanningContext ctx(m, grid_for(m)); // routes around the NFZs must exist
    const json normalized = wire::to_json(m);
    const std::string id = store_.create_mission(normalized);
    return {{"id", id}, {"mission", normalized}};
}

json Service::put_mission(const std::string& id, const json& doc) {
    if (!store_.has_mission(id)) throw NotFound("no such mission: " + id);
    Mission m = wire::mission_from_json(doc);
    PlanningContext ctx(m, grid_for(m));
    const json normalized = wire::to_json(m);
    store_.put_mission(id, normalized);
    return {{"id", id}, {"mission", normalized}};
}

json Service::mission(const std::string& id) const { return {{"id", id}, {"mission", store_.mission(id)}}; }

json Service::missions() const {
    json out = json::array();
    for (const auto& id : store_.missions()) out.push_back({{"id", id}, {"name", store_.mission(id).value("name", "")}});
    return out;
}

// ---- jobs

std::shared_ptr<Service::Job> Service::new_job(const std::string& mission, const std::string& kind,
                                               const std::string& run, const SearchConfig& cfg) {
    auto j = std::make_shared<Job>();
    j->id = "j" + std::to_string(++job_counter_);
    j->mission = mission;
    j->kind = kind;
    j->run = run;
    j->cfg = cfg;
    jobs_[j->id] = j;
    active_[mission] = j->id;
    return j;
}

void Service::launch(const std::shared_ptr<Job>& job, std::function<json(const PlannerHooks&)> work) {
    job->thread = std::thread([this, job, work = std::move(work)] {
        {
            std::lock_guard lk(mu_);
            job->state = JobState::running;
        }
        PlannerHooks hooks;
        hooks.cancel = &job->cancel;
        hooks.progress = [this, job](const Progress& p) {
            std::lock_guard lk(mu_);
            job->progress = p;
        };
        JobState end = JobState::done;
        std::string error;
        long n = -1;
        try {
            json result = work(hooks);
            n = static_cast<long>(result.at("solutions").size());
            store_.put_result(job->mission, job->run, result);
            if (job->cancel || result.value("canceled", false)) end = JobState::canceled;
        } catch (const std::exception& e) {
            end = JobState::failed;
            error = e.what();
        }
        {
            std::lock_guard lk(mu_);
            job->state = end;
            job->error = error;
            job->solutions = n;
            if (active_[job->mission] == job->id) active_.erase(job->mission);
        }
        job_cv_.notify_all();
    });
}

json Service::job_json(const Job& j) const {
    json out = {{"id", j.id},
                {"kind", j.kind},
                {"missionId", j.mission},
                {"runId", j.run},
                {"state", std::string(to_string(j.state))},
                {"seed", j.cfg.seed},
                {"runtime", j.cfg.runtime_s},
                {"progress",
                 {{"generation", j.progress.generation},
                  {"evaluations", j.progress.evaluations},
                  {"feasible", j.progress.feasible},
                  {"frontSize", j.progress.front_size},
                  {"wallTime", j.progress.wall_s}}}};
    if (!j.session.empty()) out["sessionId"] = j.session;
    if (j.solutions >= 0) out["solutions"] = j.solutions;
    if (!j.error.empty()) out["error"] = j.error;
    return out;
}

json Service::submit_plan(const std::string& mission, const json& body) {
    Mission m = wire::mission_from_json(store_.mission(mission));
    SearchConfig cfg = request_config(body, SearchMode::plan);
    json overrides = body.value("profileOverrides", json());
    if (!overrides.is_null()) m.profile = wire::profile_from_json(overrides, m.profile);
    auto grid = grid_for(m);

    std::shared_ptr<Job> job;
    {
        std::lock_guard lk(mu_);
        if (active_.count(mission)) throw Conflict("a planner job is already running for " + mission + ": " + active_[mission]);
        json rec = {{"mode", "plan"}, {"config", io::config_json(cfg)}};
        if (!overrides.is_null()) rec["profileOverrides"] = overrides;
        const std::string run = store_.create_run(mission, rec);
        job = new_job(mission, "plan", run, cfg);
    }
    const fs::path dir = store_.mission_dir(mission) / "runs" / job->run;
    const std::string run = job->run;
    if (!opts_.planner_cmd.empty()) {
        launch(job, [this, m, cfg, dir, run](const PlannerHooks&) {
            json r = run_external(io::plan_request(m, cfg), dir);
            r["runId"] = run;
            return r;
        });
    } else {
        launch(job, [m, grid, cfg, run](const PlannerHooks& hooks) {
            PlanningContext ctx(m, grid);
            const PlannerResult r = plan(ctx, cfg, hooks);
            return io::plan_response(ctx, r, {std::nullopt, run});
        });
    }
    std::lock_guard lk(mu_);
    return job_json(*job);
}

std::shared_ptr<Service::Job> Service::find_job(const std::string& id) const {
    std::lock_guard lk(mu_);
    auto it = jobs_.find(id);
    if (it == jobs_.end()) throw NotFound("no such job: " + id);
    return it->second;
}

json Service::job(const std::string& id) const {
    auto j = find_job(id);
    std::lock_guard lk(mu_);
    return job_json(*j);
}

json Service::cancel_job(const std::string& id) {
    auto j = find_job(id);
    j->cancel = true;
    std::lock_guard lk(mu_);
    return job_json(*j);
}

json Service::wait_job(const std::string& id) {
    auto j = find_job(id);
    std::unique_lock lk(mu_);
    job_cv_.wait(lk, [&] { return j->state != JobState::queued && j->state != JobState::running; });
    return job_json(*j);
}

json Service::runs(const std::string& mission) const {
    json out = json::array();
    for (const auto& r : store_.runs(mission)) {
        json item = store_.run_config(mission, r);
        item["runId"] = r;
        item["finished"] = store_.has_result(mission, r);
        out.push_back(item);
    }
    return out;
}

json Service::plan_result(const std::string& mission, const std::string& run) const {
    if (!store_.has_result(mission, run)) throw NotFound("no result for run " + mission + "/" + run);
    return store_.result(mission, run);
}

json Service::run_external(const json& request, const fs::path& dir) const {
    const fs::path req = dir / "request.json", resp = dir / "response.json", err = dir / "planner.stderr";
    atomic_write(req, request.dump());
    auto quote = [](const fs::path& p) {
        std::string s = "'";
        for (char c : p.string()) s += c == '\'' ? std::string("'\\''") : std::string(1, c);
        return s + "'";
    };
    const std::string cmd = opts_.planner_cmd + " < " + quote(req) + " > " + quote(resp) + " 2> " + quote(err);
    const int status = std::system(cmd.c_str());
    const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    if (code != 0 && code != 3) {
        std::string msg = fs::exists(err) ? read_file(err) : std::string();
        if (msg.size() > 2000) msg = msg.substr(0, 2000);
        throw Error("external planner exited with status " + std::to_string(code) + ": " + msg);
    }
    try {
        return json::parse(read_file(resp));
    } catch (const json::parse_error& e) {
        throw Error(std::string("external planner wrote invalid JSON: ") + e.what());
    }
}

// ---- sessions

std::shared_ptr<Service::Session> Service::find_session(const std::string& id) const {
    std::lock_guard lk(mu_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) throw NotFound("no such session: " + id);
    return it->second;
}

void Service::flush(Session& s) {
    if (s.flushed >= s.state.events.size()) return;
    std::string chunk;
    for (std::size_t i = s.flushed; i < s.state.events.size(); ++i) {
        std::string line = to_json(s.state.events[i]).dump();
        chunk += line;
        chunk += '\n';
        for (auto& sub : s.subs) sub->push(line);
        s.lines.push_back(std::move(line));
    }
    s.flushed = s.state.events.size();
    std::erase_if(s.subs, [](const auto& sub) { return sub->closed(); });
    store_.append_events(s.mission, s.dir, chunk);
}

json Service::start_session(const json& body) {
    if (!body.is_object()) throw ValidationError("", "expected an object");
    const std::string mission = text(body, "missionId");
    const std::string run = text(body, "runId");
    const std::size_t index = index_of(body, "solutionIndex");
    const json result = plan_result(mission, run);
    if (result.value("mode", "plan") != "plan") throw BadRequest("sessions start from an initial plan, not a replan");

    auto s = std::make_shared<Session>();
    s->mission = mission;
    Mission m = wire::mission_from_json(result.at("mission"));
    s->grid = grid_for(m);
    auto ctx = std::make_shared<const PlanningContext>(m, s->grid);
    PlanGenome g;
    try {
        g = io::response_genome(*ctx, result, index);
    } catch (const StructureError& e) {
        throw BadRequest(e.what());
    } catch (const Error& e) {
        throw BadRequest(e.what());
    }
    Evaluated e = evaluate_genome(*ctx, g);
    s->state = start(m, e.schedule);
    s->ctx = ctx;
    s->genome = e.genome;
    s->record = {{"missionId", mission},
                 {"runId", run},
                 {"solutionIndex", index},
                 {"plans", json::array({{{"runId", run}, {"solutionIndex", index}, {"t", 0.0}}})}};
    s->dir = store_.create_session(mission, s->record);
    s->id = mission + "-" + s->dir;
    {
        std::lock_guard lk(mu_);
        sessions_[s->id] = s;
    }
    s->pacer = std::thread([this, s] { pace_loop(s); });
    return session(s->id);
}

void Service::pace_loop(std::shared_ptr<Session> s) {
    std::unique_lock lk(s->mu);
    while (!s->stop) {
        const bool held = s->hold_at && s->state.clock >= *s->hold_at - 1e-9;
        if (s->factor <= 0.0 || held || (s->state.terminal() && s->state.injected.empty())) {
            s->cv.wait(lk);
            continue;
        }
        double dt = opts_.tick_s;
        if (s->hold_at) dt = std::min(dt, *s->hold_at - s->state.clock);
        try {
            tick(s->state, dt);
            flush(*s);
        } catch (const std::exception&) {
            s->factor = 0.0; // a broken log write stops pacing; the state stays readable
        }
        const auto wait = std::chrono::duration<double>(dt / std::max(s->factor, 1e-9));
        s->cv.wait_for(lk, wait, [&] { return s->stop; });
    }
}

json Service::session(const std::string& id) const {
    auto s = find_session(id);
    std::lock_guard lk(s->mu);
    json out = {{"id", s->id},
                {"missionId", s->mission},
                {"record", s->record},
                {"pace", s->factor},
                {"telemetry", io::telemetry_json(s->state)}};
    out["holdAt"] = s->hold_at ? json(*s->hold_at) : json();
    return out;
}

json Service::pace(const std::string& id, const json& body) {
    auto s = find_session(id);
    const double f = number(body, "factor");
    if (!(f >= 0.0) || !std::isfinite(f)) throw ValidationError("/factor", "expected a finite number >= 0");
    {
        std::lock_guard lk(s->mu);
        s->factor = f;
    }
    s->cv.notify_all();
    return session(id);
}

json Service::advance(const std::string& id, double seconds) {
    if (!(seconds >= 0.0) || !std::isfinite(seconds)) throw ValidationError("/seconds", "expected a finite number >= 0");
    auto s = find_session(id);
    {
        std::lock_guard lk(s->mu);
        double target = s->state.clock + seconds;
        if (s->hold_at) target = std::min(target, std::max(s->state.clock, *s->hold_at));
        while (s->state.clock < target - 1e-9) tick(s->state, std::min(opts_.tick_s, target - s->state.clock));
        flush(*s);
    }
    return session(id);
}

json Service::snapshot(const std::string& id, double delta) const {
    if (!(delta >= 0.0) || !std::isfinite(delta)) throw ValidationError("/delta", "expected a finite number >= 0");
    auto s = find_session(id);
    SimState copy;
    {
        std::lock_guard lk(s->mu);
        copy = s->state;
    }
    return io::snapshot_json(snapshot_at(copy, delta));
}

json Service::inject(const std::string& id, const json& objective) {
    auto s = find_session(id);
    std::lock_guard lk(s->mu);
    Mission current = s->state.mission;
    for (const auto& o : s->state.injected) current.objectives.push_back(o);
    const Objective o = wire::objective_from_json(objective, current);
    inject_objective(s->state, o);
    flush(*s);
    return {{"sessionId", id}, {"objective", o.name}, {"t", s->state.clock}};
}

json Service::replan(const std::string& id, const json& body) {
    auto s = find_session(id);
    SearchConfig cfg = request_config(body, SearchMode::replan);
    if (!body.contains("runtime")) throw ValidationError("/runtime", "required");

    SimState copy;
    std::shared_ptr<const PlanningContext> ctx;
    PlanGenome genome;
    {
        std::lock_guard lk(s->mu);
        copy = s->state;
        ctx = s->ctx;
        genome = s->genome;
    }
    const double snapshot_time = copy.clock + cfg.runtime_s;

    std::shared_ptr<Job> job;
    {
        std::lock_guard lk(mu_);
        if (active_.count(s->mission))
            throw Conflict("a planner job is already running for " + s->mission + ": " + active_[s->mission]);
        const std::string run = store_.create_run(
            s->mission, {{"mode", "replan"}, {"sessionId", id}, {"snapshotTime", snapshot_time}, {"config", io::config_json(cfg)}});
        job = new_job(s->mission, "replan", run, cfg);
        job->session = id;
    }
    {
        std::lock_guard lk(s->mu);
        s->hold_at = snapshot_time;
    }
    const std::string run = job->run;
    auto grid = s->grid;
    launch(job, [s, copy = std::move(copy), ctx, genome, grid, cfg, run, id](const PlannerHooks& hooks) {
        Replanned r;
        try {
            r = replan_from(copy, *ctx, genome, grid, cfg, hooks);
        } catch (...) {
            std::lock_guard lk(s->mu);
            s->hold_at.reset();
            s->cv.notify_all();
            throw;
        }
        json resp = io::plan_response(*r.ctx, r.result, {r.snapshot.time, run});
        resp["sessionId"] = id;
        std::lock_guard lk(s->mu);
        s->replans[run] = r.ctx;
        if (resp["solutions"].empty()) {
            s->hold_at.reset();
            s->cv.notify_all();
        }
        return resp;
    });
    std::lock_guard lk(mu_);
    json out = job_json(*job);
    out["snapshotTime"] = snapshot_time;
    return out;
}

json Service::apply(const std::string& id, const json& body) {
    auto s = find_session(id);
    if (!body.is_object()) throw ValidationError("", "expected an object");
    const std::string run = text(body, "runId");
    const std::size_t index = index_of(body, "solutionIndex");
    std::shared_ptr<const PlanningContext> ctx;
    {
        std::lock_guard lk(s->mu);
        auto it = s->replans.find(run);
        if (it == s->replans.end()) throw NotFound("run " + run + " is not a finished replan of session " + id);
        ctx = it->second;
    }
    const json result = plan_result(s->mission, run);
    PlanGenome g;
    try {
        g = io::response_genome(*ctx, result, index);
    } catch (const Error& e) {
        throw BadRequest(e.what());
    }
    Evaluated e = evaluate_genome(*ctx, g);
    {
        std::lock_guard lk(s->mu);
        apply_replacement(s->state, *ctx, e.schedule);
        s->ctx = ctx;
        s->genome = e.genome;
        s->hold_at.reset();
        s->record["plans"].push_back({{"runId", run}, {"solutionIndex", index}, {"t", s->state.clock}});
        flush(*s);
        store_.put_session(s->mission, s->dir, s->record);
    }
    s->cv.notify_all();
    return session(id);
}

std::shared_ptr<Subscription> Service::subscribe(const std::string& id) {
    auto s = find_session(id);
    auto sub = std::make_shared<Subscription>();
    std::lock_guard lk(s->mu);
    for (const auto& l : s->lines) sub->push(l);
    s->subs.push_back(sub);
    return sub;
}

std::string Service::events(const std::string& id) const {
    auto s = find_session(id);
    std::lock_guard lk(s->mu);
    std::string out;
    for (const auto& l : s->lines) out += l + "\n";
    return out;
}

} // namespace uavmp::svc
