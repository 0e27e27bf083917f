#pragma once

// In-process service: missions, planner jobs and simulation sessions on top of a Store.
// The HTTP server is a thin layer over this class.

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>

#include "uavmp/nsga2.hpp"
#include "uavmp/sim.hpp"
#include "uavmp/store.hpp"

namespace uavmp::svc {

/// Request conflicts with the current state (job already running, stale replacement...).
class Conflict : public Error {
public:
    using Error::Error;
};

/// Client error that is not about a document field (bad index, missing parameter).
class BadRequest : public Error {
public:
    using Error::Error;
};

enum class JobState { queued, running, done, canceled, failed };
std::string_view to_string(JobState s);

struct ServiceOptions {
    fs::path data_dir = ".";  // relative elevation files resolve against this
    std::string planner_cmd;  // external planner speaking {mission, config} -> response over stdio
    double tick_s = 0.5;      // simulation step
};

/// One reader of a session's event log. Starts with the whole log so far, then follows it.
class Subscription {
public:
    /// Next JSON line, or nothing after `wait` without news or once closed and drained.
    std::optional<std::string> next(std::chrono::milliseconds wait);
    bool closed() const;
    void close();

private:
    friend class Service;
    void push(const std::string& line);

    mutable std::mutex mu_;
    std::condition_variable cv_;
    std::deque<std::string> queue_;
    bool closed_ = false;
};

class Service {
public:
    explicit Service(Store& store, ServiceOptions opts = {});
    ~Service();
    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    // missions
    json create_mission(const json& doc);
    json put_mission(const std::string& id, const json& doc);
    json mission(const std::string& id) const;
    json missions() const;

    // planner jobs
    /// Body: {runtime?, seed?, population?, profiles?, profileOverrides?, ...config keys}.
    json submit_plan(const std::string& mission, const json& body);
    json job(const std::string& id) const;
    json cancel_job(const std::string& id);
    /// Blocks until the job has finished; returns its final status.
    json wait_job(const std::string& id);
    json runs(const std::string& mission) const;
    json plan_result(const std::string& mission, const std::string& run) const;

    // simulation sessions
    /// Body: {missionId, runId, solutionIndex}.
    json start_session(const json& body);
    json session(const std::string& id) const;
    /// Body: {factor}: simulated seconds per wall-clock second, 0 pauses.
    json pace(const std::string& id, const json& body);
    /// Steps the simulation `seconds` ahead right away, independent of pacing.
    json advance(const std::string& id, double seconds);
    json snapshot(const std::string& id, double delta) const;
    json inject(const std::string& id, const json& objective);
    /// Body: {runtime, seed?}. Plans from the state `runtime` seconds ahead.
    json replan(const std::string& id, const json& body);
    /// Body: {runId, solutionIndex}. Switches the session to a replan result.
    json apply(const std::string& id, const json& body);
    std::shared_ptr<Subscription> subscribe(const std::string& id);
    std::string events(const std::string& id) const;

private:
    struct Job;
    struct Session;

    std::shared_ptr<Job> find_job(const std::string& id) const;
    std::shared_ptr<Session> find_session(const std::string& id) const;
    std::shared_ptr<Job> new_job(const std::string& mission, const std::string& kind, const std::string& run,
                                 const SearchConfig& cfg);
    void launch(const std::shared_ptr<Job>& job, std::function<json(const PlannerHooks&)> work);
    json job_json(const Job& j) const;
    void flush(Session& s);
    void pace_loop(std::shared_ptr<Session> s);
    std::shared_ptr<const geo::ElevationGrid> grid_for(const Mission& m) const;
    json run_external(const json& request, const fs::path& dir) const;

    Store& store_;
    ServiceOptions opts_;
    mutable std::mutex mu_;
    std::condition_variable job_cv_;
    std::map<std::string, std::shared_ptr<Job>> jobs_;
    std::map<std::string, std::string> active_; // mission -> running job
    std::map<std::string, std::shared_ptr<Session>> sessions_;
    long job_counter_ = 0;
};

} // namespace uavmp::svc
