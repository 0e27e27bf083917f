#pragma once

// File-backed persistence. One directory per mission:
//   missions/<id>/mission.json
//   missions/<id>/runs/<runId>/{config,result}.json
//   missions/<id>/sessions/<sessionId>/{session.json,events.jsonl}
// Whole-file writes go to a temporary file first and are renamed into place.

#include <filesystem>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "uavmp/errors.hpp"

namespace uavmp::svc {

namespace fs = std::filesystem;
using nlohmann::json;

/// An I/O failure; the message names the path.
class IoError : public Error {
public:
    using Error::Error;
};

class NotFound : public Error {
public:
    using Error::Error;
};

void atomic_write(const fs::path& p, std::string_view text);
std::string read_file(const fs::path& p);

class Store {
public:
    explicit Store(fs::path root);

    const fs::path& root() const { return root_; }

    std::string create_mission(const json& doc);
    void put_mission(const std::string& id, const json& doc);
    json mission(const std::string& id) const;
    bool has_mission(const std::string& id) const;
    std::vector<std::string> missions() const;
    fs::path mission_dir(const std::string& id) const;

    std::string create_run(const std::string& mission, const json& config);
    void put_result(const std::string& mission, const std::string& run, const json& result);
    json run_config(const std::string& mission, const std::string& run) const;
    json result(const std::string& mission, const std::string& run) const;
    bool has_result(const std::string& mission, const std::string& run) const;
    std::vector<std::string> runs(const std::string& mission) const;

    std::string create_session(const std::string& mission, const json& record);
    void put_session(const std::string& mission, const std::string& session, const json& record);
    json session(const std::string& mission, const std::string& session) const;
    std::vector<std::string> sessions(const std::string& mission) const;
    void append_events(const std::string& mission, const std::string& session, std::string_view jsonl);
    std::string events(const std::string& mission, const std::string& session) const;

private:
    static std::vector<std::string> list(const fs::path& dir);
    std::string next_id(const fs::path& dir, char prefix);
    void require_mission(const std::string& id) const;

    fs::path root_;
    mutable std::mutex mu_;
};

} // namespace uavmp::svc
