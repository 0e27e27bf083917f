#include "uavmp/store.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <unistd.h>

namespace uavmp::svc {

namespace {

bool valid_id(const std::string& id) {
    return !id.empty() && id.size() <= 64 &&
           std::all_of(id.begin(), id.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_'; });
}

void check_id(const std::string& id, const char* what) {
    if (!valid_id(id)) throw NotFound(std::string("no such ") + what + ": " + id);
}

} // namespace

void atomic_write(const fs::path& p, std::string_view text) {
    std::error_code ec;
    fs::create_directories(p.parent_path(), ec);
    if (ec) throw IoError(p.parent_path().string() + ": " + ec.message());
    static std::atomic<unsigned long> serial{0};
    const fs::path tmp = p.string() + ".tmp" + std::to_string(::getpid()) + "-" + std::to_string(serial++);
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw IoError(tmp.string() + ": cannot open for writing");
        f.write(text.data(), static_cast<std::streamsize>(text.size()));
        f.flush();
        if (!f) throw IoError(tmp.string() + ": write failed");
    }
    fs::rename(tmp, p, ec);
    if (ec) {
        fs::remove(tmp);
        throw IoError(p.string() + ": " + ec.message());
    }
}

std::string read_file(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    if (!f) throw IoError(p.string() + ": cannot open");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

namespace {

json read_json(const fs::path& p) {
    if (!fs::exists(p)) throw NotFound(p.string() + ": not found");
    try {
        return json::parse(read_file(p));
    } catch (const json::parse_error& e) {
        throw IoError(p.string() + ": " + e.what());
    }
}

} // namespace

Store::Store(fs::path root) : root_(std::move(root)) {
    std::error_code ec;
    fs::create_directories(root_ / "missions", ec);
    if (ec) throw IoError((root_ / "missions").string() + ": " + ec.message());
}

std::vector<std::string> Store::list(const fs::path& dir) {
    std::vector<std::string> out;
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) return out;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_directory()) out.push_back(e.path().filename().string());
    std::sort(out.begin(), out.end());
    return out;
}

// Ids are a prefix letter plus a zero-padded counter; directories are created here so two
// callers never get the same id.
std::string Store::next_id(const fs::path& dir, char prefix) {
    long n = 0;
    for (const auto& name : list(dir))
        if (name.size() > 1 && name[0] == prefix) n = std::max(n, std::strtol(name.c_str() + 1, nullptr, 10));
    for (;;) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%c%04ld", prefix, ++n);
        std::error_code ec;
        if (fs::create_directories(dir / buf, ec)) return buf;
        if (ec) throw IoError((dir / buf).string() + ": " + ec.message());
    }
}

fs::path Store::mission_dir(const std::string& id) const { return root_ / "missions" / id; }

void Store::require_mission(const std::string& id) const {
    check_id(id, "mission");
    if (!fs::exists(mission_dir(id) / "mission.json")) throw NotFound("no such mission: " + id);
}

std::string Store::create_mission(const json& doc) {
    std::lock_guard lk(mu_);
    const std::string id = next_id(root_ / "missions", 'm');
    atomic_write(mission_dir(id) / "mission.json", doc.dump(2));
    return id;
}

void Store::put_mission(const std::string& id, const json& doc) {
    std::lock_guard lk(mu_);
    require_mission(id);
    atomic_write(mission_dir(id) / "mission.json", doc.dump(2));
}

json Store::mission(const std::string& id) const {
    std::lock_guard lk(mu_);
    require_mission(id);
    return read_json(mission_dir(id) / "mission.json");
}

bool Store::has_mission(const std::string& id) const {
    return valid_id(id) && fs::exists(mission_dir(id) / "mission.json");
}

std::vector<std::string> Store::missions() const {
    std::lock_guard lk(mu_);
    std::vector<std::string> out;
    for (auto& id : list(root_ / "missions"))
        if (fs::exists(mission_dir(id) / "mission.json")) out.push_back(id);
    return out;
}

std::string Store::create_run(const std::string& mission, const json& config) {
    std::lock_guard lk(mu_);
    require_mission(mission);
    const std::string id = next_id(mission_dir(mission) / "runs", 'r');
    atomic_write(mission_dir(mission) / "runs" / id / "config.json", config.dump(2));
    return id;
}

void Store::put_result(const std::string& mission, const std::string& run, const json& result) {
    std::lock_guard lk(mu_);
    check_id(run, "run");
    const fs::path dir = mission_dir(mission) / "runs" / run;
    if (!fs::exists(dir)) throw NotFound("no such run: " + mission + "/" + run);
    atomic_write(dir / "result.json", result.dump());
}

json Store::run_config(const std::string& mission, const std::string& run) const {
    std::lock_guard lk(mu_);
    check_id(mission, "mission");
    check_id(run, "run");
    return read_json(mission_dir(mission) / "runs" / run / "config.json");
}

json Store::result(const std::string& mission, const std::string& run) const {
    std::lock_guard lk(mu_);
    check_id(mission, "mission");
    check_id(run, "run");
    return read_json(mission_dir(mission) / "runs" / run / "result.json");
}

bool Store::has_result(const std::string& mission, const std::string& run) const {
    return valid_id(mission) && valid_id(run) && fs::exists(mission_dir(mission) / "runs" / run / "result.json");
}

std::vector<std::string> Store::runs(const std::string& mission) const {
    std::lock_guard lk(mu_);
    require_mission(mission);
    return list(mission_dir(mission) / "runs");
}

std::string Store::create_session(const std::string& mission, const json& record) {
    std::lock_guard lk(mu_);
    require_mission(mission);
    const std::string id = next_id(mission_dir(mission) / "sessions", 's');
    atomic_write(mission_dir(mission) / "sessions" / id / "session.json", record.dump(2));
    return id;
}

void Store::put_session(const std::string& mission, const std::string& session, const json& record) {
    std::lock_guard lk(mu_);
    check_id(session, "session");
    atomic_write(mission_dir(mission) / "sessions" / session / "session.json", record.dump(2));
}

json Store::session(const std::string& mission, const std::string& session) const {
    std::lock_guard lk(mu_);
    check_id(mission, "mission");
    check_id(session, "session");
    return read_json(mission_dir(mission) / "sessions" / session / "session.json");
}

std::vector<std::string> Store::sessions(const std::string& mission) const {
    std::lock_guard lk(mu_);
    require_mission(mission);
    return list(mission_dir(mission) / "sessions");
}

// The event log is append-only, so it is appended to rather than rewritten.
void Store::append_events(const std::string& mission, const std::string& session, std::string_view jsonl) {
    if (jsonl.empty()) return;
    std::lock_guard lk(mu_);
    check_id(session, "session");
    const fs::path p = mission_dir(mission) / "sessions" / session / "events.jsonl";
    std::ofstream f(p, std::ios::binary | std::ios::app);
    if (!f) throw IoError(p.string() + ": cannot open for appending");
    f.write(jsonl.data(), static_cast<std::streamsize>(jsonl.size()));
    if (!f) throw IoError(p.string() + ": write failed");
}

std::string Store::events(const std::string& mission, const std::string& session) const {
    std::lock_guard lk(mu_);
    check_id(mission, "mission");
    check_id(session, "session");
    const fs::path p = mission_dir(mission) / "sessions" / session / "events.jsonl";
    if (!fs::exists(p)) return {};
    return read_file(p);
}

} // namespace uavmp::svc
