#pragma once

#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>

#include <unistd.h>

#include <json.hpp>

#include "uavmp/context.hpp"
#include "uavmp/mission.hpp"
#include "uavmp/population.hpp"

#ifndef UAVMP_SOURCE_DIR
#error "UAVMP_SOURCE_DIR must point at the source tree"
#endif

namespace uavmp::testing {

inline std::string source_path(const std::string& rel) { return std::string(UAVMP_SOURCE_DIR) + "/" + rel; }
inline std::string fixture_path(const std::string& name) { return source_path("fixtures/" + name); }

inline std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

inline nlohmann::json fixture_json(const std::string& name) { return nlohmann::json::parse(slurp(fixture_path(name))); }
inline nlohmann::json oracle(const std::string& name) {
    return nlohmann::json::parse(slurp(source_path("tests/oracles/" + name)));
}

/// Mission fixture with its elevation file made absolute.
inline Mission fixture_mission(const std::string& name) {
    Mission m = parse_mission(slurp(fixture_path(name)));
    if (m.elevation_file && std::filesystem::path(*m.elevation_file).is_relative())
        m.elevation_file = fixture_path(*m.elevation_file);
    return m;
}

inline std::shared_ptr<PlanningContext> fixture_context(const std::string& name) {
    Mission m = fixture_mission(name);
    auto grid = load_mission_grid(m, "");
    return std::make_shared<PlanningContext>(std::move(m), std::move(grid));
}

/// Genome built from the wire form {tasks:[{task,uavs,order,profile,sensor}], uavs:[...]}.
inline PlanGenome genome(const PlanningContext& ctx, const nlohmann::json& j) { return genome_from_json(ctx, j); }

/// Scratch directory removed on destruction.
struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("uavmp-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter()++));
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    static int& counter() {
        static int n = 0;
        return n;
    }
};

} // namespace uavmp::testing
