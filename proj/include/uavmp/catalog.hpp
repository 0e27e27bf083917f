#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace uavmp {

enum class ProfileKind { min_consumption = 0, max_speed = 1, climb = 2, descent = 3 };

inline constexpr int kCruiseProfiles = 2; // min_consumption, max_speed

std::string_view to_string(ProfileKind k);
std::optional<ProfileKind> profile_from_string(std::string_view s);

struct FlightProfile {
    ProfileKind kind = ProfileKind::min_consumption;
    double speed_mps = 0.0;
    double fuel_rate_kgps = 0.0;
    double altitude_m = 0.0; // cruise kinds
    double angle_deg = 0.0;  // climb / descent

    bool operator==(const FlightProfile&) const = default;
};

struct VehicleType {
    std::string name;
    double mass_kg = 0.0;
    double max_fuel_kg = 0.0;
    double cost_per_hour = 0.0;
    double max_altitude_m = 0.0;
    double max_speed_mps = 0.0;
    double max_flight_time_s = 0.0;
    double max_range_m = 0.0;
    std::array<FlightProfile, 4> profiles{};

    const FlightProfile& profile(ProfileKind k) const { return profiles[static_cast<int>(k)]; }
    bool operator==(const VehicleType&) const = default;
};

struct TaskTemplate {
    std::string name;
    std::vector<std::string> sensors; // any one of these performs the task
    bool multi_vehicle = false;
    double default_duration_s = 0.0;
};

struct ObjectiveType {
    std::string name;
    std::vector<TaskTemplate> tasks;
    std::string intra_relation; // Allen relation linking consecutive tasks, empty for single-task types
};

class Catalog {
public:
    /// Parses a catalog document. Throws ValidationError.
    static Catalog parse(std::string_view json_text);
    /// The catalog shipped in data/catalog.json, compiled into the library.
    static const Catalog& builtin();

    int version() const { return version_; }
    const std::vector<std::string>& sensors() const { return sensors_; }
    const std::map<std::string, VehicleType>& vehicle_types() const { return vehicles_; }
    const std::map<std::string, ObjectiveType>& objective_types() const { return objectives_; }

    const VehicleType* vehicle(const std::string& name) const;
    const ObjectiveType* objective_type(const std::string& name) const;
    bool has_sensor(const std::string& s) const;

private:
    int version_ = 0;
    std::vector<std::string> sensors_;
    std::map<std::string, VehicleType> vehicles_;
    std::map<std::string, ObjectiveType> objectives_;
};

} // namespace uavmp
