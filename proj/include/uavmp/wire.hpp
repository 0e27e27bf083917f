#pragma once

// JSON value forms of the mission model, shared by the CLI, the service and tests.

#include <json.hpp>

#include "uavmp/mission.hpp"

namespace uavmp::wire {

using nlohmann::json;

inline constexpr int kMissionSchema = 1;

json to_json(const Mission& m);
/// Throws ValidationError listing every issue found.
Mission mission_from_json(const json& j, const Catalog& catalog = Catalog::builtin());

json to_json(const Objective& o, const Mission& m);
/// Parses and validates one objective against an existing mission.
Objective objective_from_json(const json& j, const Mission& m, const Catalog& catalog = Catalog::builtin());

json to_json(const OperatorProfile& p);
/// Applies a partial profile document on top of `base` (used for config overrides).
OperatorProfile profile_from_json(const json& j, const OperatorProfile& base);

json issues_json(const std::vector<Issue>& issues);

} // namespace uavmp::wire
