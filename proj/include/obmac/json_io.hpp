#pragma once

#include <string>

#include <json.hpp>

#include "obmac/region.hpp"

namespace obmac {

/// Round to 12 significant digits; all emitted numbers go through this.
double round12(double x);

nlohmann::json to_json(const MassPointDistribution& d);
nlohmann::json to_json(const RateTuple& r);
nlohmann::json to_json(const KktReport& k);
nlohmann::json to_json(const SolveResult& r);
nlohmann::json to_json(const TimeSharedSolution& s);
nlohmann::json to_json(const RegionPoint& p);
nlohmann::json to_json(const Remark2Report& r);

/// Strict parse of {"points": [...], "weights": [...]}: unknown keys are
/// rejected and the weight/positivity/sum invariants are validated.
MassPointDistribution dist_from_json(const nlohmann::json& j);

/// Loads a distribution file; throws std::runtime_error with parse
/// diagnostics on malformed input.
MassPointDistribution load_distribution(const std::string& path);

}  // namespace obmac
