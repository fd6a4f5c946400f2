#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "metroflow/sim/types.hpp"

namespace metroflow::sim {

// Critical passenger number selected by calibrate_critical_pax over 300..700 in steps of 1
// against a target optimum of 580 pax/train.
inline constexpr double kCalibratedCriticalPax = 536.0;

// Three-station line with the congestion-sensitive dwell at the last station.
[[nodiscard]] ScenarioConfig default_scenario(double critical_pax = kCalibratedCriticalPax);

// Built-in control strategies: "no-control", "cap-9.75", "optimal-cap", "headway-control", "combined".
[[nodiscard]] ScenarioConfig named_scenario(std::string_view name, double critical_pax = kCalibratedCriticalPax);

[[nodiscard]] const std::vector<std::string>& scenario_names();

}  // namespace metroflow::sim
