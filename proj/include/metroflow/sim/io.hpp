#pragma once

#include <iosfwd>
#include <string>

#include "metroflow/sim/types.hpp"

namespace metroflow::sim {

// Key-value scenario file:
//
//   # comment
//   scenario = optimal-cap          (optional base profile, must come first)
//   line.stations = 1000,2000,3000
//   station.2.dwell.kind = bottleneck
//   station.2.dwell.critical_pax = 536
//   demand.cap = 9.65               ("none" clears it)
//
// Unknown keys and malformed values raise ConfigError carrying the line number.
[[nodiscard]] ScenarioConfig parse_scenario_config(std::istream& in);
[[nodiscard]] ScenarioConfig load_scenario_config(const std::string& path);

// Inverse of parse_scenario_config: every field written explicitly.
[[nodiscard]] std::string format_scenario_config(const ScenarioConfig& cfg);

// Columns: t,train,position,velocity
void write_trajectory_csv(const TrajectoryLog& log, std::ostream& out);
// Columns: t,train,kind,station,movements,headway_s,dwell_s
void write_events_csv(const TrajectoryLog& log, std::ostream& out);

// Time-space diagram with one polyline per train and station rules.
void write_time_space_svg(const TrajectoryLog& log, const std::string& title, const std::string& path);

}  // namespace metroflow::sim
