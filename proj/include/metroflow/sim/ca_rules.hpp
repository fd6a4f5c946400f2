#pragma once

#include <compare>
#include <cstdint>
#include <limits>

#include "metroflow/sim/types.hpp"

namespace metroflow::sim {

// Gap value used when a train has no leader.
inline constexpr int kNoLeader = std::numeric_limits<int>::max();

// Braking distance plus safety margin, v^2 / (2b) + SM, as a real number.
[[nodiscard]] double min_instantaneous_distance(int velocity, int decel, int safety_margin);

// Orders a gap against v^2/(2b) + SM without rounding: compares 2b*gap with v^2 + 2b*SM.
[[nodiscard]] std::strong_ordering compare_to_min_distance(std::int64_t gap, int velocity, int decel,
                                                           int safety_margin);

// Orders a gap against L_s = 1/(2a) + SM via 2a*gap versus 1 + 2a*SM.
[[nodiscard]] std::strong_ordering compare_to_departure_distance(std::int64_t gap, int accel,
                                                                 int safety_margin);

// floor(sqrt(2 b G)), computed exactly in integers.
[[nodiscard]] int stop_approach_velocity(int distance_to_station, int decel);

// Car-following update against the train ahead (also used behind an occupied station).
[[nodiscard]] TrainState update_following(const TrainState& self, int leader_position, const LineConfig& cfg);

// Approach towards an empty station G cells ahead. The returned train lands exactly on the
// station cell when the velocity equals G; the caller starts the dwell.
[[nodiscard]] TrainState update_approaching_empty_station(const TrainState& self, int distance_to_station,
                                                          const LineConfig& cfg);

struct DwellUpdate {
    TrainState train;
    bool departed = false;
};

// Dwell counting at a station followed by departure once the target is reached and the
// leader is more than L_s ahead. A blocked departure holds without advancing the counter.
[[nodiscard]] DwellUpdate update_dwelling(const TrainState& self, int planned_dwell, int leader_gap,
                                          const LineConfig& cfg);

struct BottleneckDwellResult {
    int seconds;
    double movements;  // N_p = A_p * H
};

[[nodiscard]] BottleneckDwellResult bottleneck_dwell_time(double movement_rate, int headway_s,
                                                          const BottleneckDwell& model);

}  // namespace metroflow::sim
