#include "metroflow/sim/ca_rules.hpp"

#include <algorithm>
#include <cmath>

#include "metroflow/errors.hpp"

namespace metroflow::sim {

double min_instantaneous_distance(int velocity, int decel, int safety_margin) {
    return static_cast<double>(velocity) * velocity / (2.0 * decel) + safety_margin;
}

std::strong_ordering compare_to_min_distance(std::int64_t gap, int velocity, int decel, int safety_margin) {
    const std::int64_t b2 = 2 * static_cast<std::int64_t>(decel);
    const std::int64_t lhs = b2 * gap;
    const std::int64_t rhs = static_cast<std::int64_t>(velocity) * velocity + b2 * safety_margin;
    return lhs <=> rhs;
}

std::strong_ordering compare_to_departure_distance(std::int64_t gap, int accel, int safety_margin) {
    const std::int64_t a2 = 2 * static_cast<std::int64_t>(accel);
    return a2 * gap <=> 1 + a2 * safety_margin;
}

int stop_approach_velocity(int distance_to_station, int decel) {
    if (distance_to_station <= 0) return 0;
    const std::int64_t target = 2 * static_cast<std::int64_t>(decel) * distance_to_station;
    auto root = static_cast<std::int64_t>(std::sqrt(static_cast<double>(target)));
    while (root * root > target) --root;
    while ((root + 1) * (root + 1) <= target) ++root;
    return static_cast<int>(root);
}

TrainState update_following(const TrainState& self, int leader_position, const LineConfig& cfg) {
    if (leader_position <= self.position) {
        throw CollisionError("train " + std::to_string(self.index) + " at cell " + std::to_string(self.position) +
                             " is not behind its leader at cell " + std::to_string(leader_position));
    }
    const auto gap = static_cast<std::int64_t>(leader_position) - self.position;
    const auto cmp = compare_to_min_distance(gap, self.velocity, cfg.decel, cfg.safety_margin);
    TrainState next = self;
    if (cmp > 0) {
        next.velocity = std::min(self.velocity + cfg.accel, cfg.v_max);
    } else if (cmp < 0) {
        next.velocity = std::max(self.velocity - cfg.decel, 0);
    }
    next.position = self.position + next.velocity;
    return next;
}

TrainState update_approaching_empty_station(const TrainState& self, int distance_to_station, const LineConfig& cfg) {
    TrainState next = self;
    if (distance_to_station <= 0) {
        next.velocity = 0;
        next.dwell_elapsed = 0;
        return next;
    }
    // A station is not an obstacle that needs the inter-train margin, so the threshold
    // is the pure braking distance v^2/(2b).
    const auto cmp = compare_to_min_distance(distance_to_station, self.velocity, cfg.decel, 0);
    const int envelope = stop_approach_velocity(distance_to_station, cfg.decel);
    int v = self.velocity;
    if (cmp > 0) {
        v = std::min({self.velocity + cfg.accel, cfg.v_max, envelope});
    } else if (cmp < 0) {
        v = std::max(std::min(self.velocity - cfg.decel, envelope), 0);
    }
    v = std::min({v, envelope, distance_to_station});
    next.velocity = v;
    next.position = self.position + v;
    if (next.position == self.position + distance_to_station) next.dwell_elapsed = 0;
    return next;
}

DwellUpdate update_dwelling(const TrainState& self, int planned_dwell, int leader_gap, const LineConfig& cfg) {
    DwellUpdate out{self, false};
    if (self.dwell_elapsed < planned_dwell) {
        out.train.velocity = 0;
        out.train.dwell_elapsed = self.dwell_elapsed + 1;
        return out;
    }
    const bool clear = leader_gap == kNoLeader ||
                       compare_to_departure_distance(leader_gap, cfg.accel, cfg.safety_margin) > 0;
    if (!clear) {
        out.train.velocity = 0;
        return out;
    }
    out.train.velocity = std::min(self.velocity + cfg.accel, cfg.v_max);
    out.train.position = self.position + out.train.velocity;
    out.train.dwell_elapsed = 0;
    out.departed = true;
    return out;
}

BottleneckDwellResult bottleneck_dwell_time(double movement_rate, int headway_s, const BottleneckDwell& model) {
    const double movements = movement_rate * headway_s;
    double seconds = model.base_s;
    if (movements > model.critical_pax) seconds += model.gamma * (movements - model.critical_pax);
    return {static_cast<int>(std::lround(seconds)), movements};
}

}  // namespace metroflow::sim
