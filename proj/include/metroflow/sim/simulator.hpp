#pragma once

#include <optional>
#include <random>
#include <vector>

#include "metroflow/sim/types.hpp"

namespace metroflow::sim {

// Outcome of an injection attempt at the entry cell.
enum class InjectionResult { Entered, NotDue, BlockedBySafetyGap };

// Mutable state of one simulation run. Trains are kept front (oldest) to back.
class Simulation {
public:
    explicit Simulation(ScenarioConfig cfg);

    // Advances the line to time t and appends snapshots/events for t.
    void step(int t);

    // Attempts to put a new train on the line at time t.
    InjectionResult try_inject(int t);

    [[nodiscard]] const std::vector<TrainState>& trains() const { return trains_; }
    [[nodiscard]] const TrajectoryLog& log() const { return log_; }
    [[nodiscard]] TrajectoryLog take_log() && { return std::move(log_); }
    [[nodiscard]] const ScenarioConfig& config() const { return cfg_; }
    [[nodiscard]] double movement_rate() const { return movement_rate_; }
    [[nodiscard]] int injected() const { return injected_; }
    [[nodiscard]] int exited() const { return exited_; }

    friend bool operator==(const Simulation& a, const Simulation& b) {
        return a.trains_ == b.trains_ && a.log_ == b.log_ && a.injected_ == b.injected_ &&
               a.exited_ == b.exited_ && a.last_entry_ == b.last_entry_ &&
               a.last_bottleneck_arrival_ == b.last_bottleneck_arrival_;
    }

private:
    [[nodiscard]] double demand_at(int t);
    [[nodiscard]] int planned_dwell_on_arrival(int station, int t, TrainState& train);
    void check_ordering(int t) const;

    ScenarioConfig cfg_;
    int bottleneck_ = -1;
    std::vector<TrainState> trains_;
    TrajectoryLog log_;
    std::mt19937_64 rng_;
    double run_scale_ = 1.0;
    double movement_rate_ = 0.0;
    int injected_ = 0;
    int exited_ = 0;
    std::optional<int> last_entry_;
    std::optional<int> last_bottleneck_arrival_;
};

// Runs step for t = 1..horizon and returns the full log.
[[nodiscard]] TrajectoryLog run_scenario(const ScenarioConfig& cfg);

}  // namespace metroflow::sim
