#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace metroflow::sim {

// Line geometry and kinematics. One cell is one metre and one step is one second,
// so all kinematic quantities are integers in cells and seconds.
struct LineConfig {
    int length_cells = 4000;
    std::vector<int> station_positions{1000, 2000, 3000};
    int horizon_s = 3600;
    int v_max = 20;
    int accel = 1;
    int decel = 1;
    int safety_margin = 50;

    friend bool operator==(const LineConfig&, const LineConfig&) = default;

    void validate() const;
};

struct ConstantDwell {
    int seconds = 30;

    friend bool operator==(const ConstantDwell&, const ConstantDwell&) = default;
};

// Dwell at a congestion-sensitive station: base seconds until the per-train
// movements exceed the critical number, then grows linearly at gamma s/pax.
struct BottleneckDwell {
    double base_s = 40.0;
    double critical_pax = 400.0;
    double gamma = 0.1;

    friend bool operator==(const BottleneckDwell&, const BottleneckDwell&) = default;
};

using DwellModel = std::variant<ConstantDwell, BottleneckDwell>;

// Passenger movement rate at the bottleneck, ramping linearly per time step.
struct DemandRamp {
    double initial_rate = 0.0;
    double max_rate = 10.0;
    double increment_per_step = 0.005;
    std::optional<double> cap;  // inflow-control ceiling
    // Optional stochastic perturbation (both zero for the deterministic model).
    double run_scale_sd = 0.0;  // one multiplicative factor per run
    double step_noise_sd = 0.0; // multiplicative noise per step

    friend bool operator==(const DemandRamp&, const DemandRamp&) = default;

    void validate() const;
};

// Departure interval D(t) = max(floor_s, start_s - decrement_s * floor(t / period_s)).
struct InjectionSchedule {
    int start_s = 120;
    int decrement_s = 5;
    int period_s = 120;
    int floor_s = 60;

    friend bool operator==(const InjectionSchedule&, const InjectionSchedule&) = default;

    void validate() const;
    [[nodiscard]] int interval_at(int t) const;
};

struct UpstreamDwellOverride {
    std::vector<int> station_indices;
    int seconds = 60;

    friend bool operator==(const UpstreamDwellOverride&, const UpstreamDwellOverride&) = default;
};

struct ScenarioConfig {
    std::string name = "no-control";
    LineConfig line;
    std::vector<DwellModel> dwell_models;
    DemandRamp demand;
    InjectionSchedule injection;
    std::optional<UpstreamDwellOverride> upstream_dwell_override;
    std::uint64_t rng_seed = 0;

    friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;

    void validate() const;
    // Index of the first bottleneck station, or -1 when all dwells are constant.
    [[nodiscard]] int bottleneck_index() const;
    // Planned dwell of a constant-dwell station after applying any override.
    [[nodiscard]] int constant_dwell(int station_index) const;
};

struct TrainState {
    int index = 0;         // entry order, starting at 1
    int position = 1;      // cell index
    int velocity = 0;      // cells per second
    int dwell_elapsed = 0; // seconds dwelt at the current station
    int planned_dwell = 0; // dwell target for the current stop
    int headway_at_bottleneck = 0;  // recorded on arrival at the bottleneck
    double movements = 0.0;         // boardings + alightings at the last bottleneck stop

    friend bool operator==(const TrainState&, const TrainState&) = default;
};

struct Snapshot {
    int t;
    int train;
    int position;
    int velocity;

    friend bool operator==(const Snapshot&, const Snapshot&) = default;
};

enum class EventKind { Arrival, Departure, Exit };

struct TrainEvent {
    int t;
    int train;
    EventKind kind;
    int station = -1;        // station index, -1 for exits
    double movements = 0.0;  // N_p, only at the bottleneck
    int headway_s = 0;       // H, only at the bottleneck
    int dwell_s = 0;         // planned dwell, arrivals only

    friend bool operator==(const TrainEvent&, const TrainEvent&) = default;
};

struct TrajectoryLog {
    std::vector<Snapshot> snapshots;
    std::vector<TrainEvent> events;
    int horizon_s = 0;
    std::vector<int> station_positions;
    int length_cells = 0;
    int bottleneck_station = -1;

    friend bool operator==(const TrajectoryLog&, const TrajectoryLog&) = default;
};

[[nodiscard]] const char* to_string(EventKind kind);

}  // namespace metroflow::sim
