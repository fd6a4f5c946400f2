#pragma once

#include <optional>
#include <span>
#include <vector>

#include "metroflow/sim/types.hpp"

namespace metroflow::metrics {

// One arrival at a station: movements per train and the inverse arrival headway.
struct FlowPoint {
    double movements;  // N_p, pax/train
    double flow;       // trains/s
    int t;             // arrival time

    friend bool operator==(const FlowPoint&, const FlowPoint&) = default;
};

// Flow points for every arrival after the first, in arrival order.
// Throws InsufficientDataError when the station saw fewer than two arrivals.
[[nodiscard]] std::vector<FlowPoint> station_flow_series(const sim::TrajectoryLog& log, int station);

// Exit events with from < t <= to.
[[nodiscard]] int count_exits(const sim::TrajectoryLog& log, int from, int to);

// Exit events in (0, horizon] scaled to trains per hour.
[[nodiscard]] double throughput(const sim::TrajectoryLog& log, int horizon_s);

struct QueueReport {
    bool detected = false;
    std::optional<int> first_time;
};

// A queue is any train standing still off a station cell.
[[nodiscard]] QueueReport queueing_detected(const sim::TrajectoryLog& log);

// Centered moving average; windows are truncated at the series ends.
[[nodiscard]] std::vector<double> moving_average(std::span<const double> values, int window);

struct FlowOptimum {
    double max_flow;   // trains/s, after smoothing
    double movements;  // N_p at the smoothed argmax
    int t;             // arrival time of that point
};

// Argmax of the time-ordered, smoothed flow series. Ties resolve to the latest arrival.
[[nodiscard]] FlowOptimum flow_optimum(std::span<const FlowPoint> series, int window = 11);

struct CalibrationRow {
    double critical_pax;
    FlowOptimum optimum;
    double throughput;
};

struct CalibrationResult {
    double critical_pax;
    std::vector<CalibrationRow> rows;
};

// Runs the no-control scenario for every candidate and returns the one whose realized
// optimum N_p is nearest the target (ties go to the smaller candidate).
[[nodiscard]] CalibrationResult calibrate_critical_pax(double target_movements, std::span<const double> candidates,
                                                       int window = 11, int jobs = 1);

}  // namespace metroflow::metrics
