#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "metroflow/metrics/metrics.hpp"

namespace metroflow::metrics {

struct ScenarioSummary {
    std::string scenario;
    double throughput;  // trains/hour
    QueueReport queue;
    std::optional<FlowOptimum> optimum;
};

// Throughput over the log horizon, queue detection and (when the bottleneck saw two or more
// arrivals) the flow optimum there.
[[nodiscard]] ScenarioSummary summarize(const std::string& scenario, const sim::TrajectoryLog& log, int window = 11);

// Columns: t,movements,flow,flow_smoothed
void write_flow_series_csv(std::span<const FlowPoint> series, int window, std::ostream& out);

// Columns: scenario,throughput_per_hour,queueing_detected,first_queue_t,max_flow,optimum_movements
void write_throughput_table_csv(std::span<const ScenarioSummary> rows, std::ostream& out);

// Columns: critical_pax,optimum_movements,max_flow,throughput_per_hour,selected
void write_calibration_csv(const CalibrationResult& result, std::ostream& out);

// Flow vs movements per train: raw points, smoothed series and the optimum marker.
void write_flow_diagram_svg(std::span<const FlowPoint> series, int window, const std::string& title,
                            const std::string& path);

}  // namespace metroflow::metrics
