#include "metroflow/metrics/io.hpp"

#include <ostream>

#include "metroflow/csv.hpp"
#include "metroflow/errors.hpp"
#include "metroflow/svg.hpp"

namespace metroflow::metrics {

namespace {

std::vector<double> flows_of(std::span<const FlowPoint> series) {
    std::vector<double> out;
    out.reserve(series.size());
    for (const auto& p : series) out.push_back(p.flow);
    return out;
}

}  // namespace

void write_flow_series_csv(std::span<const FlowPoint> series, int window, std::ostream& out) {
    const auto smooth = moving_average(flows_of(series), window);
    out << "t,movements,flow,flow_smoothed\n";
    for (std::size_t i = 0; i < series.size(); ++i) {
        out << series[i].t << ',' << format_double(series[i].movements) << ',' << format_double(series[i].flow)
            << ',' << format_double(smooth[i]) << '\n';
    }
}

ScenarioSummary summarize(const std::string& scenario, const sim::TrajectoryLog& log, int window) {
    ScenarioSummary s{scenario, throughput(log, log.horizon_s), queueing_detected(log), std::nullopt};
    if (log.bottleneck_station >= 0) {
        try {
            s.optimum = flow_optimum(station_flow_series(log, log.bottleneck_station), window);
        } catch (const InsufficientDataError&) {
        }
    }
    return s;
}

void write_throughput_table_csv(std::span<const ScenarioSummary> rows, std::ostream& out) {
    out << "scenario,throughput_per_hour,queueing_detected,first_queue_t,max_flow,optimum_movements\n";
    for (const auto& r : rows) {
        out << r.scenario << ',' << format_double(r.throughput) << ',' << (r.queue.detected ? "true" : "false") << ','
            << (r.queue.first_time ? std::to_string(*r.queue.first_time) : std::string()) << ','
            << (r.optimum ? format_double(r.optimum->max_flow) : std::string()) << ','
            << (r.optimum ? format_double(r.optimum->movements) : std::string()) << '\n';
    }
}

void write_calibration_csv(const CalibrationResult& result, std::ostream& out) {
    out << "critical_pax,optimum_movements,max_flow,throughput_per_hour,selected\n";
    for (const auto& r : result.rows) {
        out << format_double(r.critical_pax) << ',' << format_double(r.optimum.movements) << ','
            << format_double(r.optimum.max_flow) << ',' << format_double(r.throughput) << ','
            << (r.critical_pax == result.critical_pax ? 1 : 0) << '\n';
    }
}

void write_flow_diagram_svg(std::span<const FlowPoint> series, int window, const std::string& title,
                            const std::string& path) {
    std::vector<double> x, y;
    for (const auto& p : series) {
        x.push_back(p.movements);
        y.push_back(p.flow);
    }
    const auto smooth = moving_average(y, window);
    SvgPlot plot(title, "passenger movements per train", "train flow (trains/s)");
    plot.add_points(x, y, "#7f8c8d", 2.0, "arrivals");
    plot.add_line(x, smooth, "#1f4e79", 1.4, "moving average (" + std::to_string(window) + ")");
    const auto opt = flow_optimum(series, window);
    const double ox[] = {opt.movements};
    const double oy[] = {opt.max_flow};
    plot.add_points(ox, oy, "#c0392b", 5.0, "optimum");
    plot.save(path);
}

}  // namespace metroflow::metrics
