#include "metroflow/metrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <string>

#include "metroflow/errors.hpp"
#include "metroflow/sim/scenarios.hpp"
#include "metroflow/sim/simulator.hpp"

namespace metroflow::metrics {

std::vector<FlowPoint> station_flow_series(const sim::TrajectoryLog& log, int station) {
    std::vector<FlowPoint> out;
    std::optional<int> prev;
    for (const auto& ev : log.events) {
        if (ev.kind != sim::EventKind::Arrival || ev.station != station) continue;
        if (prev) out.push_back({ev.movements, 1.0 / (ev.t - *prev), ev.t});
        prev = ev.t;
    }
    if (out.empty()) {
        throw InsufficientDataError("station " + std::to_string(station) + " has fewer than two arrivals");
    }
    return out;
}

int count_exits(const sim::TrajectoryLog& log, int from, int to) {
    return static_cast<int>(std::count_if(log.events.begin(), log.events.end(), [&](const sim::TrainEvent& ev) {
        return ev.kind == sim::EventKind::Exit && ev.t > from && ev.t <= to;
    }));
}

double throughput(const sim::TrajectoryLog& log, int horizon_s) {
    if (horizon_s <= 0) throw DomainError("throughput horizon must be positive");
    return count_exits(log, 0, horizon_s) * 3600.0 / horizon_s;
}

QueueReport queueing_detected(const sim::TrajectoryLog& log) {
    const auto& st = log.station_positions;
    for (const auto& s : log.snapshots) {
        if (s.velocity != 0) continue;
        if (std::binary_search(st.begin(), st.end(), s.position)) continue;
        return {true, s.t};
    }
    return {};
}

std::vector<double> moving_average(std::span<const double> values, int window) {
    if (window < 1) throw DomainError("smoothing window must be >= 1");
    const int n = static_cast<int>(values.size());
    const int half = window / 2;
    std::vector<double> out(values.size());
    for (int i = 0; i < n; ++i) {
        const int lo = std::max(0, i - half);
        const int hi = std::min(n - 1, i + half);
        double sum = 0.0;
        for (int j = lo; j <= hi; ++j) sum += values[j];
        out[i] = sum / (hi - lo + 1);
    }
    return out;
}

FlowOptimum flow_optimum(std::span<const FlowPoint> series, int window) {
    if (series.empty()) throw InsufficientDataError("empty flow series");
    std::vector<double> flows(series.size());
    std::transform(series.begin(), series.end(), flows.begin(), [](const FlowPoint& p) { return p.flow; });
    const auto smooth = moving_average(flows, window);
    std::size_t best = 0;
    for (std::size_t i = 1; i < smooth.size(); ++i) {
        if (smooth[i] >= smooth[best] - 1e-15) best = i;
    }
    return {smooth[best], series[best].movements, series[best].t};
}

namespace {

CalibrationRow evaluate_candidate(double critical_pax, int window) {
    const auto cfg = sim::named_scenario("no-control", critical_pax);
    const auto log = sim::run_scenario(cfg);
    const auto series = station_flow_series(log, cfg.bottleneck_index());
    return {critical_pax, flow_optimum(series, window), throughput(log, cfg.line.horizon_s)};
}

}  // namespace

CalibrationResult calibrate_critical_pax(double target_movements, std::span<const double> candidates, int window,
                                         int jobs) {
    if (candidates.empty()) throw DomainError("calibration sweep is empty");
    CalibrationResult result;
    result.rows.resize(candidates.size());
    jobs = std::max(1, jobs);
    for (std::size_t start = 0; start < candidates.size(); start += jobs) {
        std::vector<std::future<CalibrationRow>> batch;
        const std::size_t end = std::min(candidates.size(), start + jobs);
        for (std::size_t i = start; i < end; ++i) {
            batch.push_back(std::async(jobs > 1 ? std::launch::async : std::launch::deferred, evaluate_candidate,
                                       candidates[i], window));
        }
        for (std::size_t i = start; i < end; ++i) result.rows[i] = batch[i - start].get();
    }
    const CalibrationRow* best = nullptr;
    for (const auto& row : result.rows) {
        const double dist = std::abs(row.optimum.movements - target_movements);
        if (!best) {
            best = &row;
            continue;
        }
        const double best_dist = std::abs(best->optimum.movements - target_movements);
        if (dist < best_dist - 1e-9 || (std::abs(dist - best_dist) <= 1e-9 && row.critical_pax < best->critical_pax)) {
            best = &row;
        }
    }
    result.critical_pax = best->critical_pax;
    return result;
}

}  // namespace metroflow::metrics
