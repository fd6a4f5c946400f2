#include "metroflow/sim/types.hpp"

#include <algorithm>
#include <string>

#include "metroflow/errors.hpp"

namespace metroflow::sim {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
}

}  // namespace

void LineConfig::validate() const {
    require(length_cells > 2, "line.length must exceed 2 cells");
    require(horizon_s > 0, "line.horizon must be positive");
    require(v_max >= 1 && accel >= 1 && decel >= 1, "line.v_max, line.accel and line.decel must be >= 1");
    require(safety_margin >= 0, "line.safety_margin must be >= 0");
    int prev = 1;
    for (int p : station_positions) {
        require(p > prev && p < length_cells,
                "station positions must be strictly increasing and inside (1, length)");
        prev = p;
    }
}

void DemandRamp::validate() const {
    require(initial_rate >= 0 && initial_rate <= max_rate, "demand: need 0 <= initial_rate <= max_rate");
    require(increment_per_step >= 0, "demand.increment must be >= 0");
    if (cap) require(*cap >= 0 && *cap <= max_rate, "demand.cap must lie in [0, max_rate]");
    require(run_scale_sd >= 0 && step_noise_sd >= 0, "demand noise scales must be >= 0");
}

void InjectionSchedule::validate() const {
    require(floor_s >= 1 && start_s >= floor_s, "injection: need start >= floor >= 1");
    require(decrement_s >= 0, "injection.decrement must be >= 0");
    require(period_s >= 1, "injection.period must be >= 1");
}

int InjectionSchedule::interval_at(int t) const {
    const long long steps = t / period_s;
    const long long d = static_cast<long long>(start_s) - static_cast<long long>(decrement_s) * steps;
    return static_cast<int>(std::max<long long>(floor_s, d));
}

void ScenarioConfig::validate() const {
    line.validate();
    demand.validate();
    injection.validate();
    require(dwell_models.size() == line.station_positions.size(),
            "dwell model count must equal station count");
    for (const auto& m : dwell_models) {
        if (const auto* c = std::get_if<ConstantDwell>(&m)) {
            require(c->seconds > 0, "constant dwell must be positive");
        } else {
            const auto& b = std::get<BottleneckDwell>(m);
            require(b.base_s > 0 && b.critical_pax > 0 && b.gamma >= 0,
                    "bottleneck dwell needs base > 0, critical_pax > 0, gamma >= 0");
        }
    }
    if (upstream_dwell_override) {
        require(upstream_dwell_override->seconds > 0, "upstream dwell override must be positive");
        for (int s : upstream_dwell_override->station_indices) {
            require(s >= 0 && s < static_cast<int>(dwell_models.size()),
                    "upstream dwell override names an unknown station");
        }
    }
}

int ScenarioConfig::bottleneck_index() const {
    for (std::size_t i = 0; i < dwell_models.size(); ++i) {
        if (std::holds_alternative<BottleneckDwell>(dwell_models[i])) return static_cast<int>(i);
    }
    return -1;
}

int ScenarioConfig::constant_dwell(int station_index) const {
    if (upstream_dwell_override) {
        const auto& ids = upstream_dwell_override->station_indices;
        if (std::find(ids.begin(), ids.end(), station_index) != ids.end()) return upstream_dwell_override->seconds;
    }
    return std::get<ConstantDwell>(dwell_models.at(station_index)).seconds;
}

const char* to_string(EventKind kind) {
    switch (kind) {
        case EventKind::Arrival: return "arrival";
        case EventKind::Departure: return "departure";
        case EventKind::Exit: return "exit";
    }
    return "?";
}

}  // namespace metroflow::sim
