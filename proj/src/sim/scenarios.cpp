#include "metroflow/sim/scenarios.hpp"

#include "metroflow/errors.hpp"

namespace metroflow::sim {

ScenarioConfig default_scenario(double critical_pax) {
    ScenarioConfig cfg;
    cfg.name = "no-control";
    cfg.dwell_models = {ConstantDwell{30}, ConstantDwell{30}, BottleneckDwell{40.0, critical_pax, 0.1}};
    return cfg;
}

ScenarioConfig named_scenario(std::string_view name, double critical_pax) {
    ScenarioConfig cfg = default_scenario(critical_pax);
    cfg.name = std::string(name);
    if (name == "no-control") return cfg;
    if (name == "cap-9.75") {
        cfg.demand.cap = 9.75;
        return cfg;
    }
    if (name == "optimal-cap") {
        cfg.demand.cap = 9.65;
        return cfg;
    }
    if (name == "headway-control") {
        cfg.injection.floor_s = 90;
        cfg.upstream_dwell_override = UpstreamDwellOverride{{0, 1}, 60};
        return cfg;
    }
    if (name == "combined") {
        cfg.demand.cap = 9.75;
        cfg.injection.floor_s = 70;
        cfg.upstream_dwell_override = UpstreamDwellOverride{{0, 1}, 60};
        return cfg;
    }
    throw ConfigError("unknown scenario '" + std::string(name) + "'");
}

const std::vector<std::string>& scenario_names() {
    static const std::vector<std::string> names{"no-control", "cap-9.75", "optimal-cap", "headway-control", "combined"};
    return names;
}

}  // namespace metroflow::sim
