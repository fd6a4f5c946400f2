#include "metroflow/sim/io.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "metroflow/csv.hpp"
#include "metroflow/errors.hpp"
#include "metroflow/sim/scenarios.hpp"
#include "metroflow/svg.hpp"

namespace metroflow::sim {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

struct LineError {
    int line;
    [[noreturn]] void fail(const std::string& msg) const {
        throw ConfigError("line " + std::to_string(line) + ": " + msg);
    }
    template <typename T>
    T number(const std::string& v) const {
        T out{};
        auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
        if (ec != std::errc{} || ptr != v.data() + v.size()) fail("bad numeric value '" + v + "'");
        return out;
    }
    std::vector<int> int_list(const std::string& v) const {
        std::vector<int> out;
        if (v == "none" || v.empty()) return out;
        std::stringstream ss(v);
        std::string item;
        while (std::getline(ss, item, ',')) out.push_back(number<int>(trim(item)));
        return out;
    }
};

void apply_station_key(ScenarioConfig& cfg, const std::string& key, const std::string& value, const LineError& err) {
    // station.<i>.dwell.<field>
    const auto rest = key.substr(8);
    const auto dot = rest.find('.');
    if (dot == std::string::npos || rest.compare(dot, 7, ".dwell.") != 0) err.fail("unknown key '" + key + "'");
    const int idx = err.number<int>(rest.substr(0, dot));
    const std::string field = rest.substr(dot + 7);
    if (idx < 0 || idx >= static_cast<int>(cfg.dwell_models.size())) err.fail("no station with index " + std::to_string(idx));
    auto& model = cfg.dwell_models[idx];
    if (field == "kind") {
        if (value == "constant") {
            if (!std::holds_alternative<ConstantDwell>(model)) model = ConstantDwell{};
        } else if (value == "bottleneck") {
            if (!std::holds_alternative<BottleneckDwell>(model)) model = BottleneckDwell{};
        } else {
            err.fail("dwell kind must be 'constant' or 'bottleneck'");
        }
        return;
    }
    if (field == "seconds") {
        auto* c = std::get_if<ConstantDwell>(&model);
        if (!c) err.fail("station " + std::to_string(idx) + " is not a constant-dwell station");
        c->seconds = err.number<int>(value);
        return;
    }
    auto* b = std::get_if<BottleneckDwell>(&model);
    if (!b) err.fail("station " + std::to_string(idx) + " is not a bottleneck station");
    if (field == "base") b->base_s = err.number<double>(value);
    else if (field == "critical_pax") b->critical_pax = err.number<double>(value);
    else if (field == "gamma") b->gamma = err.number<double>(value);
    else err.fail("unknown key '" + key + "'");
}

void apply_key(ScenarioConfig& cfg, const std::string& key, const std::string& value, const LineError& err) {
    auto& line = cfg.line;
    auto& d = cfg.demand;
    auto& inj = cfg.injection;
    if (key == "name") cfg.name = value;
    else if (key == "seed") cfg.rng_seed = err.number<std::uint64_t>(value);
    else if (key == "line.length") line.length_cells = err.number<int>(value);
    else if (key == "line.horizon") line.horizon_s = err.number<int>(value);
    else if (key == "line.v_max") line.v_max = err.number<int>(value);
    else if (key == "line.accel") line.accel = err.number<int>(value);
    else if (key == "line.decel") line.decel = err.number<int>(value);
    else if (key == "line.safety_margin") line.safety_margin = err.number<int>(value);
    else if (key == "line.stations") {
        line.station_positions = err.int_list(value);
        cfg.dwell_models.resize(line.station_positions.size(), ConstantDwell{30});
    }
    else if (key == "demand.initial") d.initial_rate = err.number<double>(value);
    else if (key == "demand.max") d.max_rate = err.number<double>(value);
    else if (key == "demand.increment") d.increment_per_step = err.number<double>(value);
    else if (key == "demand.cap") d.cap = value == "none" ? std::nullopt : std::optional<double>(err.number<double>(value));
    else if (key == "demand.run_scale_sd") d.run_scale_sd = err.number<double>(value);
    else if (key == "demand.step_noise_sd") d.step_noise_sd = err.number<double>(value);
    else if (key == "injection.start") inj.start_s = err.number<int>(value);
    else if (key == "injection.decrement") inj.decrement_s = err.number<int>(value);
    else if (key == "injection.period") inj.period_s = err.number<int>(value);
    else if (key == "injection.floor") inj.floor_s = err.number<int>(value);
    else if (key == "upstream_override.stations") {
        auto ids = err.int_list(value);
        if (ids.empty()) {
            cfg.upstream_dwell_override.reset();
        } else {
            if (!cfg.upstream_dwell_override) cfg.upstream_dwell_override = UpstreamDwellOverride{};
            cfg.upstream_dwell_override->station_indices = std::move(ids);
        }
    }
    else if (key == "upstream_override.seconds") {
        if (!cfg.upstream_dwell_override) cfg.upstream_dwell_override = UpstreamDwellOverride{};
        cfg.upstream_dwell_override->seconds = err.number<int>(value);
    }
    else if (key.rfind("station.", 0) == 0) apply_station_key(cfg, key, value, err);
    else err.fail("unknown key '" + key + "'");
}

}  // namespace

ScenarioConfig parse_scenario_config(std::istream& in) {
    ScenarioConfig cfg = default_scenario();
    std::string raw;
    int lineno = 0;
    bool seen_key = false;
    while (std::getline(in, raw)) {
        ++lineno;
        const LineError err{lineno};
        if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        const std::string text = trim(raw);
        if (text.empty()) continue;
        const auto eq = text.find('=');
        if (eq == std::string::npos) err.fail("expected 'key = value'");
        const std::string key = trim(text.substr(0, eq));
        const std::string value = trim(text.substr(eq + 1));
        if (key == "scenario") {
            if (seen_key) err.fail("'scenario' must precede all other keys");
            try {
                cfg = named_scenario(value);
            } catch (const ConfigError& e) {
                err.fail(e.what());
            }
        } else {
            apply_key(cfg, key, value, err);
        }
        seen_key = true;
    }
    cfg.validate();
    return cfg;
}

ScenarioConfig load_scenario_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open scenario file " + path);
    return parse_scenario_config(in);
}

std::string format_scenario_config(const ScenarioConfig& cfg) {
    std::ostringstream os;
    const auto& l = cfg.line;
    os << "name = " << cfg.name << "\n";
    os << "seed = " << cfg.rng_seed << "\n";
    os << "line.length = " << l.length_cells << "\n";
    os << "line.stations = ";
    for (std::size_t i = 0; i < l.station_positions.size(); ++i) os << (i ? "," : "") << l.station_positions[i];
    os << "\nline.horizon = " << l.horizon_s << "\n";
    os << "line.v_max = " << l.v_max << "\nline.accel = " << l.accel << "\nline.decel = " << l.decel << "\n";
    os << "line.safety_margin = " << l.safety_margin << "\n";
    for (std::size_t i = 0; i < cfg.dwell_models.size(); ++i) {
        const std::string p = "station." + std::to_string(i) + ".dwell.";
        if (const auto* c = std::get_if<ConstantDwell>(&cfg.dwell_models[i])) {
            os << p << "kind = constant\n" << p << "seconds = " << c->seconds << "\n";
        } else {
            const auto& b = std::get<BottleneckDwell>(cfg.dwell_models[i]);
            os << p << "kind = bottleneck\n" << p << "base = " << format_double(b.base_s) << "\n"
               << p << "critical_pax = " << format_double(b.critical_pax) << "\n"
               << p << "gamma = " << format_double(b.gamma) << "\n";
        }
    }
    const auto& d = cfg.demand;
    os << "demand.initial = " << format_double(d.initial_rate) << "\n";
    os << "demand.max = " << format_double(d.max_rate) << "\n";
    os << "demand.increment = " << format_double(d.increment_per_step) << "\n";
    os << "demand.cap = " << (d.cap ? format_double(*d.cap) : std::string("none")) << "\n";
    os << "demand.run_scale_sd = " << format_double(d.run_scale_sd) << "\n";
    os << "demand.step_noise_sd = " << format_double(d.step_noise_sd) << "\n";
    const auto& j = cfg.injection;
    os << "injection.start = " << j.start_s << "\ninjection.decrement = " << j.decrement_s
       << "\ninjection.period = " << j.period_s << "\ninjection.floor = " << j.floor_s << "\n";
    if (cfg.upstream_dwell_override) {
        os << "upstream_override.stations = ";
        const auto& ids = cfg.upstream_dwell_override->station_indices;
        for (std::size_t i = 0; i < ids.size(); ++i) os << (i ? "," : "") << ids[i];
        os << "\nupstream_override.seconds = " << cfg.upstream_dwell_override->seconds << "\n";
    } else {
        os << "upstream_override.stations = none\n";
    }
    return os.str();
}

void write_trajectory_csv(const TrajectoryLog& log, std::ostream& out) {
    out << "t,train,position,velocity\n";
    for (const auto& s : log.snapshots) out << s.t << ',' << s.train << ',' << s.position << ',' << s.velocity << '\n';
}

void write_events_csv(const TrajectoryLog& log, std::ostream& out) {
    out << "t,train,kind,station,movements,headway_s,dwell_s\n";
    for (const auto& e : log.events) {
        out << e.t << ',' << e.train << ',' << to_string(e.kind) << ',' << e.station << ','
            << format_double(e.movements) << ',' << e.headway_s << ',' << e.dwell_s << '\n';
    }
}

void write_time_space_svg(const TrajectoryLog& log, const std::string& title, const std::string& path) {
    std::map<int, std::pair<std::vector<double>, std::vector<double>>> paths;
    for (const auto& s : log.snapshots) {
        auto& [t, x] = paths[s.train];
        t.push_back(s.t);
        x.push_back(s.position);
    }
    SvgPlot plot(title, "time (s)", "position (m)", 1000, 620);
    plot.set_x_range(0, log.horizon_s);
    plot.set_y_range(0, log.length_cells);
    for (std::size_t i = 0; i < log.station_positions.size(); ++i) {
        const bool bottleneck = static_cast<int>(i) == log.bottleneck_station;
        plot.add_hrule(log.station_positions[i], bottleneck ? "#c0392b" : "#7f8c8d",
                       "Station " + std::to_string(i + 1) + (bottleneck ? " (bottleneck)" : ""));
    }
    for (const auto& [train, tx] : paths) plot.add_line(tx.first, tx.second, "#1f4e79", 0.9);
    plot.save(path);
}

}  // namespace metroflow::sim
