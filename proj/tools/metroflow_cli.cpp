// metroflow: simulation, data pipeline, NPIV estimation and benchmarking from the command line.
//
// Exit codes: 0 success, 2 usage or configuration error, 1 internal or numerical error.

#include <algorithm>
#include <atomic>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "metroflow/cli/manifest.hpp"
#include "metroflow/csv.hpp"
#include "metroflow/errors.hpp"
#include "metroflow/metrics/io.hpp"
#include "metroflow/npiv/gibbs.hpp"
#include "metroflow/npiv/io.hpp"
#include "metroflow/npiv/monte_carlo.hpp"
#include "metroflow/npiv/posterior.hpp"
#include "metroflow/pipeline/io.hpp"
#include "metroflow/pipeline/pipeline.hpp"
#include "metroflow/sim/io.hpp"
#include "metroflow/sim/scenarios.hpp"
#include "metroflow/sim/simulator.hpp"

#ifndef METROFLOW_VERSION
#define METROFLOW_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using namespace metroflow;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitInternal = 1;

// Runs tasks on up to `jobs` threads; the first exception (in task order) is rethrown.
void run_parallel(const std::vector<std::function<void()>>& tasks, int jobs) {
    std::vector<std::exception_ptr> errors(tasks.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < tasks.size(); k = next++) {
            try {
                tasks[k]();
            } catch (...) {
                errors[k] = std::current_exception();
            }
        }
    };
    const int n = std::clamp(jobs, 1, static_cast<int>(std::max<std::size_t>(tasks.size(), 1)));
    std::vector<std::thread> pool;
    for (int i = 1; i < n; ++i) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

std::ofstream open_out(const fs::path& path) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path.string());
    return out;
}

struct Context {
    std::vector<std::string> args;
    cli::RunManifest manifest;

    void add_input(const std::string& path) { manifest.inputs.push_back({path, cli::sha256_file(path)}); }

    void finish(const std::string& out_dir) {
        manifest.out_dir = out_dir;
        manifest.args = args;
        manifest.tool_version = METROFLOW_VERSION;
        manifest.outputs = cli::hash_outputs(out_dir);
        open_out(fs::path(out_dir) / "manifest.json") << manifest.to_json();
    }
};

// ---------------------------------------------------------------------------------------------
// simulate

struct SimulateArgs {
    std::string config;
    std::vector<std::string> scenarios;
    std::optional<double> critical_pax;
    std::optional<std::uint64_t> seed;
    std::string out;
    int window = 11;
    int jobs = 1;
};

void simulate_one(const sim::ScenarioConfig& cfg, const fs::path& dir, int window) {
    const auto log = sim::run_scenario(cfg);
    fs::create_directories(dir);
    {
        auto out = open_out(dir / "trajectory.csv");
        sim::write_trajectory_csv(log, out);
    }
    {
        auto out = open_out(dir / "events.csv");
        sim::write_events_csv(log, out);
    }
    const auto summary = metrics::summarize(cfg.name, log, window);
    {
        auto out = open_out(dir / "metrics.csv");
        metrics::write_throughput_table_csv(std::span(&summary, 1), out);
    }
    std::vector<metrics::FlowPoint> series;
    if (log.bottleneck_station >= 0) {
        try {
            series = metrics::station_flow_series(log, log.bottleneck_station);
        } catch (const InsufficientDataError&) {
        }
    }
    {
        auto out = open_out(dir / "flow.csv");
        metrics::write_flow_series_csv(series, window, out);
    }
    sim::write_time_space_svg(log, "Train trajectories: " + cfg.name, (dir / "time_space.svg").string());
    metrics::write_flow_diagram_svg(series, window, "Bottleneck flow vs movements: " + cfg.name,
                                    (dir / "flow_diagram.svg").string());
}

int cmd_simulate(const SimulateArgs& a, Context& ctx) {
    if (!a.config.empty() && !a.scenarios.empty()) throw ConfigError("give either --config or --scenario, not both");
    std::vector<sim::ScenarioConfig> configs;
    if (!a.config.empty()) {
        configs.push_back(sim::load_scenario_config(a.config));
        ctx.add_input(a.config);
        ctx.manifest.config_path = a.config;
    } else {
        const auto names = a.scenarios.empty() ? std::vector<std::string>{"no-control"} : a.scenarios;
        for (const auto& n : names) {
            configs.push_back(a.critical_pax ? sim::named_scenario(n, *a.critical_pax) : sim::named_scenario(n));
        }
    }
    for (auto& c : configs) {
        if (a.config.empty() && a.critical_pax) c.validate();
        if (a.seed) c.rng_seed = *a.seed;
    }
    ctx.manifest.seed = configs.front().rng_seed;
    const bool nested = configs.size() > 1;
    std::vector<std::function<void()>> tasks;
    for (const auto& c : configs) {
        const fs::path dir = nested ? fs::path(a.out) / c.name : fs::path(a.out);
        tasks.emplace_back([c, dir, w = a.window] { simulate_one(c, dir, w); });
    }
    run_parallel(tasks, a.jobs);
    for (const auto& c : configs) {
        const fs::path dir = nested ? fs::path(a.out) / c.name : fs::path(a.out);
        std::ifstream in(dir / "metrics.csv");
        std::string header, row;
        std::getline(in, header);
        std::getline(in, row);
        std::cout << row << "\n";
    }
    ctx.finish(a.out);
    return 0;
}

// ---------------------------------------------------------------------------------------------
// calibrate

struct CalibrateArgs {
    double target = 580.0;
    double from = 300.0, to = 700.0, step = 1.0;
    int window = 11;
    int jobs = 1;
    std::string out;
};

int cmd_calibrate(const CalibrateArgs& a, Context& ctx) {
    if (!(a.step > 0) || a.to < a.from) throw ConfigError("need --from <= --to and a positive --step");
    std::vector<double> candidates;
    for (int k = 0; a.from + k * a.step <= a.to + 1e-9; ++k) candidates.push_back(a.from + k * a.step);
    const auto result = metrics::calibrate_critical_pax(a.target, candidates, a.window, a.jobs);
    fs::create_directories(a.out);
    {
        auto out = open_out(fs::path(a.out) / "calibration.csv");
        metrics::write_calibration_csv(result, out);
    }
    std::cout << "selected critical_pax = " << format_double(result.critical_pax) << "\n";
    ctx.finish(a.out);
    return 0;
}

// ---------------------------------------------------------------------------------------------
// estimate

struct EstimateArgs {
    std::vector<std::string> samples;
    std::string mode = "iv";
    std::string out;
    std::string profile = "default";
    std::optional<int> draws, burn, thin;
    std::uint64_t seed = 1;
    double delta = 0.05;
    double interval_minutes = 10.0;
    std::string station, direction;
    int grid_points = 200;
    int knots = 20;
    int jobs = 1;
};

npiv::McmcConfig mcmc_from(const EstimateArgs& a) {
    npiv::McmcConfig m;
    if (a.profile == "fast") m = npiv::McmcConfig::fast();
    else if (a.profile == "paper") m = npiv::McmcConfig::long_run();
    else if (a.profile != "default") throw ConfigError("unknown --profile '" + a.profile + "' (default, fast or paper)");
    if (a.draws) m.total_draws = *a.draws;
    if (a.burn) m.burn_in = *a.burn;
    if (a.thin) m.thin = *a.thin;
    m.seed = a.seed;
    m.validate();
    return m;
}

void write_band(const npiv::PosteriorDraws& d, npiv::Curve which, double delta, const fs::path& path) {
    const auto mean = npiv::posterior_mean_curve(d, which);
    const auto band = npiv::simultaneous_band(d, which, delta);
    auto out = open_out(path);
    npiv::write_curve_csv(mean, band, out);
}

std::string estimate_one(const std::vector<npiv::NpivSample>& samples, npiv::NpivMode mode, const EstimateArgs& a,
                         const npiv::McmcConfig& mcmc, const std::string& station, const fs::path& dir) {
    auto spec = npiv::default_model_spec(samples, mode);
    spec.grid_points = a.grid_points;
    spec.second_stage_basis.num_interior_knots = a.knots;
    spec.first_stage_basis.num_interior_knots = a.knots;
    spec.control_fn_basis.num_interior_knots = a.knots;
    const auto draws = npiv::gibbs_fit(samples, spec, npiv::DpmHyperparams{}, mcmc);
    fs::create_directories(dir);
    write_band(draws, npiv::Curve::S, a.delta, dir / "s_curve.csv");
    if (mode == npiv::NpivMode::IV) {
        write_band(draws, npiv::Curve::H, a.delta, dir / "h_curve.csv");
        write_band(draws, npiv::Curve::Nu, a.delta, dir / "nu_curve.csv");
    }
    const auto report = npiv::extract_optimum(draws, a.delta, station, a.direction, a.interval_minutes);
    open_out(dir / "report.json") << npiv::report_to_json(report, draws.count(), mode);
    std::vector<double> nx, qy;
    for (const auto& s : samples) {
        nx.push_back(s.n);
        qy.push_back(s.q);
    }
    const auto mean = npiv::posterior_mean_curve(draws, npiv::Curve::S);
    const auto band = npiv::simultaneous_band(draws, npiv::Curve::S, a.delta);
    npiv::write_curve_svg("Flow vs movements (" + npiv::to_string(mode) + ")" + (station.empty() ? "" : ": " + station),
                          "movements per train", "flow", mean, band, nx, qy, &report, (dir / "s_curve.svg").string());
    char line[256];
    std::snprintf(line, sizeof line, "%s %s: optimum %.1f pax/train, max flow %.3f, min headway %.2f min, backward bend %s, %d draws",
                  station.c_str(), npiv::to_string(mode).c_str(), report.optimum_movements, report.max_flow,
                  report.min_headway_minutes, report.significant_backward_bend ? "yes" : "no", draws.count());
    return line;
}

int cmd_estimate(const EstimateArgs& a, Context& ctx) {
    if (a.samples.empty()) throw ConfigError("--samples is required");
    std::vector<npiv::NpivMode> modes;
    if (a.mode == "both") modes = {npiv::NpivMode::IV, npiv::NpivMode::NonIV};
    else modes = {npiv::parse_mode(a.mode)};
    const auto mcmc = mcmc_from(a);
    ctx.manifest.seed = mcmc.seed;
    const bool need_z = std::find(modes.begin(), modes.end(), npiv::NpivMode::IV) != modes.end();

    std::vector<std::vector<npiv::NpivSample>> data;
    for (const auto& path : a.samples) {
        try {
            data.push_back(npiv::read_samples_csv_file(path, need_z));
        } catch (const ConfigError& e) {
            throw ConfigError(path + ": " + e.what());
        }
        ctx.add_input(path);
    }
    std::vector<std::string> lines(a.samples.size() * modes.size());
    std::vector<std::function<void()>> tasks;
    for (std::size_t f = 0; f < a.samples.size(); ++f) {
        const std::string stem = fs::path(a.samples[f]).stem().string();
        const std::string station = a.station.empty() ? stem : a.station;
        for (std::size_t m = 0; m < modes.size(); ++m) {
            fs::path dir = a.out;
            if (a.samples.size() > 1) dir /= stem;
            if (modes.size() > 1) dir /= npiv::to_string(modes[m]);
            const std::size_t slot = f * modes.size() + m;
            tasks.emplace_back([&, f, m, slot, station, dir] {
                lines[slot] = estimate_one(data[f], modes[m], a, mcmc, station, dir);
            });
        }
    }
    run_parallel(tasks, a.jobs);
    for (const auto& l : lines) std::cout << l << "\n";
    ctx.finish(a.out);
    return 0;
}

// ---------------------------------------------------------------------------------------------
// benchmark

struct BenchmarkArgs {
    std::uint64_t seed = 2024;
    std::string profile = "fast";
    int n = 10000;
    double error = 0.5;
    bool error_is_sd = false;
    std::string out;
};

int cmd_benchmark(const BenchmarkArgs& a, Context& ctx) {
    npiv::MonteCarloConfig cfg;
    cfg.seed = a.seed;
    cfg.n = a.n;
    cfg.error_spread = a.error;
    cfg.error_is_sd = a.error_is_sd;
    if (a.profile == "fast") cfg.mcmc = npiv::McmcConfig::fast();
    else if (a.profile == "paper") cfg.mcmc = npiv::McmcConfig::long_run();
    else throw ConfigError("unknown --profile '" + a.profile + "' (fast or paper)");
    cfg.mcmc.seed = a.seed;
    ctx.manifest.seed = a.seed;
    const auto res = npiv::run_monte_carlo(cfg);
    fs::create_directories(a.out);
    {
        auto out = open_out(fs::path(a.out) / "benchmark.csv");
        npiv::write_benchmark_csv(res, out);
    }
    {
        auto out = open_out(fs::path(a.out) / "overlay.csv");
        npiv::write_overlay_csv(res, out);
    }
    npiv::write_overlay_svg(res, (fs::path(a.out) / "overlay.svg").string());
    for (const auto& r : res.rows) std::cout << r.name << "," << format_double(r.rmse) << "\n";
    std::cout << "retained draws: " << res.retained_draws << "\n";
    ctx.finish(a.out);
    const bool ordered = res.rmse(npiv::kBayesNpiv) < res.rmse(npiv::kBayesNp);
    std::cout << "RMSE(bayes-npiv) < RMSE(bayes-np): " << (ordered ? "yes" : "NO") << "\n";
    return ordered ? 0 : kExitInternal;
}

// ---------------------------------------------------------------------------------------------
// pipeline

struct PipelineArgs {
    std::string events, synthetic, simulate, calendar, out;
    int days = 60;
    std::uint64_t seed = 1;
    double window = 600.0;
    std::optional<double> origin;
    double confounding = 0.0;
    std::optional<int> injection_floor;
    double run_scale_sd = 0.15;
    double step_noise_sd = 0.05;
};

int cmd_pipeline(const PipelineArgs& a, Context& ctx) {
    const int sources = !a.events.empty() + !a.synthetic.empty() + !a.simulate.empty();
    if (sources != 1) throw ConfigError("give exactly one of --events, --synthetic or --simulate");
    if (!a.events.empty() && a.calendar.empty()) throw ConfigError("--calendar is required with --events");
    fs::create_directories(a.out);
    const fs::path out(a.out);

    std::vector<pipeline::ArrivalEvent> events;
    std::optional<pipeline::WorkdayCalendar> calendar;
    double origin = 0.0;
    if (!a.events.empty()) {
        std::ifstream in(a.events);
        if (!in) throw ConfigError("cannot open event file " + a.events);
        events = pipeline::read_events_csv(in);
        ctx.add_input(a.events);
    } else if (!a.synthetic.empty()) {
        pipeline::SyntheticOptions opt;
        opt.confounding = a.confounding;
        auto data = pipeline::generate_synthetic(pipeline::named_profile(a.synthetic), a.days, a.seed, opt);
        events = std::move(data.events);
        calendar = std::move(data.calendar);
        origin = opt.service_start_s;
    } else {
        sim::ScenarioConfig cfg;
        if (fs::is_regular_file(a.simulate)) {
            cfg = sim::load_scenario_config(a.simulate);
            ctx.add_input(a.simulate);
            ctx.manifest.config_path = a.simulate;
        } else {
            cfg = sim::named_scenario(a.simulate);
            cfg.demand.run_scale_sd = a.run_scale_sd;
            cfg.demand.step_noise_sd = a.step_noise_sd;
        }
        if (a.injection_floor) cfg.injection.floor_s = *a.injection_floor;
        cfg.validate();
        auto data = pipeline::simulate_service_days(cfg, a.days, a.seed);
        events = std::move(data.events);
        calendar = std::move(data.calendar);
    }
    if (a.events.empty()) {
        ctx.manifest.seed = a.seed;
        auto ev = open_out(out / "events.csv");
        pipeline::write_events_csv(events, ev);
    }
    if (!a.calendar.empty()) {
        calendar = pipeline::WorkdayCalendar::load(a.calendar);
        ctx.add_input(a.calendar);
    }
    {
        auto cal = open_out(out / "calendar.txt");
        calendar->write(cal);
    }
    const auto agg = pipeline::aggregate_intervals(events, {a.window, a.origin.value_or(origin)});
    {
        auto o = open_out(out / "intervals.csv");
        pipeline::write_observations_csv(agg.observations, o);
    }
    const auto inst = pipeline::build_instruments(agg.observations, *calendar);
    {
        auto o = open_out(out / "instruments.csv");
        pipeline::write_instruments_csv(inst, o);
    }
    std::cout << agg.observations.size() << " windows kept, " << agg.dropped_windows << " dropped (fewer than 2 arrivals), "
              << inst.size() << " instrumented samples\n";
    if (!agg.observations.empty()) {
        std::vector<double> n, q;
        for (const auto& o : agg.observations) {
            n.push_back(o.movements);
            q.push_back(o.flow);
        }
        const auto mn = pipeline::moments(n), mq = pipeline::moments(q);
        std::printf("movements mean %.2f sd %.2f; flow mean %.3f sd %.3f\n", mn.mean, mn.sd, mq.mean, mq.sd);
    }
    ctx.finish(a.out);
    return 0;
}

// ---------------------------------------------------------------------------------------------
// replay

int run(const std::vector<std::string>& args);

int cmd_replay(const std::string& manifest_path, const std::string& out) {
    const auto m = cli::RunManifest::load(manifest_path);
    for (const auto& in : m.inputs) {
        if (cli::sha256_file(in.path) != in.sha256) throw ConfigError("input changed since the recorded run: " + in.path);
    }
    auto args = m.args;
    bool replaced = false;
    for (std::size_t i = 0; i + 1 < args.size(); ++i) {
        if (args[i] == "--out") {
            args[i + 1] = out;
            replaced = true;
        }
    }
    for (auto& arg : args) {
        if (arg.rfind("--out=", 0) == 0) {
            arg = "--out=" + out;
            replaced = true;
        }
    }
    if (!replaced) throw ConfigError("manifest has no --out argument");
    const int code = run(args);
    if (code != 0) return code;
    const auto now = cli::hash_outputs(out);
    bool same = now.size() == m.outputs.size();
    for (std::size_t i = 0; same && i < now.size(); ++i) same = now[i].path == m.outputs[i].path && now[i].sha256 == m.outputs[i].sha256;
    std::cout << (same ? "replay matches the recorded outputs\n" : "replay DIFFERS from the recorded outputs\n");
    return same ? 0 : kExitInternal;
}

// ---------------------------------------------------------------------------------------------

int run(const std::vector<std::string>& args) {
    CLI::App app{"metroflow: metro bottleneck simulation and NPIV estimation"};
    app.name("metroflow");
    app.set_version_flag("--version", METROFLOW_VERSION);
    app.require_subcommand(1);

    SimulateArgs sim_a;
    auto* simulate = app.add_subcommand("simulate", "Run line scenarios and write trajectories, metrics and plots");
    simulate->add_option("--config", sim_a.config, "Scenario file (key = value lines)");
    simulate->add_option("--scenario", sim_a.scenarios, "Named scenario (repeatable)")
        ->check(CLI::IsMember(sim::scenario_names()));
    simulate->add_option("--critical-pax", sim_a.critical_pax, "Bottleneck critical passenger number for named scenarios");
    simulate->add_option("--seed", sim_a.seed, "RNG seed for demand noise");
    simulate->add_option("--window", sim_a.window, "Moving-average window for the flow optimum");
    simulate->add_option("--jobs", sim_a.jobs, "Scenarios simulated concurrently");
    simulate->add_option("--out", sim_a.out, "Output directory")->required();

    CalibrateArgs cal_a;
    auto* calibrate = app.add_subcommand("calibrate", "Sweep the critical passenger number against a target optimum");
    calibrate->add_option("--target", cal_a.target, "Target optimum movements per train");
    calibrate->add_option("--from", cal_a.from);
    calibrate->add_option("--to", cal_a.to);
    calibrate->add_option("--step", cal_a.step);
    calibrate->add_option("--window", cal_a.window);
    calibrate->add_option("--jobs", cal_a.jobs);
    calibrate->add_option("--out", cal_a.out, "Output directory")->required();

    EstimateArgs est_a;
    auto* estimate = app.add_subcommand("estimate", "Fit the spline NPIV model to (q, n, z) samples");
    estimate->add_option("--samples", est_a.samples, "Samples CSV with columns q,n,z (repeatable)")->required();
    estimate->add_option("--mode", est_a.mode, "iv, noniv or both")->check(CLI::IsMember({"iv", "noniv", "non-iv", "both"}));
    estimate->add_option("--profile", est_a.profile, "MCMC preset: default (50000/15000/10), fast or paper");
    estimate->add_option("--draws", est_a.draws, "Total MCMC sweeps");
    estimate->add_option("--burn", est_a.burn, "Burn-in sweeps");
    estimate->add_option("--thin", est_a.thin, "Keep every thin-th sweep");
    estimate->add_option("--seed", est_a.seed);
    estimate->add_option("--delta", est_a.delta, "Band level: 1 - delta simultaneous coverage");
    estimate->add_option("--interval-minutes", est_a.interval_minutes);
    estimate->add_option("--station", est_a.station);
    estimate->add_option("--direction", est_a.direction);
    estimate->add_option("--grid-points", est_a.grid_points);
    estimate->add_option("--knots", est_a.knots, "Interior knots per spline");
    estimate->add_option("--jobs", est_a.jobs, "Fits run concurrently");
    estimate->add_option("--out", est_a.out, "Output directory")->required();

    BenchmarkArgs bench_a;
    auto* benchmark = app.add_subcommand("benchmark", "Monte Carlo comparison of 2SLS, Bayes NP and Bayes NPIV");
    benchmark->add_option("--seed", bench_a.seed);
    benchmark->add_option("--profile", bench_a.profile, "fast (4000/1000/4) or paper (40000/10000/40)");
    benchmark->add_option("--n", bench_a.n, "Sample size");
    benchmark->add_option("--error", bench_a.error, "Error variance (or sd with --error-is-sd)");
    benchmark->add_flag("--error-is-sd", bench_a.error_is_sd);
    benchmark->add_option("--out", bench_a.out, "Output directory")->required();

    PipelineArgs pipe_a;
    auto* pipe = app.add_subcommand("pipeline", "Aggregate arrivals into 10-minute windows and attach instruments");
    pipe->add_option("--events", pipe_a.events, "Arrival event CSV");
    pipe->add_option("--synthetic", pipe_a.synthetic, "Built-in station profile, e.g. prince-edward-down");
    pipe->add_option("--simulate", pipe_a.simulate, "Scenario name or scenario file, simulated once per day");
    pipe->add_option("--calendar", pipe_a.calendar, "Workday calendar (one ISO date per line)");
    pipe->add_option("--days", pipe_a.days);
    pipe->add_option("--seed", pipe_a.seed);
    pipe->add_option("--window", pipe_a.window, "Window length in seconds");
    pipe->add_option("--origin", pipe_a.origin, "Start of window 0, seconds after midnight");
    pipe->add_option("--confounding", pipe_a.confounding, "Synthetic unobserved control strength");
    pipe->add_option("--injection-floor", pipe_a.injection_floor, "Minimum departure interval for --simulate");
    pipe->add_option("--run-scale-sd", pipe_a.run_scale_sd, "Day-level demand noise for named --simulate scenarios");
    pipe->add_option("--step-noise-sd", pipe_a.step_noise_sd, "Per-second demand noise for named --simulate scenarios");
    pipe->add_option("--out", pipe_a.out, "Output directory")->required();

    std::string manifest_path, replay_out;
    auto* replay = app.add_subcommand("replay", "Re-run a recorded manifest and compare output hashes");
    replay->add_option("manifest", manifest_path)->required();
    replay->add_option("--out", replay_out, "Output directory for the replay")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    Context ctx;
    ctx.args = args;
    try {
        if (*simulate) return ctx.manifest.command = "simulate", cmd_simulate(sim_a, ctx);
        if (*calibrate) return ctx.manifest.command = "calibrate", cmd_calibrate(cal_a, ctx);
        if (*estimate) return ctx.manifest.command = "estimate", cmd_estimate(est_a, ctx);
        if (*benchmark) return ctx.manifest.command = "benchmark", cmd_benchmark(bench_a, ctx);
        if (*pipe) return ctx.manifest.command = "pipeline", cmd_pipeline(pipe_a, ctx);
        if (*replay) return cmd_replay(manifest_path, replay_out);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const InsufficientDataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(args);
}
