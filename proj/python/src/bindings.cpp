#include <optional>
#include <string>
#include <vector>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "metroflow/errors.hpp"
#include "metroflow/metrics/io.hpp"
#include "metroflow/metrics/metrics.hpp"
#include "metroflow/npiv/gibbs.hpp"
#include "metroflow/npiv/monte_carlo.hpp"
#include "metroflow/npiv/posterior.hpp"
#include "metroflow/npiv/tsls.hpp"
#include "metroflow/pipeline/pipeline.hpp"
#include "metroflow/sim/scenarios.hpp"
#include "metroflow/sim/simulator.hpp"
#include "metroflow/splines/bspline.hpp"

namespace py = pybind11;
using namespace metroflow;

namespace {

py::dict curve_dict(const npiv::PosteriorDraws& d, npiv::Curve which, double delta) {
    const auto band = npiv::simultaneous_band(d, which, delta);
    py::dict out;
    out["grid"] = band.grid;
    out["mean"] = npiv::posterior_mean_curve(d, which);
    out["lower"] = band.lower;
    out["upper"] = band.upper;
    out["contained"] = band.contained;
    return out;
}

py::dict report_dict(const npiv::BottleneckReport& r) {
    py::dict out;
    out["optimum_movements"] = r.optimum_movements;
    out["max_flow"] = r.max_flow;
    out["interval_minutes"] = r.interval_minutes;
    out["min_headway_minutes"] = r.min_headway_minutes;
    out["significant_backward_bend"] = r.significant_backward_bend;
    out["support"] = py::make_tuple(r.support_lo, r.support_hi);
    out["delta"] = r.delta;
    return out;
}

py::dict summary_dict(const metrics::ScenarioSummary& s) {
    py::dict out;
    out["scenario"] = s.scenario;
    out["throughput_per_hour"] = s.throughput;
    out["queueing_detected"] = s.queue.detected;
    out["first_queue_t"] = s.queue.first_time ? py::cast(*s.queue.first_time) : py::none();
    if (s.optimum) {
        out["max_flow"] = s.optimum->max_flow;
        out["optimum_movements"] = s.optimum->movements;
    } else {
        out["max_flow"] = py::none();
        out["optimum_movements"] = py::none();
    }
    return out;
}

py::dict simulate(const std::string& scenario, std::optional<double> critical_pax, std::optional<std::uint64_t> seed,
                  int window) {
    auto cfg = critical_pax ? sim::named_scenario(scenario, *critical_pax) : sim::named_scenario(scenario);
    if (seed) cfg.rng_seed = *seed;
    cfg.validate();
    sim::TrajectoryLog log;
    metrics::ScenarioSummary summary;
    std::vector<metrics::FlowPoint> series;
    {
        py::gil_scoped_release release;
        log = sim::run_scenario(cfg);
        summary = metrics::summarize(cfg.name, log, window);
        if (log.bottleneck_station >= 0) {
            try {
                series = metrics::station_flow_series(log, log.bottleneck_station);
            } catch (const InsufficientDataError&) {
            }
        }
    }
    Eigen::Matrix<int, Eigen::Dynamic, 4, Eigen::RowMajor> snaps(static_cast<Eigen::Index>(log.snapshots.size()), 4);
    for (std::size_t k = 0; k < log.snapshots.size(); ++k) {
        const auto& s = log.snapshots[k];
        snaps.row(static_cast<Eigen::Index>(k)) << s.t, s.train, s.position, s.velocity;
    }
    std::vector<double> n, q;
    std::vector<int> t;
    for (const auto& p : series) {
        n.push_back(p.movements);
        q.push_back(p.flow);
        t.push_back(p.t);
    }
    py::dict out = summary_dict(summary);
    out["snapshots"] = snaps;
    out["flow_series"] = py::dict(py::arg("t") = t, py::arg("movements") = n, py::arg("flow") = q);
    return out;
}

py::dict calibrate(double target, const std::vector<double>& candidates, int window, int jobs) {
    metrics::CalibrationResult res;
    {
        py::gil_scoped_release release;
        res = metrics::calibrate_critical_pax(target, candidates, window, jobs);
    }
    std::vector<double> cp, opt, tp;
    for (const auto& r : res.rows) {
        cp.push_back(r.critical_pax);
        opt.push_back(r.optimum.movements);
        tp.push_back(r.throughput);
    }
    return py::dict(py::arg("critical_pax") = res.critical_pax, py::arg("candidates") = cp,
                    py::arg("optimum_movements") = opt, py::arg("throughput") = tp);
}

py::dict fit_npiv(const std::vector<double>& q, const std::vector<double>& n, std::optional<std::vector<double>> z,
                  const std::string& mode_name, int draws, int burn, int thin, std::uint64_t seed, double delta,
                  int knots, int grid_points) {
    const auto mode = npiv::parse_mode(mode_name);
    if (q.size() != n.size()) throw DomainError("q and n differ in length");
    if (mode == npiv::NpivMode::IV && !z) throw ConfigError("IV mode needs an instrument z");
    if (z && z->size() != n.size()) throw DomainError("z and n differ in length");
    std::vector<npiv::NpivSample> samples(n.size());
    for (std::size_t i = 0; i < n.size(); ++i) samples[i] = {q[i], n[i], z ? (*z)[i] : n[i]};
    auto spec = npiv::default_model_spec(samples, mode);
    spec.grid_points = grid_points;
    spec.second_stage_basis.num_interior_knots = knots;
    spec.first_stage_basis.num_interior_knots = knots;
    spec.control_fn_basis.num_interior_knots = knots;
    const npiv::McmcConfig mcmc{draws, burn, thin, seed};
    mcmc.validate();
    npiv::PosteriorDraws d;
    {
        py::gil_scoped_release release;
        d = npiv::gibbs_fit(samples, spec, npiv::DpmHyperparams{}, mcmc);
    }
    py::dict out;
    out["mode"] = npiv::to_string(mode);
    out["retained_draws"] = d.count();
    out["s"] = curve_dict(d, npiv::Curve::S, delta);
    if (mode == npiv::NpivMode::IV) {
        out["h"] = curve_dict(d, npiv::Curve::H, delta);
        out["nu"] = curve_dict(d, npiv::Curve::Nu, delta);
        const auto rel = npiv::first_stage_relevance(d, delta);
        out["relevance"] = py::dict(py::arg("rank_correlation") = rel.rank_correlation,
                                    py::arg("secant_slope") = rel.secant_slope);
    }
    out["report"] = report_dict(npiv::extract_optimum(d, delta));
    return out;
}

py::dict fit_2sls(const std::vector<double>& y, const std::vector<double>& x, const std::vector<double>& z,
                  const std::vector<int>& powers, int instrument_degree) {
    const auto r = npiv::fit_2sls(y, x, z, npiv::TslsSpec{powers, instrument_degree});
    std::vector<double> se(static_cast<std::size_t>(r.coef.size()));
    for (Eigen::Index k = 0; k < r.coef.size(); ++k) se[static_cast<std::size_t>(k)] = r.se(k);
    return py::dict(py::arg("coef") = r.coef, py::arg("se") = se, py::arg("sigma2") = r.sigma2);
}

py::dict monte_carlo(std::uint64_t seed, int n, const std::string& profile, double error_spread, bool error_is_sd) {
    npiv::MonteCarloConfig cfg;
    cfg.seed = seed;
    cfg.n = n;
    cfg.error_spread = error_spread;
    cfg.error_is_sd = error_is_sd;
    if (profile == "fast") cfg.mcmc = npiv::McmcConfig::fast(seed);
    else if (profile == "paper") cfg.mcmc = npiv::McmcConfig::long_run(seed);
    else throw ConfigError("unknown profile '" + profile + "' (fast or paper)");
    npiv::MonteCarloResult res;
    {
        py::gil_scoped_release release;
        res = npiv::run_monte_carlo(cfg);
    }
    py::dict rmse, curves;
    for (const auto& r : res.rows) rmse[py::str(r.name)] = r.rmse;
    for (const auto& [name, c] : res.curves) curves[py::str(name)] = c;
    return py::dict(py::arg("rmse") = rmse, py::arg("grid") = res.grid, py::arg("curves") = curves,
                    py::arg("retained_draws") = res.retained_draws);
}

py::dict synthetic_samples(const std::string& profile, int days, std::uint64_t seed, double confounding) {
    pipeline::SyntheticOptions opt;
    opt.confounding = confounding;
    std::vector<pipeline::InstrumentedSample> inst;
    {
        py::gil_scoped_release release;
        const auto data = pipeline::generate_synthetic(pipeline::named_profile(profile), days, seed, opt);
        const auto agg = pipeline::aggregate_intervals(data.events, {opt.window_s, opt.service_start_s});
        inst = pipeline::build_instruments(agg.observations, data.calendar);
    }
    std::vector<double> q, n, z;
    std::vector<int> day, interval;
    for (const auto& s : inst) {
        q.push_back(s.q);
        n.push_back(s.n);
        z.push_back(s.z);
        day.push_back(s.day);
        interval.push_back(s.interval);
    }
    return py::dict(py::arg("q") = q, py::arg("n") = n, py::arg("z") = z, py::arg("day") = day,
                    py::arg("interval") = interval);
}

Eigen::MatrixXd basis(const std::vector<double>& x, int degree, int knots, double lo, double hi) {
    splines::SplineBasisSpec spec;
    spec.degree = degree;
    spec.num_interior_knots = knots;
    spec.lo = lo;
    spec.hi = hi;
    spec.validate();
    return splines::basis_matrix(x, spec);
}

}  // namespace

PYBIND11_MODULE(_metroflow, m) {
    m.doc() = "Metro bottleneck simulation and spline NPIV estimation";

    auto base = py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<InsufficientDataError>(m, "InsufficientDataError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
    py::register_exception<CollisionError>(m, "CollisionError", PyExc_RuntimeError);
    (void)base;

    m.attr("CALIBRATED_CRITICAL_PAX") = sim::kCalibratedCriticalPax;

    m.def("scenario_names", &sim::scenario_names, "Names accepted by simulate().");
    m.def("simulate", &simulate, py::arg("scenario") = "no-control", py::arg("critical_pax") = py::none(),
          py::arg("seed") = py::none(), py::arg("window") = 11,
          "Run a named scenario. Returns the summary, the (t, train, position, velocity) snapshots and the "
          "bottleneck flow series.");
    m.def("calibrate", &calibrate, py::arg("target") = 580.0, py::arg("candidates"), py::arg("window") = 11,
          py::arg("jobs") = 1);
    m.def("fit_npiv", &fit_npiv, py::arg("q"), py::arg("n"), py::arg("z") = py::none(), py::arg("mode") = "iv",
          py::arg("draws") = 4000, py::arg("burn") = 1000, py::arg("thin") = 4, py::arg("seed") = 1,
          py::arg("delta") = 0.05, py::arg("knots") = 20, py::arg("grid_points") = 200,
          "Bayesian spline fit of flow q on movements n, instrumented by z in IV mode.");
    m.def("fit_2sls", &fit_2sls, py::arg("y"), py::arg("x"), py::arg("z"), py::arg("powers") = std::vector<int>{1},
          py::arg("instrument_degree") = 1);
    m.def("monte_carlo", &monte_carlo, py::arg("seed") = 2024, py::arg("n") = 10000, py::arg("profile") = "fast",
          py::arg("error_spread") = 0.5, py::arg("error_is_sd") = false);
    m.def("synthetic_samples", &synthetic_samples, py::arg("profile") = "prince-edward-down", py::arg("days") = 60,
          py::arg("seed") = 1, py::arg("confounding") = 0.0,
          "Synthetic arrivals for a built-in station profile, aggregated and paired with previous-workday "
          "instruments.");
    m.def("bspline_basis", &basis, py::arg("x"), py::arg("degree") = 3, py::arg("knots") = 20, py::arg("lo") = 0.0,
          py::arg("hi") = 1.0);
    m.def("difference_penalty", &splines::difference_penalty, py::arg("basis_count"), py::arg("order") = 2);
    m.def("spearman", [](const std::vector<double>& a, const std::vector<double>& b) { return npiv::spearman(a, b); });
}
