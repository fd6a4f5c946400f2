#include "metroflow/npiv/monte_carlo.hpp"

#include <cmath>
#include <random>

#include "metroflow/errors.hpp"
#include "metroflow/npiv/posterior.hpp"

namespace metroflow::npiv {

double true_structural(double x) { return -40.0 * std::pow(x, 4) + 40.0 * std::pow(x, 3); }

double MonteCarloConfig::error_sd() const { return error_is_sd ? error_spread : std::sqrt(error_spread); }

MonteCarloData generate_monte_carlo_data(const MonteCarloConfig& cfg) {
    if (cfg.n < kMinSamples) throw ConfigError("Monte Carlo sample size below " + std::to_string(kMinSamples));
    if (!(cfg.error_spread > 0)) throw ConfigError("error spread must be positive");
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::normal_distribution<double> err(0.0, cfg.error_sd());
    MonteCarloData d;
    d.y.resize(cfg.n);
    d.x.resize(cfg.n);
    d.z.resize(cfg.n);
    d.w.resize(cfg.n);
    for (int i = 0; i < cfg.n; ++i) {
        d.z[i] = unif(rng);
        d.w[i] = unif(rng);
        const double e1 = err(rng);
        const double e2 = err(rng);
        d.x[i] = 3.5 * d.z[i] + 2.1 * d.w[i] + e1;
        d.y[i] = true_structural(d.x[i]) + 30.0 * std::pow(d.w[i], 4) + e2;
    }
    return d;
}

double centred_rmse(const std::vector<double>& estimate, const std::vector<double>& truth) {
    if (estimate.size() != truth.size() || estimate.empty()) throw DomainError("curve sizes differ");
    double mean_diff = 0.0;
    for (std::size_t g = 0; g < truth.size(); ++g) mean_diff += estimate[g] - truth[g];
    mean_diff /= truth.size();
    double ss = 0.0;
    for (std::size_t g = 0; g < truth.size(); ++g) {
        const double d = estimate[g] - truth[g] - mean_diff;
        ss += d * d;
    }
    return std::sqrt(ss / truth.size());
}

double MonteCarloResult::rmse(const std::string& name) const {
    for (const auto& r : rows) {
        if (r.name == name) return r.rmse;
    }
    throw DomainError("no estimator named " + name);
}

MonteCarloResult run_monte_carlo(const MonteCarloConfig& cfg) {
    const auto data = generate_monte_carlo_data(cfg);
    std::vector<NpivSample> samples(cfg.n);
    for (int i = 0; i < cfg.n; ++i) samples[i] = {data.y[i], data.x[i], data.z[i]};

    MonteCarloResult res;
    res.tsls_quadratic = fit_2sls(data.y, data.x, data.z, {{1, 2}, cfg.instrument_degree});
    res.tsls_true = fit_2sls(data.y, data.x, data.z, {{3, 4}, cfg.instrument_degree});

    const DpmHyperparams hyper;
    const auto np = gibbs_fit(samples, default_model_spec(samples, NpivMode::NonIV), hyper, cfg.mcmc);
    const auto npiv = gibbs_fit(samples, default_model_spec(samples, NpivMode::IV), hyper, cfg.mcmc);
    res.retained_draws = npiv.count();

    // evaluate everything on the S grid points inside the central support
    const double tail = 0.5 * (1.0 - cfg.central_fraction);
    const double lo = quantile(data.x, tail), hi = quantile(data.x, 1.0 - tail);
    const auto np_mean = posterior_mean_curve(np, Curve::S);
    const auto npiv_mean = posterior_mean_curve(npiv, Curve::S);
    auto& truth = res.curves["truth"];
    for (std::size_t g = 0; g < npiv.grid_s.size(); ++g) {
        const double x = npiv.grid_s[g];
        if (x < lo || x > hi) continue;
        res.grid.push_back(x);
        truth.push_back(true_structural(x));
        res.curves[kTslsQuadratic].push_back(res.tsls_quadratic.curve(x));
        res.curves[kTslsTrue].push_back(res.tsls_true.curve(x));
        res.curves[kBayesNp].push_back(np_mean[g]);
        res.curves[kBayesNpiv].push_back(npiv_mean[g]);
    }
    for (const auto& name : {kTslsQuadratic, kTslsTrue, kBayesNp, kBayesNpiv}) {
        res.rows.push_back({name, centred_rmse(res.curves[name], truth)});
    }
    return res;
}

}  // namespace metroflow::npiv
