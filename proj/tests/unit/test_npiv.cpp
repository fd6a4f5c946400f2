#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "doctest.h"

#include "metroflow/errors.hpp"
#include "metroflow/npiv/dpm.hpp"
#include "metroflow/npiv/gibbs.hpp"
#include "metroflow/npiv/io.hpp"
#include "metroflow/npiv/monte_carlo.hpp"
#include "metroflow/npiv/posterior.hpp"
#include "metroflow/npiv/tsls.hpp"

using namespace metroflow;
using namespace metroflow::npiv;

namespace {

McmcConfig small_mcmc(std::uint64_t seed = 7) { return McmcConfig{1500, 500, 2, seed}; }

std::vector<NpivSample> linear_nonendogenous(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    std::normal_distribution<double> e(0.0, 1.0);
    std::vector<NpivSample> out(n);
    for (auto& s : out) {
        s.n = u(rng);
        s.z = s.n;
        s.q = 2.0 * s.n + e(rng);
    }
    return out;
}

// n = 3.5 z + 2.1 w + e1, q = 1.5 n - 4 w + e2: confounded through w.
std::vector<NpivSample> linear_iv(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::normal_distribution<double> e(0.0, 0.5);
    std::vector<NpivSample> out(n);
    for (auto& s : out) {
        s.z = u(rng);
        const double w = u(rng);
        s.n = 3.5 * s.z + 2.1 * w + e(rng);
        s.q = 1.5 * s.n - 4.0 * w + e(rng);
    }
    return out;
}

struct Ols {
    double a, b;
};

Ols ols(const std::vector<NpivSample>& s) {
    double mx = 0, my = 0;
    for (const auto& p : s) {
        mx += p.n;
        my += p.q;
    }
    mx /= s.size();
    my /= s.size();
    double sxy = 0, sxx = 0;
    for (const auto& p : s) {
        sxy += (p.n - mx) * (p.q - my);
        sxx += (p.n - mx) * (p.n - mx);
    }
    return {my - sxy / sxx * mx, sxy / sxx};
}

Eigen::MatrixXd random_curves(int draws, int points, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n01;
    Eigen::MatrixXd m(draws, points);
    for (int r = 0; r < draws; ++r) {
        const double shift = n01(rng);
        for (int g = 0; g < points; ++g) m(r, g) = shift + 0.3 * n01(rng);
    }
    return m;
}

}  // namespace

TEST_CASE("mcmc retained-draw arithmetic") {
    CHECK(McmcConfig{50000, 15000, 10, 1}.retained() == 3500);
    CHECK(McmcConfig::long_run().retained() == 750);
    CHECK(McmcConfig::fast().retained() == 750);
    CHECK_THROWS_AS(McmcConfig({100, 100, 1, 1}).validate(), ConfigError);
    CHECK_THROWS_AS(McmcConfig({100, 10, 0, 1}).validate(), ConfigError);
}

TEST_CASE("hyperparameter validation") {
    DpmHyperparams h;
    CHECK_NOTHROW(h.validate());
    h.s_sigma = 1.0;
    CHECK_THROWS_AS(h.validate(), ConfigError);
    h = {};
    h.truncation = 1;
    CHECK_THROWS_AS(h.validate(), ConfigError);
    h = {};
    h.S_sigma = Eigen::Matrix2d{{1.0, 2.0}, {2.0, 1.0}};
    CHECK_THROWS_AS(h.validate(), ConfigError);
}

TEST_CASE("stick-breaking weights close and gamma/beta moments") {
    std::vector<double> sticks{0.3, 0.5, 0.2, 1.0};
    const auto w = stick_breaking_weights(sticks);
    CHECK(w[0] == doctest::Approx(0.3));
    CHECK(w[1] == doctest::Approx(0.35));
    CHECK(std::abs(std::accumulate(w.begin(), w.end(), 0.0) - 1.0) < 1e-15);

    std::mt19937_64 rng(3);
    double g = 0, b = 0;
    const int reps = 40000;
    for (int i = 0; i < reps; ++i) {
        g += sample_gamma(3.0, 2.0, rng);
        b += sample_beta(2.0, 6.0, rng);
    }
    CHECK(g / reps == doctest::Approx(1.5).epsilon(0.02));
    CHECK(b / reps == doctest::Approx(0.25).epsilon(0.02));
    // shape below one goes through the boost step
    double small = 0;
    for (int i = 0; i < reps; ++i) small += sample_gamma(0.5, 1.0, rng);
    CHECK(small / reps == doctest::Approx(0.5).epsilon(0.03));
}

TEST_CASE("inverse Wishart mean matches scale / (df - p - 1)") {
    std::mt19937_64 rng(11);
    Eigen::Matrix2d S{{2.0, 0.6}, {0.6, 1.0}};
    const double df = 8.0;
    Eigen::Matrix2d acc = Eigen::Matrix2d::Zero();
    const int reps = 40000;
    for (int i = 0; i < reps; ++i) {
        const Eigen::MatrixXd draw = sample_inverse_wishart(df, S, rng);
        CHECK((draw - draw.transpose()).norm() < 1e-12);
        acc += draw;
    }
    const Eigen::Matrix2d expected = S / (df - 3.0);
    for (int r = 0; r < 2; ++r) {
        for (int c = 0; c < 2; ++c) CHECK(acc(r, c) / reps == doctest::Approx(expected(r, c)).epsilon(0.03));
    }
}

TEST_CASE("NIW posterior concentrates on the data") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> n01;
    Eigen::MatrixXd data(5000, 2);
    for (int i = 0; i < data.rows(); ++i) {
        data(i, 0) = 1.0 + n01(rng);
        data(i, 1) = -2.0 + 0.5 * n01(rng);
    }
    const NiwPrior prior{Eigen::Vector2d::Zero(), 0.01, 4.0, Eigen::Matrix2d::Identity()};
    const auto comp = sample_niw_posterior(prior, data, rng);
    CHECK(comp.mu(0) == doctest::Approx(1.0).epsilon(0.1));
    CHECK(comp.mu(1) == doctest::Approx(-2.0).epsilon(0.05));
    CHECK(comp.sigma(0, 0) == doctest::Approx(1.0).epsilon(0.1));
    CHECK(comp.sigma(1, 1) == doctest::Approx(0.25).epsilon(0.1));
    const auto empty = sample_niw_posterior(prior, Eigen::MatrixXd(0, 2), rng);
    CHECK(empty.sigma.llt().info() == Eigen::Success);
}

TEST_CASE("posterior mean curve examples") {
    Eigen::MatrixXd one(1, 3);
    one << 1.0, -2.0, 5.0;
    CHECK(posterior_mean_curve(one) == std::vector<double>{1.0, -2.0, 5.0});
    Eigen::MatrixXd pm(2, 3);
    pm.row(0) << 1.0, -2.0, 5.0;
    pm.row(1) = -pm.row(0);
    for (double v : posterior_mean_curve(pm)) CHECK(v == 0.0);
}

TEST_CASE("simultaneous band containment and nesting") {
    const auto curves = random_curves(3500, 40, 21);
    std::vector<double> grid(40);
    std::iota(grid.begin(), grid.end(), 0.0);
    const auto wide = simultaneous_band(curves, grid, 0.05);
    const auto narrow = simultaneous_band(curves, grid, 0.5);
    CHECK(wide.total == 3500);
    CHECK(wide.contained >= 3325);
    CHECK(narrow.contained >= 1750);
    for (std::size_t g = 0; g < grid.size(); ++g) {
        CHECK(wide.lower[g] <= wide.upper[g]);
        CHECK(wide.lower[g] <= narrow.lower[g]);
        CHECK(narrow.upper[g] <= wide.upper[g]);
    }
    // recount independently
    int inside = 0;
    for (Eigen::Index r = 0; r < curves.rows(); ++r) {
        bool ok = true;
        for (Eigen::Index g = 0; g < curves.cols(); ++g) ok = ok && curves(r, g) >= wide.lower[g] && curves(r, g) <= wide.upper[g];
        inside += ok;
    }
    CHECK(inside == wide.contained);

    Eigen::MatrixXd same = Eigen::MatrixXd::Constant(50, 4, 2.5);
    const auto flat = simultaneous_band(same, std::vector<double>{0, 1, 2, 3}, 0.05);
    CHECK(flat.contained == 50);
    for (int g = 0; g < 4; ++g) CHECK(flat.upper[g] - flat.lower[g] == 0.0);
    CHECK_THROWS_AS((void)simultaneous_band(same, std::vector<double>{0, 1, 2, 3}, 1.0), DomainError);
}

TEST_CASE("spearman and secant helpers") {
    const std::vector<double> a{1, 2, 3, 4, 5}, b{2, 4, 6, 8, 100}, c{5, 4, 3, 2, 1};
    CHECK(spearman(a, b) == doctest::Approx(1.0));
    CHECK(spearman(a, c) == doctest::Approx(-1.0));
    std::vector<double> grid(101), line(101);
    for (int i = 0; i <= 100; ++i) {
        grid[i] = i * 0.01;
        line[i] = 3.0 * grid[i] + 1.0;
    }
    CHECK(central_secant_slope(grid, line) == doctest::Approx(3.0));
    CHECK(quantile({1, 2, 3, 4}, 0.5) == doctest::Approx(2.5));
}

TEST_CASE("NonIV fit of a line stays within three posterior SDs of the OLS and true lines") {
    const auto data = linear_nonendogenous(400, 31);
    const auto spec = default_model_spec(data, NpivMode::NonIV);
    const auto draws = gibbs_fit(data, spec, DpmHyperparams{}, small_mcmc());
    REQUIRE(draws.count() == small_mcmc().retained());
    const auto mean = posterior_mean_curve(draws, Curve::S);
    const auto sd = posterior_sd_curve(draws.s_draws);
    const Ols fit = ols(data);
    for (std::size_t g = 0; g < draws.grid_s.size(); ++g) {
        const double x = draws.grid_s[g];
        CHECK(std::abs(mean[g] - (fit.a + fit.b * x)) <= 3.0 * sd[g]);
        CHECK(std::abs(mean[g] - 2.0 * x) <= 3.0 * sd[g]);
    }
}

TEST_CASE("constant response gives a flat curve at the constant") {
    auto data = linear_nonendogenous(300, 4);
    for (auto& s : data) s.q = 7.25;
    const auto draws = gibbs_fit(data, default_model_spec(data, NpivMode::NonIV), DpmHyperparams{}, small_mcmc());
    const auto mean = posterior_mean_curve(draws, Curve::S);
    const auto band = simultaneous_band(draws, Curve::S, 0.05);
    for (std::size_t g = 0; g < mean.size(); ++g) {
        CHECK(std::abs(mean[g] - 7.25) <= std::max(band.upper[g] - band.lower[g], 1e-6));
    }
}

TEST_CASE("sampler invariants: weights, covariances, centring, reproducibility") {
    const auto data = linear_iv(300, 8);
    const auto spec = default_model_spec(data, NpivMode::IV);
    const auto mcmc = small_mcmc(99);
    const auto a = gibbs_fit(data, spec, DpmHyperparams{}, mcmc);
    CHECK(a.count() == mcmc.retained());
    CHECK(a.dpm.size() == static_cast<std::size_t>(mcmc.retained()));
    CHECK(a.h_draws.rows() == mcmc.retained());
    CHECK(a.nu_draws.rows() == mcmc.retained());
    for (const auto& d : a.dpm) {
        CHECK(static_cast<int>(d.weights.size()) == DpmHyperparams{}.truncation);
        double sum = 0;
        for (double w : d.weights) {
            CHECK(w >= 0.0);
            sum += w;
        }
        CHECK(std::abs(sum - 1.0) <= 1e-12);
        CHECK(d.min_sigma_eigenvalue > 0.0);
        CHECK(d.alpha > 0.0);
    }
    for (double m : a.s_sample_mean) CHECK(std::abs(m) <= 1e-8);
    for (double m : a.nu_sample_mean) CHECK(std::abs(m) <= 1e-8);

    const auto b = gibbs_fit(data, spec, DpmHyperparams{}, mcmc);
    CHECK(a.s_draws == b.s_draws);
    CHECK(a.h_draws == b.h_draws);
    CHECK(a.nu_draws == b.nu_draws);
    const auto c = gibbs_fit(data, spec, DpmHyperparams{}, small_mcmc(100));
    CHECK(a.s_draws != c.s_draws);
}

TEST_CASE("first-stage relevance recovers the instrument slope") {
    const auto data = linear_iv(1000, 12);
    const auto draws = gibbs_fit(data, default_model_spec(data, NpivMode::IV), DpmHyperparams{}, small_mcmc());
    const auto rel = first_stage_relevance(draws);
    CHECK(rel.secant_slope >= 3.0);
    CHECK(rel.secant_slope <= 4.0);
    CHECK(rel.rank_correlation > 0.5);
    CHECK(rel.band.contained >= static_cast<int>(std::ceil(0.95 * draws.count())));

    const auto noniv = gibbs_fit(data, default_model_spec(data, NpivMode::NonIV), DpmHyperparams{}, small_mcmc());
    CHECK_THROWS_AS((void)first_stage_relevance(noniv), ConfigError);
    CHECK_THROWS_AS((void)posterior_mean_curve(noniv, Curve::H), ConfigError);
}

TEST_CASE("independent instrument gives near-zero rank correlation") {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::normal_distribution<double> e(0.0, 0.5);
    std::vector<NpivSample> data(8000);
    for (auto& s : data) {
        s.z = u(rng);
        s.n = 2.0 + e(rng);
        s.q = s.n + e(rng);
    }
    const auto draws = gibbs_fit(data, default_model_spec(data, NpivMode::IV), DpmHyperparams{}, McmcConfig{600, 300, 1, 5});
    const auto rel = first_stage_relevance(draws);
    CHECK(std::abs(rel.rank_correlation) <= 0.05);
}

TEST_CASE("input validation") {
    auto data = linear_iv(150, 1);
    CHECK_THROWS_AS((void)gibbs_fit(data, default_model_spec(data, NpivMode::IV), DpmHyperparams{}, small_mcmc()),
                    InsufficientDataError);
    data = linear_iv(300, 1);
    auto spec = default_model_spec(data, NpivMode::IV);
    auto constant_z = data;
    for (auto& s : constant_z) s.z = 0.5;
    CHECK_THROWS_AS((void)gibbs_fit(constant_z, spec, DpmHyperparams{}, small_mcmc()), DomainError);
    auto bad = data;
    bad[3].q = std::nan("");
    CHECK_THROWS_AS((void)gibbs_fit(bad, spec, DpmHyperparams{}, small_mcmc()), DomainError);
}

TEST_CASE("extract_optimum on a monotone curve sits at the right support edge") {
    PosteriorDraws d;
    d.mode = NpivMode::NonIV;
    d.grid_s = splines::uniform_grid(0.0, 10.0, 101);
    d.n_obs.resize(500);
    for (int i = 0; i < 500; ++i) d.n_obs[i] = 10.0 * i / 499.0;
    d.s_draws.resize(20, 101);
    for (int r = 0; r < 20; ++r) {
        for (int g = 0; g < 101; ++g) d.s_draws(r, g) = 1.0 + 0.3 * d.grid_s[g] + 0.01 * r;
    }
    const auto rep = extract_optimum(d, 0.05, "A", "up");
    CHECK(rep.support_hi == doctest::Approx(9.9));
    CHECK(rep.optimum_movements <= rep.support_hi);
    CHECK(rep.optimum_movements >= rep.support_hi - 0.1);
    CHECK_FALSE(rep.significant_backward_bend);
    CHECK(rep.min_headway_minutes == doctest::Approx(10.0 / rep.max_flow));
}

TEST_CASE("extract_optimum finds a concave optimum and its backward bend") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(100.0, 900.0);
    std::normal_distribution<double> e(0.0, 0.15);
    std::vector<NpivSample> data(600);
    for (auto& s : data) {
        s.n = u(rng);
        s.z = s.n;
        const double x = (s.n - 500.0) / 200.0;
        s.q = 5.0 - x * x + e(rng);
    }
    const auto draws = gibbs_fit(data, default_model_spec(data, NpivMode::NonIV), DpmHyperparams{}, small_mcmc());
    const auto rep = extract_optimum(draws, 0.05, "synthetic", "down");
    CHECK(rep.significant_backward_bend);
    CHECK(std::abs(rep.optimum_movements - 500.0) <= 25.0);
    CHECK(rep.max_flow == doctest::Approx(5.0).epsilon(0.05));
    CHECK(rep.max_flow > 0.0);
}

TEST_CASE("2SLS exact linear system and rank deficiency") {
    std::vector<double> z(50), x(50), y(50);
    for (int i = 0; i < 50; ++i) {
        z[i] = 0.1 * i;
        x[i] = z[i];
        y[i] = 2.0 * x[i];
    }
    const auto r = fit_2sls(y, x, z, {});
    CHECK(r.coef(1) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(std::abs(r.coef(0)) < 1e-10);
    std::vector<double> flat(50, 1.0);
    CHECK_THROWS_AS((void)fit_2sls(y, x, flat, {}), NumericalError);
    CHECK_THROWS_AS((void)fit_2sls(y, x, z, {{1, 2, 3}, 1}), DomainError);
    // an exogenous copy of x = z duplicates the fitted x column
    std::vector<double> dup(x);
    CHECK_THROWS_AS((void)fit_2sls(y, x, z, {{1, 2}, 2}, Eigen::Map<Eigen::VectorXd>(dup.data(), 50)), NumericalError);
}

TEST_CASE("2SLS recovers the quartic coefficients of the benchmark design") {
    MonteCarloConfig cfg;
    const auto d = generate_monte_carlo_data(cfg);
    const auto r = fit_2sls(d.y, d.x, d.z, {{3, 4}, 4});
    CHECK(std::abs(r.coef(1) - 40.0) <= 1.96 * r.se(1));
    CHECK(std::abs(r.coef(2) + 40.0) <= 1.96 * r.se(2));
}

TEST_CASE("benchmark truth and level-free RMSE") {
    CHECK(true_structural(0.0) == 0.0);
    CHECK(true_structural(0.5) == doctest::Approx(2.5));
    const std::vector<double> truth{1, 2, 3}, shifted{11, 12, 13}, off{1, 3, 3};
    CHECK(centred_rmse(shifted, truth) == doctest::Approx(0.0));
    CHECK(centred_rmse(off, truth) > 0.0);
    MonteCarloConfig sd;
    sd.error_is_sd = true;
    CHECK(sd.error_sd() == 0.5);
    CHECK(MonteCarloConfig{}.error_sd() == doctest::Approx(std::sqrt(0.5)));
}

TEST_CASE("samples CSV schema and report JSON round trip") {
    std::istringstream missing("q,x\n1,2\n");
    try {
        (void)read_samples_csv(missing);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        CHECK(msg.find(" n") != std::string::npos);
        CHECK(msg.find(" z") != std::string::npos);
    }
    std::istringstream empty("");
    CHECK_THROWS_AS((void)read_samples_csv(empty), ConfigError);
    std::istringstream header_only("q,n,z\n");
    CHECK_THROWS_AS((void)read_samples_csv(header_only), ConfigError);
    std::istringstream no_z("q,n\n1.5,300\n");
    const auto s = read_samples_csv(no_z, false);
    REQUIRE(s.size() == 1);
    CHECK(s[0].z == 300.0);

    std::ostringstream os;
    write_samples_csv({{1.5, 2.5, 3.5}}, os);
    std::istringstream back(os.str());
    CHECK(read_samples_csv(back)[0].z == 3.5);

    BottleneckReport rep{"Prince Edward", "down", 880.0, 4.9, 10.0, 10.0 / 4.9, true, 100.0, 1200.0, 0.05};
    const auto parsed = report_from_json(report_to_json(rep, 750, NpivMode::IV));
    CHECK(parsed.station == rep.station);
    CHECK(parsed.optimum_movements == rep.optimum_movements);
    CHECK(parsed.significant_backward_bend);
    CHECK(parsed.support_hi == 1200.0);
}
