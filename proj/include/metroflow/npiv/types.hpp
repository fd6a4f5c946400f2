#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "metroflow/splines/bspline.hpp"

namespace metroflow::npiv {

// One observation: response q (train flow), endogenous covariate n (movements per train)
// and instrument z.
struct NpivSample {
    double q;
    double n;
    double z;
};

enum class NpivMode { IV, NonIV };

[[nodiscard]] std::string to_string(NpivMode mode);
// "iv" / "noniv", case-insensitive; throws ConfigError otherwise.
[[nodiscard]] NpivMode parse_mode(const std::string& text);

// q = S(n) + nu(eps1) + u,  n = h(z) + eps1.
// The control-function domain is derived from the first-stage residuals inside the sampler;
// only its degree, knot count and penalty order are taken from control_fn_basis.
struct NpivModelSpec {
    splines::SplineBasisSpec second_stage_basis;
    splines::SplineBasisSpec first_stage_basis;
    splines::SplineBasisSpec control_fn_basis;
    NpivMode mode = NpivMode::IV;
    int grid_points = 200;

    void validate() const;
};

// Spline domains set to the observed ranges of n and z.
[[nodiscard]] NpivModelSpec default_model_spec(const std::vector<NpivSample>& samples, NpivMode mode);

struct DpmHyperparams {
    Eigen::Vector2d mu_0 = Eigen::Vector2d::Zero();
    double tau_sigma = 0.01;
    double s_sigma = 4.0;
    // Prior scale of the inverse Wishart; empty means diag(residual variances) at start-up.
    std::optional<Eigen::Matrix2d> S_sigma;
    double alpha_shape = 2.0;
    double alpha_rate = 2.0;
    int truncation = 20;
    // Inverse-gamma prior on every smoothing variance.
    double smoothing_shape = 0.001;
    double smoothing_scale = 0.001;
    // Prior precision on the constant coefficient direction of each centred spline.
    double constant_precision = 1.0;

    void validate() const;
};

struct DpmState {
    std::vector<int> assignment;
    std::vector<Eigen::VectorXd> mu;
    std::vector<Eigen::MatrixXd> sigma;
    std::vector<double> sticks;   // v_c, last one fixed at 1
    std::vector<double> weights;  // pi_c
    double alpha = 1.0;
};

struct McmcConfig {
    int total_draws = 50000;
    int burn_in = 15000;
    int thin = 10;
    std::uint64_t seed = 1;

    [[nodiscard]] int retained() const { return (total_draws - burn_in) / thin; }
    void validate() const;

    // 4,000 / 1,000 / 4: 750 retained draws.
    static McmcConfig fast(std::uint64_t seed = 1) { return {4000, 1000, 4, seed}; }
    // 40,000 / 10,000 / 40: 750 retained draws.
    static McmcConfig long_run(std::uint64_t seed = 1) { return {40000, 10000, 40, seed}; }
};

// Per retained draw summary of the error mixture.
struct DpmSummary {
    std::vector<double> weights;
    double alpha;
    int occupied;
    double min_sigma_eigenvalue;
};

enum class Curve { S, H, Nu };

// Curves are stored in the units of the data: S in q units over the n grid (average
// structural function, level included), h in n units over the z grid, nu in q units over
// the first-stage residual grid.
struct PosteriorDraws {
    NpivMode mode = NpivMode::IV;
    McmcConfig mcmc;
    std::vector<double> grid_s, grid_h, grid_nu;
    Eigen::MatrixXd s_draws, h_draws, nu_draws;  // one row per retained draw
    std::vector<DpmSummary> dpm;
    // Sample means of the centred S(n_i) and nu(eps1_i) per retained draw.
    std::vector<double> s_sample_mean, nu_sample_mean;
    // Observed covariate values and posterior mean of h(z_i) per observation (IV only).
    std::vector<double> n_obs;
    std::vector<double> fitted_h_mean;
    DpmState final_state;

    [[nodiscard]] int count() const { return static_cast<int>(s_draws.rows()); }
};

struct CredibleBand {
    std::vector<double> grid, lower, upper;
    double delta = 0.05;
    int contained = 0;  // retained curves lying entirely inside
    int total = 0;
};

struct BottleneckReport {
    std::string station;
    std::string direction;
    double optimum_movements = 0;  // N*, pax/train
    double max_flow = 0;           // q*, trains per interval
    double interval_minutes = 10;
    double min_headway_minutes = 0;
    bool significant_backward_bend = false;
    double support_lo = 0, support_hi = 0;
    double delta = 0.05;
};

}  // namespace metroflow::npiv
