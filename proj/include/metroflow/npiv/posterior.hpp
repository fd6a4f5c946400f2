#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "metroflow/npiv/types.hpp"

namespace metroflow::npiv {

[[nodiscard]] const Eigen::MatrixXd& curve_draws(const PosteriorDraws& draws, Curve which);
[[nodiscard]] const std::vector<double>& curve_grid(const PosteriorDraws& draws, Curve which);

// Pointwise average over retained draws.
[[nodiscard]] std::vector<double> posterior_mean_curve(const PosteriorDraws& draws, Curve which);
[[nodiscard]] std::vector<double> posterior_mean_curve(const Eigen::MatrixXd& curves);
// Pointwise posterior standard deviation.
[[nodiscard]] std::vector<double> posterior_sd_curve(const Eigen::MatrixXd& curves);

// Simultaneous band: per grid point, the k-th smallest and k-th largest draws, with k starting
// at floor(delta/2 * M) and decreasing until at least ceil((1 - delta) * M) curves lie wholly
// inside.
[[nodiscard]] CredibleBand simultaneous_band(const Eigen::MatrixXd& curves, std::span<const double> grid, double delta);
[[nodiscard]] CredibleBand simultaneous_band(const PosteriorDraws& draws, Curve which, double delta);

// Spearman rank correlation with average ranks for ties.
[[nodiscard]] double spearman(std::span<const double> a, std::span<const double> b);

// Secant slope of a curve over the central `fraction` of its grid.
[[nodiscard]] double central_secant_slope(std::span<const double> grid, std::span<const double> curve,
                                          double fraction = 0.8);

// central_secant_slope of every retained draw of a curve.
[[nodiscard]] std::vector<double> secant_slope_draws(const PosteriorDraws& draws, Curve which, double fraction = 0.8);

struct FirstStageRelevance {
    std::vector<double> grid, mean;
    CredibleBand band;
    double rank_correlation;  // Spearman of posterior-mean h(z_i) with n_i
    double secant_slope;      // over the central 80% of the instrument grid
};

// Throws ConfigError for draws fitted in NonIV mode.
[[nodiscard]] FirstStageRelevance first_stage_relevance(const PosteriorDraws& draws, double delta = 0.05);

// Linear-interpolated sample quantile, p in [0, 1].
[[nodiscard]] double quantile(std::vector<double> values, double p);

// Optimum of the posterior mean S within the 1st..99th percentile support of n, with the
// band-separation test for a significant backward bend.
[[nodiscard]] BottleneckReport extract_optimum(const PosteriorDraws& draws, double delta = 0.05,
                                               std::string station = {}, std::string direction = {},
                                               double interval_minutes = 10.0);

}  // namespace metroflow::npiv
