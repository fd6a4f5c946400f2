#pragma once

#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace metroflow::npiv {

// pi_c = v_c * prod_{j<c} (1 - v_j). The last stick should be 1 so the weights close.
[[nodiscard]] std::vector<double> stick_breaking_weights(std::span<const double> sticks);

[[nodiscard]] double sample_gamma(double shape, double rate, std::mt19937_64& rng);
[[nodiscard]] double sample_beta(double a, double b, std::mt19937_64& rng);

// Sigma ~ IW(df, scale) via the Bartlett decomposition of its Wishart inverse.
[[nodiscard]] Eigen::MatrixXd sample_inverse_wishart(double df, const Eigen::MatrixXd& scale, std::mt19937_64& rng);

// Normal-inverse-Wishart base measure: mu | Sigma ~ N(mu0, Sigma / tau), Sigma ~ IW(df, scale).
struct NiwPrior {
    Eigen::VectorXd mu0;
    double tau;
    double df;
    Eigen::MatrixXd scale;
};

struct GaussianComponent {
    Eigen::VectorXd mu;
    Eigen::MatrixXd sigma;
};

// Conjugate draw given the rows of `data` (one observation per row; may be empty).
[[nodiscard]] GaussianComponent sample_niw_posterior(const NiwPrior& prior, const Eigen::MatrixXd& data,
                                                     std::mt19937_64& rng);

}  // namespace metroflow::npiv
