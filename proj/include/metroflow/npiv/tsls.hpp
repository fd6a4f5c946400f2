#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace metroflow::npiv {

// Polynomial 2SLS: y = b0 + sum_k b_k x^{p_k} + sum_j g_j w_j + e, with every x^{p_k} treated as
// endogenous and instrumented by 1, z, ..., z^instrument_degree plus the exogenous columns w.
struct TslsSpec {
    std::vector<int> endogenous_powers{1};
    int instrument_degree = 1;
};

struct TslsResult {
    std::vector<int> powers;
    // Intercept, one coefficient per power, then one per exogenous column.
    Eigen::VectorXd coef;
    Eigen::MatrixXd covariance;
    double sigma2 = 0;

    [[nodiscard]] double se(Eigen::Index k) const { return std::sqrt(covariance(k, k)); }
    // b0 + sum_k b_k x^{p_k}; exogenous terms excluded.
    [[nodiscard]] double curve(double x) const;
};

// Throws NumericalError on a rank-deficient first or second stage, DomainError on bad input.
[[nodiscard]] TslsResult fit_2sls(std::span<const double> y, std::span<const double> x, std::span<const double> z,
                                  const TslsSpec& spec, const Eigen::MatrixXd& exogenous = Eigen::MatrixXd());

}  // namespace metroflow::npiv
