#include "metroflow/npiv/dpm.hpp"

#include "metroflow/errors.hpp"

namespace metroflow::npiv {

std::vector<double> stick_breaking_weights(std::span<const double> sticks) {
    std::vector<double> w(sticks.size());
    double remaining = 1.0;
    for (std::size_t c = 0; c < sticks.size(); ++c) {
        w[c] = sticks[c] * remaining;
        remaining *= 1.0 - sticks[c];
    }
    return w;
}

double sample_gamma(double shape, double rate, std::mt19937_64& rng) {
    return std::gamma_distribution<double>(shape, 1.0 / rate)(rng);
}

double sample_beta(double a, double b, std::mt19937_64& rng) {
    const double x = std::gamma_distribution<double>(a, 1.0)(rng);
    const double y = std::gamma_distribution<double>(b, 1.0)(rng);
    if (x + y <= 0.0) return 0.5;
    return x / (x + y);
}

Eigen::MatrixXd sample_inverse_wishart(double df, const Eigen::MatrixXd& scale, std::mt19937_64& rng) {
    const auto d = scale.rows();
    if (df <= d - 1) throw DomainError("inverse Wishart needs df > dim - 1");
    // W ~ Wishart(df, scale^{-1}) and Sigma = W^{-1}
    const Eigen::MatrixXd scale_inv = scale.inverse();
    Eigen::LLT<Eigen::MatrixXd> llt(0.5 * (scale_inv + scale_inv.transpose()));
    if (llt.info() != Eigen::Success) throw NumericalError("inverse Wishart scale is not positive definite");
    const Eigen::MatrixXd L = llt.matrixL();
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(d, d);
    std::normal_distribution<double> n01;
    for (Eigen::Index i = 0; i < d; ++i) {
        A(i, i) = std::sqrt(std::chi_squared_distribution<double>(df - static_cast<double>(i))(rng));
        for (Eigen::Index j = 0; j < i; ++j) A(i, j) = n01(rng);
    }
    const Eigen::MatrixXd LA = L * A;
    const Eigen::MatrixXd W = LA * LA.transpose();
    Eigen::MatrixXd sigma = W.inverse();
    return 0.5 * (sigma + sigma.transpose());
}

GaussianComponent sample_niw_posterior(const NiwPrior& prior, const Eigen::MatrixXd& data, std::mt19937_64& rng) {
    const auto n = static_cast<double>(data.rows());
    const auto d = prior.mu0.size();
    double tau_n = prior.tau;
    double df_n = prior.df;
    Eigen::VectorXd mu_n = prior.mu0;
    Eigen::MatrixXd scale_n = prior.scale;
    if (n > 0) {
        const Eigen::VectorXd mean = data.colwise().mean().transpose();
        const Eigen::MatrixXd centred = data.rowwise() - mean.transpose();
        const Eigen::VectorXd diff = mean - prior.mu0;
        tau_n = prior.tau + n;
        df_n = prior.df + n;
        mu_n = (prior.tau * prior.mu0 + n * mean) / tau_n;
        scale_n = prior.scale + centred.transpose() * centred + (prior.tau * n / tau_n) * diff * diff.transpose();
    }
    GaussianComponent out;
    out.sigma = sample_inverse_wishart(df_n, scale_n, rng);
    Eigen::LLT<Eigen::MatrixXd> llt(out.sigma / tau_n);
    Eigen::VectorXd xi(d);
    std::normal_distribution<double> n01;
    for (Eigen::Index i = 0; i < d; ++i) xi(i) = n01(rng);
    out.mu = mu_n + llt.matrixL() * xi;
    return out;
}

}  // namespace metroflow::npiv
