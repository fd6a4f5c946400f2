#include "metroflow/npiv/tsls.hpp"

#include <cmath>

#include "metroflow/errors.hpp"

namespace metroflow::npiv {

double TslsResult::curve(double x) const {
    double v = coef(0);
    for (std::size_t k = 0; k < powers.size(); ++k) v += coef(k + 1) * std::pow(x, powers[k]);
    return v;
}

TslsResult fit_2sls(std::span<const double> y, std::span<const double> x, std::span<const double> z,
                    const TslsSpec& spec, const Eigen::MatrixXd& exogenous) {
    const auto n = static_cast<Eigen::Index>(y.size());
    if (x.size() != y.size() || z.size() != y.size()) throw DomainError("2SLS inputs differ in length");
    if (exogenous.size() > 0 && exogenous.rows() != n) throw DomainError("exogenous block has the wrong row count");
    if (spec.endogenous_powers.empty()) throw DomainError("2SLS needs at least one endogenous term");
    const Eigen::Index p = static_cast<Eigen::Index>(spec.endogenous_powers.size());
    const Eigen::Index e = exogenous.cols();
    if (spec.instrument_degree < p) throw DomainError("fewer instruments than endogenous terms");

    Eigen::MatrixXd Z(n, 1 + spec.instrument_degree + e);
    Eigen::MatrixXd X(n, 1 + p + e);
    for (Eigen::Index i = 0; i < n; ++i) {
        Z(i, 0) = 1.0;
        for (int d = 1; d <= spec.instrument_degree; ++d) Z(i, d) = std::pow(z[i], d);
        X(i, 0) = 1.0;
        for (Eigen::Index k = 0; k < p; ++k) X(i, 1 + k) = std::pow(x[i], spec.endogenous_powers[k]);
    }
    if (e > 0) {
        Z.rightCols(e) = exogenous;
        X.rightCols(e) = exogenous;
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qz(Z);
    if (qz.rank() < Z.cols()) throw NumericalError("rank-deficient instrument matrix (constant instrument?)");
    const Eigen::MatrixXd Xhat = Z * qz.solve(X);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qx(Xhat);
    if (qx.rank() < Xhat.cols()) throw NumericalError("rank-deficient second-stage design");
    const Eigen::Map<const Eigen::VectorXd> yv(y.data(), n);

    TslsResult r;
    r.powers = spec.endogenous_powers;
    r.coef = qx.solve(yv);
    const Eigen::VectorXd resid = yv - X * r.coef;
    const double dof = static_cast<double>(n - X.cols());
    r.sigma2 = dof > 0 ? resid.squaredNorm() / dof : 0.0;
    r.covariance = r.sigma2 * (Xhat.transpose() * Xhat).inverse();
    return r;
}

}  // namespace metroflow::npiv
