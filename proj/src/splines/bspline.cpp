#include "metroflow/splines/bspline.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "metroflow/errors.hpp"

namespace metroflow::splines {

std::vector<double> SplineBasisSpec::knots() const {
    std::vector<double> t;
    t.reserve(basis_count() + degree + 1);
    for (int i = 0; i <= degree; ++i) t.push_back(lo);
    const double h = (hi - lo) / (num_interior_knots + 1);
    for (int i = 1; i <= num_interior_knots; ++i) t.push_back(lo + i * h);
    for (int i = 0; i <= degree; ++i) t.push_back(hi);
    return t;
}

void SplineBasisSpec::validate() const {
    if (degree < 1 || degree > kMaxDegree) throw ConfigError("spline degree must be in [1, 10]");
    if (num_interior_knots < 1) throw ConfigError("spline needs at least one interior knot");
    if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) throw ConfigError("spline domain must satisfy lo < hi");
    if (penalty_order < 1 || penalty_order >= basis_count()) {
        throw ConfigError("penalty order must be in [1, " + std::to_string(basis_count() - 1) + "]");
    }
}

int local_basis(double x, const SplineBasisSpec& spec, std::span<double> out) {
    const double tol = 1e-10 * (spec.hi - spec.lo);
    if (!(x >= spec.lo - tol && x <= spec.hi + tol)) {
        throw DomainError("spline argument " + std::to_string(x) + " outside [" + std::to_string(spec.lo) + ", " +
                          std::to_string(spec.hi) + "]");
    }
    x = std::clamp(x, spec.lo, spec.hi);
    const int p = spec.degree;
    const double h = (spec.hi - spec.lo) / (spec.num_interior_knots + 1);
    // knot span: t[span] <= x < t[span + 1], with x == hi folded into the last span
    int interval = static_cast<int>(std::floor((x - spec.lo) / h));
    interval = std::clamp(interval, 0, spec.num_interior_knots);
    const int span = interval + p;
    const int m1 = spec.num_interior_knots + 1;
    auto t = [&](int k) { return spec.lo + std::clamp(k - p, 0, m1) * h; };

    // Cox-de Boor triangle for the p + 1 nonzero functions
    std::array<double, kMaxDegree + 1> left{}, right{};
    auto& N = out;
    N[0] = 1.0;
    for (int j = 1; j <= p; ++j) {
        left[j] = x - t(span + 1 - j);
        right[j] = t(span + j) - x;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            const double temp = N[r] / (right[r + 1] + left[j - r]);
            N[r] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        N[j] = saved;
    }
    return span - p;
}

LocalBasis local_basis(double x, const SplineBasisSpec& spec) {
    LocalBasis lb;
    lb.values.resize(spec.degree + 1);
    lb.first = local_basis(x, spec, lb.values);
    return lb;
}

Eigen::MatrixXd basis_matrix(std::span<const double> x, const SplineBasisSpec& spec) {
    spec.validate();
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(x.size()), spec.basis_count());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const auto lb = local_basis(x[i], spec);
        for (std::size_t j = 0; j < lb.values.size(); ++j) B(static_cast<Eigen::Index>(i), lb.first + j) = lb.values[j];
    }
    return B;
}

Eigen::MatrixXd difference_penalty(int basis_count, int order) {
    if (order < 1 || order >= basis_count) {
        throw DomainError("difference order " + std::to_string(order) + " invalid for " +
                          std::to_string(basis_count) + " coefficients");
    }
    Eigen::MatrixXd D = Eigen::MatrixXd::Identity(basis_count, basis_count);
    for (int k = 0; k < order; ++k) {
        D = (D.bottomRows(D.rows() - 1) - D.topRows(D.rows() - 1)).eval();
    }
    Eigen::MatrixXd P = D.transpose() * D;
    // exact symmetry regardless of summation order
    return (0.5 * (P + P.transpose())).eval();
}

std::vector<double> uniform_grid(double lo, double hi, int n) {
    if (n < 2) throw DomainError("grid needs at least two points");
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = lo + (hi - lo) * i / (n - 1);
    g.back() = hi;
    return g;
}

}  // namespace metroflow::splines
