#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace metroflow::splines {

// Equidistant-knot B-spline basis on [lo, hi] with a difference penalty of the given order.
struct SplineBasisSpec {
    int degree = 3;
    int num_interior_knots = 20;
    double lo = 0.0;
    double hi = 1.0;
    int penalty_order = 2;

    // Number of basis functions: interior knots + degree + 1.
    [[nodiscard]] int basis_count() const { return num_interior_knots + degree + 1; }
    // Full clamped knot vector (boundary knots repeated degree + 1 times).
    [[nodiscard]] std::vector<double> knots() const;
    // Throws ConfigError on an invalid combination.
    void validate() const;

    friend bool operator==(const SplineBasisSpec&, const SplineBasisSpec&) = default;
};

// Row i holds every basis function evaluated at x[i]. Points outside [lo, hi] by more
// than a rounding tolerance throw DomainError; points within the tolerance are clamped.
[[nodiscard]] Eigen::MatrixXd basis_matrix(std::span<const double> x, const SplineBasisSpec& spec);

// Nonzero basis values at one point: values[j] belongs to column first + j.
struct LocalBasis {
    int first;
    std::vector<double> values;
};
[[nodiscard]] LocalBasis local_basis(double x, const SplineBasisSpec& spec);
// Allocation-free variant: writes degree + 1 values into out and returns the first column.
int local_basis(double x, const SplineBasisSpec& spec, std::span<double> out);

inline constexpr int kMaxDegree = 10;

// D'D for the order-th difference operator D on K coefficients.
[[nodiscard]] Eigen::MatrixXd difference_penalty(int basis_count, int order);

// n equidistant points from lo to hi inclusive.
[[nodiscard]] std::vector<double> uniform_grid(double lo, double hi, int n = 200);

}  // namespace metroflow::splines
