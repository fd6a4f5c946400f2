#include "doctest.h"

#include <random>

#include <Eigen/Eigenvalues>

#include "metroflow/errors.hpp"
#include "metroflow/splines/bspline.hpp"

using namespace metroflow::splines;

TEST_CASE("partition of unity and local support") {
    SplineBasisSpec spec;
    spec.lo = -2.0;
    spec.hi = 5.0;
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(spec.lo, spec.hi);
    std::vector<double> x(10000);
    for (auto& v : x) v = u(rng);
    x[0] = spec.lo;
    x[1] = spec.hi;
    const auto B = basis_matrix(x, spec);
    CHECK(B.cols() == spec.basis_count());
    for (Eigen::Index i = 0; i < B.rows(); ++i) {
        CHECK(std::abs(B.row(i).sum() - 1.0) < 1e-10);
        CHECK((B.row(i).array() != 0.0).count() <= spec.degree + 1);
        CHECK(B.row(i).minCoeff() >= 0.0);
    }
}

TEST_CASE("linear hats and clamped boundary") {
    SplineBasisSpec spec{1, 1, 0.0, 1.0, 1};
    const double x[] = {0.25, 0.0, 1.0};
    const auto B = basis_matrix(x, spec);
    REQUIRE(B.cols() == 3);
    CHECK(B(0, 0) == doctest::Approx(0.5));
    CHECK(B(0, 1) == doctest::Approx(0.5));
    CHECK(B(0, 2) == 0.0);
    CHECK(B(1, 0) == 1.0);
    CHECK((B.row(1).array() != 0.0).count() == 1);
    CHECK(B(2, 2) == 1.0);

    SplineBasisSpec cubic;
    const double lo[] = {0.0};
    const auto C = basis_matrix(lo, cubic);
    CHECK(C(0, 0) == 1.0);
    CHECK((C.row(0).array() != 0.0).count() == 1);
}

TEST_CASE("cubic basis reproduces polynomials") {
    // Greville abscissae reproduce x exactly for any degree
    SplineBasisSpec spec{3, 8, 0.0, 2.0, 2};
    const auto t = spec.knots();
    Eigen::VectorXd coef(spec.basis_count());
    for (int j = 0; j < spec.basis_count(); ++j) coef(j) = (t[j + 1] + t[j + 2] + t[j + 3]) / 3.0;
    const auto grid = uniform_grid(0.0, 2.0, 57);
    const Eigen::VectorXd fx = basis_matrix(grid, spec) * coef;
    for (std::size_t i = 0; i < grid.size(); ++i) CHECK(fx(i) == doctest::Approx(grid[i]).epsilon(1e-12));
}

TEST_CASE("domain errors") {
    SplineBasisSpec spec;
    const double bad[] = {1.5};
    CHECK_THROWS_AS((void)basis_matrix(bad, spec), metroflow::DomainError);
    const double edge[] = {1.0 + 1e-13};
    CHECK_NOTHROW((void)basis_matrix(edge, spec));
    spec.lo = 1.0;
    CHECK_THROWS_AS(spec.validate(), metroflow::ConfigError);
}

TEST_CASE("difference penalty structure") {
    const auto P1 = difference_penalty(3, 1);
    CHECK(Eigen::FullPivLU<Eigen::MatrixXd>(P1).rank() == 2);
    CHECK(P1.rowwise().sum().cwiseAbs().maxCoeff() < 1e-15);

    const auto P2 = difference_penalty(5, 2);
    Eigen::VectorXd quad(5), lin(5);
    for (int i = 0; i < 5; ++i) {
        lin(i) = 3.0 - 2.0 * i;
        quad(i) = i * i;
    }
    CHECK((P2 * lin).norm() < 1e-12);
    CHECK((P2 * quad).norm() > 1.0);  // only order-1 polynomials are annihilated

    for (int K : {4, 7, 23}) {
        for (int order = 1; order < K && order <= 4; ++order) {
            const auto P = difference_penalty(K, order);
            CHECK(P == P.transpose());
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(P);
            CHECK(es.eigenvalues().minCoeff() > -1e-9);
            CHECK(Eigen::FullPivLU<Eigen::MatrixXd>(P).rank() == K - order);
        }
    }
    CHECK_THROWS_AS((void)difference_penalty(3, 3), metroflow::DomainError);
}

TEST_CASE("uniform grid") {
    const auto g = uniform_grid(1.0, 3.0, 5);
    CHECK(g == std::vector<double>{1.0, 1.5, 2.0, 2.5, 3.0});
    CHECK(uniform_grid(0, 1).size() == 200);
}
