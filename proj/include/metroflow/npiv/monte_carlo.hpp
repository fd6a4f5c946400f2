#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "metroflow/npiv/gibbs.hpp"
#include "metroflow/npiv/tsls.hpp"

namespace metroflow::npiv {

// y = s(x) + 30 w^4 + e2,  x = 3.5 z + 2.1 w + e1,  z, w ~ U[0, 1],  s(x) = -40 x^4 + 40 x^3.
[[nodiscard]] double true_structural(double x);

struct MonteCarloConfig {
    std::uint64_t seed = 2024;
    int n = 10000;
    McmcConfig mcmc = McmcConfig::fast();
    // Error spread: variance by default, standard deviation when error_is_sd.
    double error_spread = 0.5;
    bool error_is_sd = false;
    double central_fraction = 0.8;
    int instrument_degree = 4;

    [[nodiscard]] double error_sd() const;
};

struct MonteCarloData {
    std::vector<double> y, x, z, w;
};

[[nodiscard]] MonteCarloData generate_monte_carlo_data(const MonteCarloConfig& cfg);

struct EstimatorRow {
    std::string name;
    double rmse;
};

inline const std::string kTslsQuadratic = "2sls-quadratic";
inline const std::string kTslsTrue = "2sls-true";
inline const std::string kBayesNp = "bayes-np";
inline const std::string kBayesNpiv = "bayes-npiv";

struct MonteCarloResult {
    std::vector<EstimatorRow> rows;  // in the order 2SLS-quadratic, 2SLS-true, Bayes NP, Bayes NPIV
    // Central-support grid and every curve evaluated on it (including "truth").
    std::vector<double> grid;
    std::map<std::string, std::vector<double>> curves;
    TslsResult tsls_true;
    TslsResult tsls_quadratic;
    int retained_draws = 0;

    [[nodiscard]] double rmse(const std::string& name) const;
};

// RMSE against s on the grid after removing the mean difference (level-free).
[[nodiscard]] double centred_rmse(const std::vector<double>& estimate, const std::vector<double>& truth);

[[nodiscard]] MonteCarloResult run_monte_carlo(const MonteCarloConfig& cfg);

}  // namespace metroflow::npiv
