#include "metroflow/npiv/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "metroflow/errors.hpp"

namespace metroflow::npiv {

const Eigen::MatrixXd& curve_draws(const PosteriorDraws& draws, Curve which) {
    switch (which) {
        case Curve::S: return draws.s_draws;
        case Curve::H: return draws.h_draws;
        case Curve::Nu: return draws.nu_draws;
    }
    return draws.s_draws;
}

const std::vector<double>& curve_grid(const PosteriorDraws& draws, Curve which) {
    switch (which) {
        case Curve::S: return draws.grid_s;
        case Curve::H: return draws.grid_h;
        case Curve::Nu: return draws.grid_nu;
    }
    return draws.grid_s;
}

std::vector<double> posterior_mean_curve(const Eigen::MatrixXd& curves) {
    if (curves.rows() == 0) throw InsufficientDataError("no posterior draws");
    const Eigen::VectorXd m = curves.colwise().mean().transpose();
    return {m.data(), m.data() + m.size()};
}

std::vector<double> posterior_mean_curve(const PosteriorDraws& draws, Curve which) {
    if (which != Curve::S && draws.mode == NpivMode::NonIV) throw ConfigError("NonIV fits have no h or nu curves");
    return posterior_mean_curve(curve_draws(draws, which));
}

std::vector<double> posterior_sd_curve(const Eigen::MatrixXd& curves) {
    if (curves.rows() == 0) throw InsufficientDataError("no posterior draws");
    const Eigen::RowVectorXd m = curves.colwise().mean();
    std::vector<double> sd(curves.cols());
    for (Eigen::Index g = 0; g < curves.cols(); ++g) {
        const double ss = (curves.col(g).array() - m(g)).square().sum();
        sd[g] = curves.rows() > 1 ? std::sqrt(ss / (curves.rows() - 1)) : 0.0;
    }
    return sd;
}

CredibleBand simultaneous_band(const Eigen::MatrixXd& curves, std::span<const double> grid, double delta) {
    if (!(delta > 0 && delta < 1)) throw DomainError("band level delta must lie in (0, 1)");
    const int M = static_cast<int>(curves.rows());
    const int G = static_cast<int>(curves.cols());
    if (M == 0) throw InsufficientDataError("no posterior draws");
    if (static_cast<int>(grid.size()) != G) throw DomainError("grid and curve sizes differ");

    std::vector<std::vector<double>> sorted(G);
    for (int g = 0; g < G; ++g) {
        sorted[g].resize(M);
        for (int m = 0; m < M; ++m) sorted[g][m] = curves(m, g);
        std::sort(sorted[g].begin(), sorted[g].end());
    }
    const int need = static_cast<int>(std::ceil((1.0 - delta) * M - 1e-9));
    CredibleBand band;
    band.grid.assign(grid.begin(), grid.end());
    band.delta = delta;
    band.total = M;
    band.lower.resize(G);
    band.upper.resize(G);
    for (int k = static_cast<int>(std::floor(0.5 * delta * M)); k >= 0; --k) {
        for (int g = 0; g < G; ++g) {
            band.lower[g] = sorted[g][k];
            band.upper[g] = sorted[g][M - 1 - k];
        }
        int inside = 0;
        for (int m = 0; m < M; ++m) {
            bool ok = true;
            for (int g = 0; g < G && ok; ++g) ok = curves(m, g) >= band.lower[g] && curves(m, g) <= band.upper[g];
            inside += ok;
        }
        band.contained = inside;
        if (inside >= need) break;
    }
    return band;
}

CredibleBand simultaneous_band(const PosteriorDraws& draws, Curve which, double delta) {
    if (which != Curve::S && draws.mode == NpivMode::NonIV) throw ConfigError("NonIV fits have no h or nu curves");
    return simultaneous_band(curve_draws(draws, which), curve_grid(draws, which), delta);
}

namespace {

std::vector<double> average_ranks(std::span<const double> v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> rank(v.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
        const double r = 0.5 * (i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) rank[order[k]] = r;
        i = j + 1;
    }
    return rank;
}

}  // namespace

double spearman(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.size() < 2) throw DomainError("spearman needs two equal-length series");
    const auto ra = average_ranks(a);
    const auto rb = average_ranks(b);
    const double n = static_cast<double>(a.size());
    const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
    const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
    double sab = 0, saa = 0, sbb = 0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        sab += (ra[i] - ma) * (rb[i] - mb);
        saa += (ra[i] - ma) * (ra[i] - ma);
        sbb += (rb[i] - mb) * (rb[i] - mb);
    }
    if (saa == 0 || sbb == 0) return 0.0;
    return sab / std::sqrt(saa * sbb);
}

double central_secant_slope(std::span<const double> grid, std::span<const double> curve, double fraction) {
    if (grid.size() != curve.size() || grid.size() < 2) throw DomainError("secant slope needs a curve on a grid");
    const double lo = grid.front(), hi = grid.back();
    const double margin = 0.5 * (1.0 - fraction) * (hi - lo);
    const double a = lo + margin, b = hi - margin;
    auto interp = [&](double x) {
        auto it = std::lower_bound(grid.begin(), grid.end(), x);
        if (it == grid.begin()) return curve.front();
        if (it == grid.end()) return curve.back();
        const std::size_t k = it - grid.begin();
        const double t = (x - grid[k - 1]) / (grid[k] - grid[k - 1]);
        return curve[k - 1] + t * (curve[k] - curve[k - 1]);
    };
    return (interp(b) - interp(a)) / (b - a);
}

std::vector<double> secant_slope_draws(const PosteriorDraws& draws, Curve which, double fraction) {
    const auto& curves = curve_draws(draws, which);
    const auto& grid = curve_grid(draws, which);
    std::vector<double> out(curves.rows());
    std::vector<double> row(curves.cols());
    for (Eigen::Index r = 0; r < curves.rows(); ++r) {
        for (Eigen::Index g = 0; g < curves.cols(); ++g) row[g] = curves(r, g);
        out[r] = central_secant_slope(grid, row, fraction);
    }
    return out;
}

FirstStageRelevance first_stage_relevance(const PosteriorDraws& draws, double delta) {
    if (draws.mode != NpivMode::IV) throw ConfigError("first-stage relevance requires an IV fit");
    FirstStageRelevance out;
    out.grid = draws.grid_h;
    out.mean = posterior_mean_curve(draws.h_draws);
    out.band = simultaneous_band(draws.h_draws, draws.grid_h, delta);
    out.rank_correlation = spearman(draws.fitted_h_mean, draws.n_obs);
    out.secant_slope = central_secant_slope(out.grid, out.mean, 0.8);
    return out;
}

double quantile(std::vector<double> values, double p) {
    if (values.empty()) throw InsufficientDataError("quantile of an empty sample");
    std::sort(values.begin(), values.end());
    const double pos = std::clamp(p, 0.0, 1.0) * (values.size() - 1);
    const auto k = static_cast<std::size_t>(std::floor(pos));
    if (k + 1 >= values.size()) return values.back();
    return values[k] + (pos - k) * (values[k + 1] - values[k]);
}

BottleneckReport extract_optimum(const PosteriorDraws& draws, double delta, std::string station, std::string direction,
                                 double interval_minutes) {
    const auto mean = posterior_mean_curve(draws.s_draws);
    const auto band = simultaneous_band(draws.s_draws, draws.grid_s, delta);
    BottleneckReport r;
    r.station = std::move(station);
    r.direction = std::move(direction);
    r.interval_minutes = interval_minutes;
    r.delta = delta;
    r.support_lo = quantile(draws.n_obs, 0.01);
    r.support_hi = quantile(draws.n_obs, 0.99);
    int best = -1;
    for (std::size_t g = 0; g < draws.grid_s.size(); ++g) {
        const double x = draws.grid_s[g];
        if (x < r.support_lo || x > r.support_hi) continue;
        if (best < 0 || mean[g] > mean[best]) best = static_cast<int>(g);
    }
    if (best < 0) {
        // support narrower than one grid step: take the grid point nearest its centre
        const double mid = 0.5 * (r.support_lo + r.support_hi);
        best = 0;
        for (std::size_t g = 1; g < draws.grid_s.size(); ++g) {
            if (std::abs(draws.grid_s[g] - mid) < std::abs(draws.grid_s[best] - mid)) best = static_cast<int>(g);
        }
    }
    r.optimum_movements = draws.grid_s[best];
    r.max_flow = mean[best];
    r.min_headway_minutes = r.max_flow > 0 ? interval_minutes / r.max_flow : std::numeric_limits<double>::infinity();
    for (std::size_t g = best + 1; g < draws.grid_s.size(); ++g) {
        if (draws.grid_s[g] > r.support_hi) break;
        if (band.upper[g] < band.lower[best]) {
            r.significant_backward_bend = true;
            break;
        }
    }
    return r;
}

}  // namespace metroflow::npiv
