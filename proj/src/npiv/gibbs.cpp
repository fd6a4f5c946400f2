#include "metroflow/npiv/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "metroflow/errors.hpp"
#include "metroflow/npiv/dpm.hpp"

namespace metroflow::npiv {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using splines::SplineBasisSpec;

constexpr double kVarianceFloor = 1e-8;

struct Scale {
    double mean = 0.0;
    double sd = 1.0;
};

Scale standardizer(const std::vector<double>& v) {
    Scale s;
    s.mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
    double ss = 0.0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.sd = std::sqrt(ss / v.size());
    if (!(s.sd > 0)) s.sd = 1.0;
    return s;
}

// Row-wise local B-spline evaluations: row i touches columns first[i] .. first[i] + width - 1.
struct SparseBasis {
    SplineBasisSpec spec;
    int width = 0;
    std::vector<int> first;
    std::vector<double> values;
    VectorXd colmeans;

    void fill(const std::vector<double>& x) {
        width = spec.degree + 1;
        first.resize(x.size());
        values.resize(x.size() * width);
        colmeans = VectorXd::Zero(spec.basis_count());
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double xi = std::clamp(x[i], spec.lo, spec.hi);
            first[i] = splines::local_basis(xi, spec, std::span<double>(&values[i * width], width));
            for (int j = 0; j < width; ++j) colmeans(first[i] + j) += values[i * width + j];
        }
        colmeans /= static_cast<double>(x.size());
    }

    [[nodiscard]] double dot(std::size_t i, const VectorXd& beta) const {
        double s = 0.0;
        for (int j = 0; j < width; ++j) s += values[i * width + j] * beta(first[i] + j);
        return s;
    }
};

struct SplineBlock {
    SparseBasis basis;
    MatrixXd penalty;
    int rank = 0;
    double tau2 = 1.0;
    VectorXd beta;
    int offset = 0;  // position in the joint coefficient vector

    [[nodiscard]] int size() const { return basis.spec.basis_count(); }

    [[nodiscard]] MatrixXd prior_precision(double constant_precision) const {
        const int K = size();
        return penalty / tau2 + MatrixXd::Constant(K, K, constant_precision / K);
    }

    // Centred value at observation i.
    [[nodiscard]] double centred(std::size_t i) const { return basis.dot(i, beta) - basis.colmeans.dot(beta); }
};

// Joint Gaussian full conditional for [intercept | blocks] with column-centred spline blocks.
// Returns precision A and linear term b; the centred design is handled through the
// identity X_c = X - 1 M' with M = [0, colmeans...].
void centred_normal_equations(const std::vector<SplineBlock*>& blocks, const std::vector<double>& w,
                              const std::vector<double>& r, MatrixXd& A, VectorXd& b) {
    int dim = 1;
    for (auto* blk : blocks) {
        blk->offset = dim;
        dim += blk->size();
    }
    A = MatrixXd::Zero(dim, dim);
    b = VectorXd::Zero(dim);
    std::vector<int> idx;
    std::vector<double> val;
    for (std::size_t i = 0; i < w.size(); ++i) {
        idx.assign(1, 0);
        val.assign(1, 1.0);
        for (auto* blk : blocks) {
            const auto& B = blk->basis;
            for (int j = 0; j < B.width; ++j) {
                idx.push_back(blk->offset + B.first[i] + j);
                val.push_back(B.values[i * B.width + j]);
            }
        }
        const double wi = w[i];
        const double wr = wi * r[i];
        for (std::size_t a = 0; a < idx.size(); ++a) {
            const double wa = wi * val[a];
            b(idx[a]) += wr * val[a];
            for (std::size_t c = 0; c <= a; ++c) A(idx[a], idx[c]) += wa * val[c];
        }
    }
    A = A.selfadjointView<Eigen::Lower>();
    VectorXd M = VectorXd::Zero(dim);
    for (auto* blk : blocks) M.segment(blk->offset, blk->size()) = blk->basis.colmeans;
    const VectorXd c = A.col(0);
    const double s = A(0, 0);
    A = A - c * M.transpose() - M * c.transpose() + s * M * M.transpose();
    b = b - M * b(0);
}

VectorXd draw_gaussian(const MatrixXd& precision, const VectorXd& linear, std::mt19937_64& rng, bool sample,
                       int sweep) {
    Eigen::LLT<MatrixXd> llt(precision);
    if (llt.info() != Eigen::Success) {
        throw NumericalError("degenerate design: coefficient precision not positive definite at sweep " +
                             std::to_string(sweep));
    }
    VectorXd mean = llt.solve(linear);
    if (!sample) return mean;
    std::normal_distribution<double> n01;
    VectorXd xi(linear.size());
    for (Eigen::Index k = 0; k < xi.size(); ++k) xi(k) = n01(rng);
    return mean + llt.matrixU().solve(xi);
}

double quad_form(const MatrixXd& P, const VectorXd& beta) { return beta.dot(P * beta); }

double min_eigenvalue(const MatrixXd& S) {
    if (S.rows() == 1) return S(0, 0);
    const double tr = S(0, 0) + S(1, 1);
    const double det = S(0, 0) * S(1, 1) - S(0, 1) * S(1, 0);
    return 0.5 * tr - std::sqrt(std::max(0.0, 0.25 * tr * tr - det));
}

class Sampler {
public:
    Sampler(std::span<const NpivSample> samples, const NpivModelSpec& spec, const DpmHyperparams& hyper,
            const McmcConfig& mcmc)
        : spec_(spec), hyper_(hyper), mcmc_(mcmc), rng_(mcmc.seed), iv_(spec.mode == NpivMode::IV) {
        N_ = samples.size();
        std::vector<double> q(N_), n(N_);
        z_.resize(N_);
        for (std::size_t i = 0; i < N_; ++i) {
            q[i] = samples[i].q;
            n[i] = samples[i].n;
            z_[i] = samples[i].z;
        }
        n_obs_ = n;
        qs_ = standardizer(q);
        ns_ = standardizer(n);
        y_.resize(N_);
        nz_.resize(N_);
        for (std::size_t i = 0; i < N_; ++i) {
            y_[i] = (q[i] - qs_.mean) / qs_.sd;
            nz_[i] = (n[i] - ns_.mean) / ns_.sd;
        }
        d_ = iv_ ? 2 : 1;
        C_ = hyper.truncation;

        S_ = make_block(spec.second_stage_basis);
        S_.basis.fill(n);
        if (iv_) {
            H_ = make_block(spec.first_stage_basis);
            H_.basis.fill(z_);
            Nu_ = make_block(spec.control_fn_basis);
        }
    }

    PosteriorDraws run() {
        initialise();
        PosteriorDraws out;
        out.mode = spec_.mode;
        out.mcmc = mcmc_;
        out.n_obs = n_obs_;
        out.grid_s = splines::uniform_grid(S_.basis.spec.lo, S_.basis.spec.hi, spec_.grid_points);
        const int M = mcmc_.retained();
        out.s_draws.resize(M, spec_.grid_points);
        const MatrixXd Bs_grid = centred_grid_basis(S_, out.grid_s);
        MatrixXd Bh_grid, Bnu_grid;
        std::vector<double> nu_grid_std;
        if (iv_) {
            out.grid_h = splines::uniform_grid(H_.basis.spec.lo, H_.basis.spec.hi, spec_.grid_points);
            nu_grid_std = splines::uniform_grid(Nu_.basis.spec.lo, Nu_.basis.spec.hi, spec_.grid_points);
            out.grid_nu.resize(nu_grid_std.size());
            for (std::size_t g = 0; g < nu_grid_std.size(); ++g) out.grid_nu[g] = ns_.sd * nu_grid_std[g];
            out.h_draws.resize(M, spec_.grid_points);
            out.nu_draws.resize(M, spec_.grid_points);
            Bh_grid = centred_grid_basis(H_, out.grid_h);
            Bnu_grid = splines::basis_matrix(nu_grid_std, Nu_.basis.spec);
            out.fitted_h_mean.assign(N_, 0.0);
        }
        out.dpm.reserve(M);

        int kept = 0;
        for (int sweep = 1; sweep <= mcmc_.total_draws; ++sweep) {
            this->sweep(sweep);
            if (sweep <= mcmc_.burn_in || (sweep - mcmc_.burn_in) % mcmc_.thin != 0 || kept >= M) continue;

            const double level = alpha_ + mean(nu_i_) + mean(offset_);
            out.s_draws.row(kept) = (qs_.mean + qs_.sd * (level + (Bs_grid * S_.beta).array())).matrix().transpose();
            out.s_sample_mean.push_back(qs_.sd * mean(s_i_));
            if (iv_) {
                out.h_draws.row(kept) = (ns_.mean + ns_.sd * (Bh_grid * H_.beta).array()).matrix().transpose();
                const VectorXd nu = Bnu_grid * Nu_.beta;
                out.nu_draws.row(kept) =
                    (qs_.sd * (nu.array() - Nu_.basis.colmeans.dot(Nu_.beta))).matrix().transpose();
                out.nu_sample_mean.push_back(qs_.sd * mean(nu_i_));
                for (std::size_t i = 0; i < N_; ++i) out.fitted_h_mean[i] += ns_.mean + ns_.sd * h_i_[i];
            }
            DpmSummary summary;
            summary.weights = state_.weights;
            summary.alpha = state_.alpha;
            summary.occupied = static_cast<int>(std::count_if(counts_.begin(), counts_.end(), [](int c) { return c > 0; }));
            summary.min_sigma_eigenvalue = std::numeric_limits<double>::infinity();
            for (const auto& s : state_.sigma) summary.min_sigma_eigenvalue = std::min(summary.min_sigma_eigenvalue, min_eigenvalue(s));
            out.dpm.push_back(std::move(summary));
            ++kept;
        }
        if (iv_) {
            for (auto& v : out.fitted_h_mean) v /= kept;
        }
        out.final_state = state_;
        return out;
    }

private:
    static SplineBlock make_block(const SplineBasisSpec& spec) {
        SplineBlock b;
        b.basis.spec = spec;
        b.penalty = splines::difference_penalty(spec.basis_count(), spec.penalty_order);
        b.rank = spec.basis_count() - spec.penalty_order;
        b.beta = VectorXd::Zero(spec.basis_count());
        return b;
    }

    static MatrixXd centred_grid_basis(const SplineBlock& blk, const std::vector<double>& grid) {
        MatrixXd B = splines::basis_matrix(grid, blk.basis.spec);
        B.rowwise() -= blk.basis.colmeans.transpose();
        return B;
    }

    static double mean(const std::vector<double>& v) {
        if (v.empty()) return 0.0;
        return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    }

    static double variance(const std::vector<double>& v) {
        const double m = mean(v);
        double ss = 0.0;
        for (double x : v) ss += (x - m) * (x - m);
        return ss / static_cast<double>(v.size());
    }

    void initialise() {
        h_i_.assign(N_, 0.0);
        eps1_.assign(N_, 0.0);
        if (iv_) {
            std::vector<double> w(N_, 1.0);
            draw_first_stage(w, nz_, false, 0);
            // control-function domain from the starting residuals, with room to move
            auto [lo, hi] = std::minmax_element(eps1_.begin(), eps1_.end());
            double range = *hi - *lo;
            if (!(range > 0)) range = 1.0;
            Nu_.basis.spec.lo = *lo - 0.25 * range;
            Nu_.basis.spec.hi = *hi + 0.25 * range;
            Nu_.basis.spec.validate();
            Nu_.basis.fill(eps1_);
        }
        offset_.assign(N_, 0.0);
        weights_.assign(N_, 1.0);
        draw_outcome(false, 0);

        const double var_u = std::max(variance(u_), kVarianceFloor);
        if (hyper_.S_sigma) {
            prior_scale_ = iv_ ? MatrixXd(*hyper_.S_sigma) : MatrixXd::Constant(1, 1, (*hyper_.S_sigma)(1, 1));
        } else if (iv_) {
            prior_scale_ = MatrixXd::Zero(2, 2);
            prior_scale_(0, 0) = std::max(variance(eps1_), kVarianceFloor);
            prior_scale_(1, 1) = var_u;
        } else {
            prior_scale_ = MatrixXd::Constant(1, 1, var_u);
        }
        prior_mu_ = iv_ ? VectorXd(hyper_.mu_0) : VectorXd::Constant(1, hyper_.mu_0(1));

        state_.assignment.assign(N_, 0);
        state_.mu.assign(C_, VectorXd::Zero(d_));
        state_.sigma.assign(C_, prior_scale_);
        state_.sticks.assign(C_, 0.5);
        state_.sticks.back() = 1.0;
        state_.weights = stick_breaking_weights(state_.sticks);
        state_.alpha = hyper_.alpha_shape / hyper_.alpha_rate;
        counts_.assign(C_, 0);
        counts_[0] = static_cast<int>(N_);
    }

    void sweep(int it) {
        update_components();
        update_sticks();
        update_concentration();
        if (iv_) {
            std::vector<double> w(N_), target(N_);
            for (std::size_t i = 0; i < N_; ++i) {
                const int c = state_.assignment[i];
                w[i] = 1.0 / state_.sigma[c](0, 0);
                target[i] = nz_[i] - state_.mu[c](0);
            }
            draw_first_stage(w, target, true, it);
            Nu_.basis.fill(eps1_);
        }
        for (std::size_t i = 0; i < N_; ++i) {
            const int c = state_.assignment[i];
            const auto& mu = state_.mu[c];
            const auto& S = state_.sigma[c];
            if (iv_) {
                const double rho = S(1, 0) / S(0, 0);
                offset_[i] = mu(1) + rho * (eps1_[i] - mu(0));
                weights_[i] = 1.0 / std::max(S(1, 1) - rho * S(1, 0), 1e-300);
            } else {
                offset_[i] = mu(0);
                weights_[i] = 1.0 / S(0, 0);
            }
        }
        draw_outcome(true, it);
        update_smoothing();
        update_assignments(it);
    }

    void draw_first_stage(const std::vector<double>& w, const std::vector<double>& target, bool sample, int it) {
        MatrixXd A;
        VectorXd b;
        centred_normal_equations({&H_}, w, target, A, b);
        const int K = H_.size();
        MatrixXd prec = A.block(1, 1, K, K) + H_.prior_precision(hyper_.constant_precision);
        H_.beta = draw_gaussian(prec, b.segment(1, K), rng_, sample, it);
        for (std::size_t i = 0; i < N_; ++i) {
            h_i_[i] = H_.centred(i);
            eps1_[i] = nz_[i] - h_i_[i];
        }
    }

    void draw_outcome(bool sample, int it) {
        std::vector<SplineBlock*> blocks{&S_};
        if (iv_) blocks.push_back(&Nu_);
        std::vector<double> r(N_);
        for (std::size_t i = 0; i < N_; ++i) r[i] = y_[i] - offset_[i];
        MatrixXd A;
        VectorXd b;
        centred_normal_equations(blocks, weights_, r, A, b);
        for (auto* blk : blocks) {
            A.block(blk->offset, blk->offset, blk->size(), blk->size()) += blk->prior_precision(hyper_.constant_precision);
        }
        const VectorXd theta = draw_gaussian(A, b, rng_, sample, it);
        alpha_ = theta(0);
        for (auto* blk : blocks) blk->beta = theta.segment(blk->offset, blk->size());
        s_i_.resize(N_);
        nu_i_.assign(N_, 0.0);
        u_.resize(N_);
        for (std::size_t i = 0; i < N_; ++i) {
            s_i_[i] = S_.centred(i);
            if (iv_) nu_i_[i] = Nu_.centred(i);
            u_[i] = y_[i] - alpha_ - s_i_[i] - nu_i_[i];
        }
    }

    void update_smoothing() {
        std::vector<SplineBlock*> blocks{&S_};
        if (iv_) {
            blocks.push_back(&H_);
            blocks.push_back(&Nu_);
        }
        for (auto* blk : blocks) {
            const double shape = hyper_.smoothing_shape + 0.5 * blk->rank;
            const double rate = hyper_.smoothing_scale + 0.5 * quad_form(blk->penalty, blk->beta);
            blk->tau2 = 1.0 / sample_gamma(shape, rate, rng_);
        }
    }

    void update_components() {
        std::vector<std::vector<std::size_t>> members(C_);
        for (std::size_t i = 0; i < N_; ++i) members[state_.assignment[i]].push_back(i);
        const NiwPrior prior{prior_mu_, hyper_.tau_sigma, hyper_.s_sigma, prior_scale_};
        for (int c = 0; c < C_; ++c) {
            MatrixXd data(members[c].size(), d_);
            for (std::size_t k = 0; k < members[c].size(); ++k) {
                const std::size_t i = members[c][k];
                if (iv_) {
                    data(k, 0) = eps1_[i];
                    data(k, 1) = u_[i];
                } else {
                    data(k, 0) = u_[i];
                }
            }
            auto comp = sample_niw_posterior(prior, data, rng_);
            state_.mu[c] = std::move(comp.mu);
            state_.sigma[c] = std::move(comp.sigma);
        }
    }

    void update_sticks() {
        int tail = static_cast<int>(N_);
        for (int c = 0; c < C_ - 1; ++c) {
            tail -= counts_[c];
            double v = sample_beta(1.0 + counts_[c], state_.alpha + tail, rng_);
            state_.sticks[c] = std::min(v, 1.0 - 1e-12);
        }
        state_.sticks[C_ - 1] = 1.0;
        state_.weights = stick_breaking_weights(state_.sticks);
    }

    void update_concentration() {
        double log_remaining = 0.0;
        for (int c = 0; c < C_ - 1; ++c) log_remaining += std::log1p(-state_.sticks[c]);
        state_.alpha = sample_gamma(hyper_.alpha_shape + C_ - 1, hyper_.alpha_rate - log_remaining, rng_);
    }

    void update_assignments(int it) {
        std::vector<double> logw(C_), inv00(C_), inv01(C_), inv11(C_), lognorm(C_);
        for (int c = 0; c < C_; ++c) {
            const auto& S = state_.sigma[c];
            logw[c] = state_.weights[c] > 0 ? std::log(state_.weights[c]) : -std::numeric_limits<double>::infinity();
            if (d_ == 2) {
                const double det = S(0, 0) * S(1, 1) - S(0, 1) * S(1, 0);
                inv00[c] = S(1, 1) / det;
                inv11[c] = S(0, 0) / det;
                inv01[c] = -S(0, 1) / det;
                lognorm[c] = logw[c] - 0.5 * std::log(det);
            } else {
                inv00[c] = 1.0 / S(0, 0);
                lognorm[c] = logw[c] - 0.5 * std::log(S(0, 0));
            }
        }
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        std::vector<double> lp(C_);
        std::fill(counts_.begin(), counts_.end(), 0);
        for (std::size_t i = 0; i < N_; ++i) {
            double best = -std::numeric_limits<double>::infinity();
            for (int c = 0; c < C_; ++c) {
                if (!std::isfinite(lognorm[c])) {
                    lp[c] = -std::numeric_limits<double>::infinity();
                    continue;
                }
                double q;
                if (d_ == 2) {
                    const double a = eps1_[i] - state_.mu[c](0);
                    const double b = u_[i] - state_.mu[c](1);
                    q = a * a * inv00[c] + 2.0 * a * b * inv01[c] + b * b * inv11[c];
                } else {
                    const double a = u_[i] - state_.mu[c](0);
                    q = a * a * inv00[c];
                }
                lp[c] = lognorm[c] - 0.5 * q;
                best = std::max(best, lp[c]);
            }
            if (!std::isfinite(best)) {
                throw NumericalError("non-finite mixture likelihood for observation " + std::to_string(i) +
                                     " at sweep " + std::to_string(it));
            }
            double total = 0.0;
            for (int c = 0; c < C_; ++c) {
                lp[c] = std::isfinite(lp[c]) ? std::exp(lp[c] - best) : 0.0;
                total += lp[c];
            }
            double draw = unif(rng_) * total;
            int chosen = C_ - 1;
            for (int c = 0; c < C_; ++c) {
                draw -= lp[c];
                if (draw <= 0 && lp[c] > 0) {
                    chosen = c;
                    break;
                }
            }
            if (lp[chosen] == 0) {
                chosen = static_cast<int>(std::max_element(lp.begin(), lp.end()) - lp.begin());
            }
            state_.assignment[i] = chosen;
            ++counts_[chosen];
        }
    }

    NpivModelSpec spec_;
    DpmHyperparams hyper_;
    McmcConfig mcmc_;
    std::mt19937_64 rng_;
    bool iv_;
    std::size_t N_ = 0;
    int d_ = 2;
    int C_ = 20;
    Scale qs_, ns_;
    std::vector<double> y_, nz_, z_, n_obs_;
    SplineBlock S_, H_, Nu_;
    double alpha_ = 0.0;
    std::vector<double> h_i_, eps1_, s_i_, nu_i_, u_, offset_, weights_;
    MatrixXd prior_scale_;
    VectorXd prior_mu_;
    DpmState state_;
    std::vector<int> counts_;
};

}  // namespace

PosteriorDraws gibbs_fit(std::span<const NpivSample> samples, const NpivModelSpec& spec, const DpmHyperparams& hyper,
                         const McmcConfig& mcmc) {
    spec.validate();
    hyper.validate();
    mcmc.validate();
    if (samples.size() < static_cast<std::size_t>(kMinSamples)) {
        throw InsufficientDataError("NPIV needs at least " + std::to_string(kMinSamples) + " samples, got " +
                                    std::to_string(samples.size()));
    }
    double zmin = samples[0].z, zmax = samples[0].z;
    for (const auto& s : samples) {
        if (!std::isfinite(s.q) || !std::isfinite(s.n) || !std::isfinite(s.z)) {
            throw DomainError("non-finite value in NPIV samples");
        }
        zmin = std::min(zmin, s.z);
        zmax = std::max(zmax, s.z);
        if (s.n < spec.second_stage_basis.lo || s.n > spec.second_stage_basis.hi) {
            throw DomainError("covariate value " + std::to_string(s.n) + " outside the second-stage basis domain");
        }
        if (spec.mode == NpivMode::IV && (s.z < spec.first_stage_basis.lo || s.z > spec.first_stage_basis.hi)) {
            throw DomainError("instrument value " + std::to_string(s.z) + " outside the first-stage basis domain");
        }
    }
    if (spec.mode == NpivMode::IV && !(zmax > zmin)) throw DomainError("instrument is constant");
    Sampler sampler(samples, spec, hyper, mcmc);
    return sampler.run();
}

}  // namespace metroflow::npiv
