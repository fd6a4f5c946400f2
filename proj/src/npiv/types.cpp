#include "metroflow/npiv/types.hpp"

#include <algorithm>
#include <cctype>

#include "metroflow/errors.hpp"

namespace metroflow::npiv {

std::string to_string(NpivMode mode) { return mode == NpivMode::IV ? "iv" : "noniv"; }

NpivMode parse_mode(const std::string& text) {
    std::string lower(text);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower == "iv") return NpivMode::IV;
    if (lower == "noniv" || lower == "non-iv") return NpivMode::NonIV;
    throw ConfigError("unknown estimation mode '" + text + "' (expected iv or noniv)");
}

void NpivModelSpec::validate() const {
    second_stage_basis.validate();
    if (mode == NpivMode::IV) {
        first_stage_basis.validate();
        auto nu = control_fn_basis;
        nu.lo = 0.0;
        nu.hi = 1.0;
        nu.validate();
    }
    if (grid_points < 2) throw ConfigError("curve grid needs at least two points");
}

NpivModelSpec default_model_spec(const std::vector<NpivSample>& samples, NpivMode mode) {
    if (samples.empty()) throw InsufficientDataError("no samples");
    NpivModelSpec spec;
    spec.mode = mode;
    auto [nlo, nhi] = std::minmax_element(samples.begin(), samples.end(),
                                          [](const NpivSample& a, const NpivSample& b) { return a.n < b.n; });
    auto [zlo, zhi] = std::minmax_element(samples.begin(), samples.end(),
                                          [](const NpivSample& a, const NpivSample& b) { return a.z < b.z; });
    spec.second_stage_basis.lo = nlo->n;
    spec.second_stage_basis.hi = nhi->n > nlo->n ? nhi->n : nlo->n + 1.0;
    spec.first_stage_basis.lo = zlo->z;
    spec.first_stage_basis.hi = zhi->z > zlo->z ? zhi->z : zlo->z + 1.0;
    return spec;
}

void DpmHyperparams::validate() const {
    if (!(tau_sigma > 0)) throw ConfigError("tau_sigma must be positive");
    if (!(s_sigma > 1)) throw ConfigError("s_sigma must exceed 1");
    if (S_sigma) {
        const Eigen::Matrix2d& S = *S_sigma;
        if ((S - S.transpose()).cwiseAbs().maxCoeff() > 1e-12 || S(0, 0) <= 0 || S.determinant() <= 0) {
            throw ConfigError("S_sigma must be symmetric positive definite");
        }
    }
    if (!(alpha_shape > 0) || !(alpha_rate > 0)) throw ConfigError("alpha prior must have positive shape and rate");
    if (truncation < 2) throw ConfigError("DPM truncation must be >= 2");
    if (!(smoothing_shape > 0) || !(smoothing_scale > 0)) throw ConfigError("smoothing prior must be positive");
    if (!(constant_precision > 0)) throw ConfigError("constant_precision must be positive");
}

void McmcConfig::validate() const {
    if (total_draws < 1) throw ConfigError("total_draws must be positive");
    if (burn_in < 0 || burn_in >= total_draws) throw ConfigError("burn_in must be in [0, total_draws)");
    if (thin < 1) throw ConfigError("thin must be >= 1");
    if (retained() < 1) throw ConfigError("MCMC configuration retains no draws");
}

}  // namespace metroflow::npiv
