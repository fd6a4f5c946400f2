#pragma once

#include <span>

#include "metroflow/npiv/types.hpp"

namespace metroflow::npiv {

// Gibbs sampler for the spline NPIV model with a truncated Dirichlet-process mixture on the
// errors. Each sweep draws, in order: mixture components, stick fractions, concentration,
// first-stage coefficients (IV only; given the eps1 marginal of the mixture, without feedback
// from the outcome equation), the outcome-equation coefficients (intercept, S, nu) jointly,
// smoothing variances and finally cluster labels.
//
// Throws InsufficientDataError below 200 samples, DomainError for a constant instrument in IV
// mode or non-finite input, NumericalError (with the sweep index) for a degenerate design or a
// non-finite likelihood.
[[nodiscard]] PosteriorDraws gibbs_fit(std::span<const NpivSample> samples, const NpivModelSpec& spec,
                                       const DpmHyperparams& hyper, const McmcConfig& mcmc);

inline constexpr int kMinSamples = 200;

}  // namespace metroflow::npiv
