#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "metroflow/npiv/monte_carlo.hpp"
#include "metroflow/npiv/types.hpp"

namespace metroflow::npiv {

// Samples table with columns q, n and (when require_instrument) z. Extra columns are ignored.
// Throws ConfigError listing missing columns, or for an empty table or a bad value.
[[nodiscard]] std::vector<NpivSample> read_samples_csv(std::istream& in, bool require_instrument = true);
[[nodiscard]] std::vector<NpivSample> read_samples_csv_file(const std::string& path, bool require_instrument = true);
void write_samples_csv(const std::vector<NpivSample>& samples, std::ostream& out);

// grid,mean,lower,upper
void write_curve_csv(const std::vector<double>& mean, const CredibleBand& band, std::ostream& out);

[[nodiscard]] std::string report_to_json(const BottleneckReport& report, int retained_draws, NpivMode mode);
// Parses what report_to_json writes; used to compare reports across runs.
[[nodiscard]] BottleneckReport report_from_json(const std::string& text);

// Posterior mean and band over a scatter of the data; the optimum is marked when given.
void write_curve_svg(const std::string& title, const std::string& x_label, const std::string& y_label,
                     const std::vector<double>& mean, const CredibleBand& band, const std::vector<double>& data_x,
                     const std::vector<double>& data_y, const BottleneckReport* report, const std::string& path);

// estimator,rmse
void write_benchmark_csv(const MonteCarloResult& result, std::ostream& out);
// grid then one column per curve (truth and every estimator)
void write_overlay_csv(const MonteCarloResult& result, std::ostream& out);
void write_overlay_svg(const MonteCarloResult& result, const std::string& path);

}  // namespace metroflow::npiv
