#include "metroflow/npiv/io.hpp"

#include <fstream>

#include "json.hpp"

#include "metroflow/csv.hpp"
#include "metroflow/errors.hpp"
#include "metroflow/svg.hpp"

namespace metroflow::npiv {

std::vector<NpivSample> read_samples_csv(std::istream& in, bool require_instrument) {
    const CsvTable table = read_csv(in);
    std::vector<std::string> required{"q", "n"};
    if (require_instrument) required.emplace_back("z");
    if (const auto missing = table.missing_columns(required); !missing.empty()) {
        std::string msg = "samples table is missing column(s):";
        for (const auto& m : missing) msg += " " + m;
        if (!table.header.empty()) {
            msg += " (found:";
            for (const auto& h : table.header) msg += " " + h;
            msg += ")";
        }
        throw ConfigError(msg);
    }
    if (table.rows.empty()) throw ConfigError("samples table has no rows");
    const int qc = table.column("q"), nc = table.column("n"), zc = table.column("z");
    std::vector<NpivSample> out;
    out.reserve(table.rows.size());
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        NpivSample s;
        s.q = parse_double(row.at(qc), r + 1, "q");
        s.n = parse_double(row.at(nc), r + 1, "n");
        s.z = zc >= 0 ? parse_double(row.at(zc), r + 1, "z") : s.n;
        out.push_back(s);
    }
    return out;
}

std::vector<NpivSample> read_samples_csv_file(const std::string& path, bool require_instrument) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open samples file " + path);
    return read_samples_csv(in, require_instrument);
}

void write_samples_csv(const std::vector<NpivSample>& samples, std::ostream& out) {
    out << "q,n,z\n";
    for (const auto& s : samples) out << format_double(s.q) << ',' << format_double(s.n) << ',' << format_double(s.z) << '\n';
}

void write_curve_csv(const std::vector<double>& mean, const CredibleBand& band, std::ostream& out) {
    if (mean.size() != band.grid.size()) throw DomainError("curve and band grids differ in length");
    out << "grid,mean,lower,upper\n";
    for (std::size_t g = 0; g < mean.size(); ++g) {
        out << format_double(band.grid[g]) << ',' << format_double(mean[g]) << ',' << format_double(band.lower[g]) << ','
            << format_double(band.upper[g]) << '\n';
    }
}

std::string report_to_json(const BottleneckReport& r, int retained_draws, NpivMode mode) {
    nlohmann::ordered_json j;
    j["station"] = r.station;
    j["direction"] = r.direction;
    j["mode"] = to_string(mode);
    j["optimum_movements"] = r.optimum_movements;
    j["max_flow"] = r.max_flow;
    j["interval_minutes"] = r.interval_minutes;
    j["min_headway_minutes"] = r.min_headway_minutes;
    j["significant_backward_bend"] = r.significant_backward_bend;
    j["support"] = {r.support_lo, r.support_hi};
    j["delta"] = r.delta;
    j["retained_draws"] = retained_draws;
    return j.dump(2) + "\n";
}

BottleneckReport report_from_json(const std::string& text) {
    try {
        const auto j = nlohmann::json::parse(text);
        BottleneckReport r;
        r.station = j.at("station").get<std::string>();
        r.direction = j.at("direction").get<std::string>();
        r.optimum_movements = j.at("optimum_movements").get<double>();
        r.max_flow = j.at("max_flow").get<double>();
        r.interval_minutes = j.at("interval_minutes").get<double>();
        r.min_headway_minutes = j.at("min_headway_minutes").get<double>();
        r.significant_backward_bend = j.at("significant_backward_bend").get<bool>();
        r.support_lo = j.at("support").at(0).get<double>();
        r.support_hi = j.at("support").at(1).get<double>();
        r.delta = j.at("delta").get<double>();
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad report JSON: ") + e.what());
    }
}

void write_curve_svg(const std::string& title, const std::string& x_label, const std::string& y_label,
                     const std::vector<double>& mean, const CredibleBand& band, const std::vector<double>& data_x,
                     const std::vector<double>& data_y, const BottleneckReport* report, const std::string& path) {
    SvgPlot plot(title, x_label, y_label);
    if (!data_x.empty()) plot.add_points(data_x, data_y, "#b0b0b0", 1.2, "data");
    plot.add_line(band.grid, band.lower, "#1f4e79", 1.0, "band", true);
    plot.add_line(band.grid, band.upper, "#1f4e79", 1.0, {}, true);
    plot.add_line(band.grid, mean, "#1f4e79", 2.0, "posterior mean");
    if (report) {
        const std::vector<double> px{report->optimum_movements}, py{report->max_flow};
        plot.add_points(px, py, "#c0392b", 5.0, "optimum");
    }
    plot.save(path);
}

void write_benchmark_csv(const MonteCarloResult& result, std::ostream& out) {
    out << "estimator,rmse\n";
    for (const auto& row : result.rows) out << row.name << ',' << format_double(row.rmse) << '\n';
}

void write_overlay_csv(const MonteCarloResult& result, std::ostream& out) {
    std::vector<std::string> names{"truth"};
    for (const auto& row : result.rows) names.push_back(row.name);
    out << "x";
    for (const auto& n : names) out << ',' << n;
    out << '\n';
    for (std::size_t g = 0; g < result.grid.size(); ++g) {
        out << format_double(result.grid[g]);
        for (const auto& n : names) out << ',' << format_double(result.curves.at(n)[g]);
        out << '\n';
    }
}

void write_overlay_svg(const MonteCarloResult& result, const std::string& path) {
    // curves are compared up to a constant, so each is shifted onto the truth's grid mean
    const auto& truth = result.curves.at("truth");
    double truth_mean = 0.0;
    for (double v : truth) truth_mean += v;
    truth_mean /= truth.size();
    SvgPlot plot("Monte Carlo estimators", "x", "s(x)");
    const char* colors[] = {"#e67e22", "#27ae60", "#8e44ad", "#1f4e79"};
    plot.add_line(result.grid, truth, "#000000", 2.4, "truth");
    for (std::size_t k = 0; k < result.rows.size(); ++k) {
        auto c = result.curves.at(result.rows[k].name);
        double m = 0.0;
        for (double v : c) m += v;
        m /= c.size();
        for (double& v : c) v += truth_mean - m;
        plot.add_line(result.grid, c, colors[k % 4], 1.4, result.rows[k].name, k < 2);
    }
    plot.save(path);
}

}  // namespace metroflow::npiv
