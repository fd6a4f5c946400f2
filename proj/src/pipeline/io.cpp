#include "metroflow/pipeline/io.hpp"

#include "metroflow/csv.hpp"
#include "metroflow/errors.hpp"

namespace metroflow::pipeline {

void write_events_csv(const std::vector<ArrivalEvent>& events, std::ostream& out) {
    out << "station,direction,date,time_s,movements\n";
    for (const auto& e : events) {
        out << e.station << ',' << to_string(e.direction) << ',' << e.date.iso() << ',' << format_double(e.time_s) << ','
            << format_double(e.movements) << '\n';
    }
}

std::vector<ArrivalEvent> read_events_csv(std::istream& in) {
    const CsvTable table = read_csv(in);
    const std::vector<std::string> required{"station", "direction", "date", "time_s", "movements"};
    if (const auto missing = table.missing_columns(required); !missing.empty()) {
        std::string msg = "event table is missing column(s):";
        for (const auto& m : missing) msg += " " + m;
        throw ConfigError(msg);
    }
    const int sc = table.column("station"), dc = table.column("direction"), dtc = table.column("date"),
              tc = table.column("time_s"), mc = table.column("movements");
    std::vector<ArrivalEvent> out;
    out.reserve(table.rows.size());
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        ArrivalEvent e;
        e.station = row.at(sc);
        try {
            e.direction = parse_direction(row.at(dc));
            e.date = Date::parse(row.at(dtc));
        } catch (const ConfigError& err) {
            throw ConfigError("row " + std::to_string(r + 1) + ": " + err.what());
        }
        e.time_s = parse_double(row.at(tc), r + 1, "time_s");
        e.movements = parse_double(row.at(mc), r + 1, "movements");
        out.push_back(std::move(e));
    }
    return out;
}

void write_observations_csv(const std::vector<IntervalObservation>& obs, std::ostream& out) {
    out << "station,direction,date,interval,flow,movements,arrivals\n";
    for (const auto& o : obs) {
        out << o.station << ',' << to_string(o.direction) << ',' << o.date.iso() << ',' << o.interval << ','
            << format_double(o.flow) << ',' << format_double(o.movements) << ',' << o.arrivals << '\n';
    }
}

void write_instruments_csv(const std::vector<InstrumentedSample>& samples, std::ostream& out) {
    out << "station,direction,date,day,interval,q,n,z\n";
    for (const auto& s : samples) {
        out << s.station << ',' << to_string(s.direction) << ',' << s.date.iso() << ',' << s.day << ',' << s.interval << ','
            << format_double(s.q) << ',' << format_double(s.n) << ',' << format_double(s.z) << '\n';
    }
}

std::vector<npiv::NpivSample> to_npiv_samples(const std::vector<InstrumentedSample>& samples) {
    std::vector<npiv::NpivSample> out;
    out.reserve(samples.size());
    for (const auto& s : samples) out.push_back({s.q, s.n, s.z});
    return out;
}

}  // namespace metroflow::pipeline
