#include "metroflow/pipeline/types.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>

#include "metroflow/errors.hpp"

namespace metroflow::pipeline {

const char* to_string(Direction d) { return d == Direction::Up ? "up" : "down"; }

Direction parse_direction(const std::string& text) {
    if (text == "up" || text == "upward") return Direction::Up;
    if (text == "down" || text == "downward") return Direction::Down;
    throw ConfigError("unknown direction '" + text + "' (expected up or down)");
}

Date Date::parse(const std::string& iso) {
    auto bad = [&] { return ConfigError("bad date '" + iso + "' (expected YYYY-MM-DD)"); };
    if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-') throw bad();
    auto field = [&](std::size_t pos, std::size_t len) {
        int v = 0;
        auto [ptr, ec] = std::from_chars(iso.data() + pos, iso.data() + pos + len, v);
        if (ec != std::errc{} || ptr != iso.data() + pos + len) throw bad();
        return v;
    };
    const std::chrono::year_month_day ymd{std::chrono::year{field(0, 4)},
                                          std::chrono::month{static_cast<unsigned>(field(5, 2))},
                                          std::chrono::day{static_cast<unsigned>(field(8, 2))}};
    if (!ymd.ok()) throw bad();
    return Date{std::chrono::sys_days{ymd}};
}

std::string Date::iso() const {
    const std::chrono::year_month_day ymd{days};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                  static_cast<unsigned>(ymd.day()));
    return buf;
}

bool Date::is_weekend() const {
    const std::chrono::weekday wd{days};
    return wd == std::chrono::Saturday || wd == std::chrono::Sunday;
}

namespace {

void check_moments(const Moments& m, const std::string& what) {
    if (!(m.sd >= 0)) throw ConfigError(what + " sd must be non-negative");
    if (!(m.min <= m.mean && m.mean <= m.max)) throw ConfigError(what + " must satisfy min <= mean <= max");
}

}  // namespace

void StationProfile::validate() const {
    check_moments(flow, "flow");
    check_moments(movements, "movements");
    if (!(flow.min >= 0)) throw ConfigError("flow minimum must be non-negative");
    if (!(movements.min >= 0)) throw ConfigError("movements minimum must be non-negative");
    if (!(optimum_movements > 0)) throw ConfigError("optimum movements must be positive");
}

WorkdayCalendar::WorkdayCalendar(std::vector<Date> days) : days_(std::move(days)) {
    std::sort(days_.begin(), days_.end());
    if (std::adjacent_find(days_.begin(), days_.end()) != days_.end()) throw ConfigError("calendar lists a date twice");
}

WorkdayCalendar WorkdayCalendar::parse(std::istream& in) {
    std::vector<Date> days;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line.erase(0, line.find_first_not_of(" \t\r"));
        line.erase(line.find_last_not_of(" \t\r") + 1);
        if (line.empty()) continue;
        try {
            days.push_back(Date::parse(line));
        } catch (const ConfigError& e) {
            throw ConfigError("calendar line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return WorkdayCalendar(std::move(days));
}

WorkdayCalendar WorkdayCalendar::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open calendar file " + path);
    return parse(in);
}

WorkdayCalendar WorkdayCalendar::weekdays(Date first, int count) {
    std::vector<Date> days;
    for (Date d = first; static_cast<int>(days.size()) < count; d = d.plus(1)) {
        if (!d.is_weekend()) days.push_back(d);
    }
    return WorkdayCalendar(std::move(days));
}

int WorkdayCalendar::index_of(Date d) const {
    const auto it = std::lower_bound(days_.begin(), days_.end(), d);
    if (it == days_.end() || *it != d) return -1;
    return static_cast<int>(it - days_.begin());
}

void WorkdayCalendar::write(std::ostream& out) const {
    for (const auto& d : days_) out << d.iso() << '\n';
}

}  // namespace metroflow::pipeline
