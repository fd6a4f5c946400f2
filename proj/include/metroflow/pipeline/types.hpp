#pragma once

#include <chrono>
#include <string>
#include <vector>

namespace metroflow::pipeline {

enum class Direction { Up, Down };

[[nodiscard]] const char* to_string(Direction d);
// Accepts up/upward and down/downward. Throws ConfigError otherwise.
[[nodiscard]] Direction parse_direction(const std::string& text);

// Calendar date, written and read as ISO-8601 YYYY-MM-DD.
struct Date {
    std::chrono::sys_days days{};

    [[nodiscard]] static Date parse(const std::string& iso);
    [[nodiscard]] std::string iso() const;
    [[nodiscard]] bool is_weekend() const;
    [[nodiscard]] Date plus(int n) const { return Date{days + std::chrono::days{n}}; }

    friend auto operator<=>(const Date&, const Date&) = default;
};

// One train arriving at a station, with the boardings + alightings it served.
struct ArrivalEvent {
    std::string station;
    Direction direction = Direction::Down;
    Date date;
    double time_s = 0;  // seconds after midnight
    double movements = 0;

    friend bool operator==(const ArrivalEvent&, const ArrivalEvent&) = default;
};

// Aggregate over one window of one service day.
struct IntervalObservation {
    std::string station;
    Direction direction = Direction::Down;
    Date date;
    int interval = 0;      // window index from the aggregation origin
    double flow = 0;       // mean inverse headway, trains per window
    double movements = 0;  // mean movements per arriving train
    int arrivals = 0;      // arrivals with a usable headway

    friend bool operator==(const IntervalObservation&, const IntervalObservation&) = default;
};

struct InstrumentedSample {
    std::string station;
    Direction direction = Direction::Down;
    Date date;
    int day = 0;  // position of `date` in the workday calendar
    int interval = 0;
    double q = 0;
    double n = 0;
    double z = 0;  // movements in the same window on the previous workday

    friend bool operator==(const InstrumentedSample&, const InstrumentedSample&) = default;
};

struct Moments {
    double mean = 0, sd = 0, min = 0, max = 0;
};

struct StationProfile {
    std::string station;
    Direction direction = Direction::Down;
    Moments flow;       // trains per 10 minutes
    Moments movements;  // pax per train
    // Movements at which the synthetic flow curve peaks.
    double optimum_movements = 0;

    void validate() const;
};

// Ordered set of workdays. Instruments come from the previous entry.
class WorkdayCalendar {
public:
    WorkdayCalendar() = default;
    explicit WorkdayCalendar(std::vector<Date> days);

    // Newline-delimited ISO dates; blank lines and '#' comments ignored.
    [[nodiscard]] static WorkdayCalendar parse(std::istream& in);
    [[nodiscard]] static WorkdayCalendar load(const std::string& path);
    // `count` Monday-to-Friday dates starting at `first` (weekends skipped).
    [[nodiscard]] static WorkdayCalendar weekdays(Date first, int count);

    [[nodiscard]] const std::vector<Date>& days() const { return days_; }
    [[nodiscard]] bool empty() const { return days_.empty(); }
    // Index of the date, or -1 if it is not a workday.
    [[nodiscard]] int index_of(Date d) const;

    void write(std::ostream& out) const;

private:
    std::vector<Date> days_;
};

}  // namespace metroflow::pipeline
