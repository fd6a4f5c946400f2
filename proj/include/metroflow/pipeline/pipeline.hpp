#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "metroflow/pipeline/types.hpp"
#include "metroflow/sim/types.hpp"

namespace metroflow::pipeline {

struct AggregationOptions {
    double window_s = 600.0;
    double origin_s = 0.0;  // window 0 starts here, seconds after midnight
};

struct AggregationResult {
    std::vector<IntervalObservation> observations;
    int dropped_windows = 0;  // windows with fewer than two usable arrivals
};

// Groups arrivals by (station, direction, date). Within a group the headway of each arrival is
// measured to the previous arrival, also across window edges; the first arrival of a day has
// none. Flow is the mean of window_s / headway, movements the mean over all arrivals in the
// window. Throws ConfigError when a group is not time-ordered.
[[nodiscard]] AggregationResult aggregate_intervals(std::span<const ArrivalEvent> events,
                                                    const AggregationOptions& options = {});

// Pairs each observation with the same (station, direction, interval) on the previous calendar
// workday. Rows on non-workdays or without a predecessor are dropped. Throws ConfigError for an
// empty calendar.
[[nodiscard]] std::vector<InstrumentedSample> build_instruments(std::span<const IntervalObservation> observations,
                                                                const WorkdayCalendar& calendar);

struct SyntheticOptions {
    Date first_day = Date::parse("2019-01-07");
    double service_start_s = 6 * 3600.0;
    double service_end_s = 24 * 3600.0;
    double window_s = 600.0;
    double day_rho = 0.7;          // AR(1) coefficient of the day-level multiplier
    double day_sd = 0.12;          // log-scale sd of the day multiplier
    double interval_sd = 0.18;     // log-scale sd of the per-window noise
    double train_cv = 0.25;        // per-train movement noise, as a fraction of the profile sd
    double headway_jitter = 0.05;  // relative sd of headways inside a window
    // Unobserved control: lowers movements and raises flow in the same window.
    double confounding = 0.0;
};

struct SyntheticData {
    std::vector<ArrivalEvent> events;
    WorkdayCalendar calendar;
};

// Two-peak time-of-day demand with a day-level AR(1) multiplier, scaled so that window means
// of movements match the profile; flow follows a concave curve in movements that peaks at the
// profile optimum at five trains per window. Deterministic per seed.
[[nodiscard]] SyntheticData generate_synthetic(const StationProfile& profile, int days, std::uint64_t seed,
                                               const SyntheticOptions& options = {});

// Arrivals of a simulator run at one station, dated and shifted by `offset_s`.
[[nodiscard]] std::vector<ArrivalEvent> arrivals_from_simulation(const sim::TrajectoryLog& log, int station_index,
                                                                 const std::string& station, Direction direction,
                                                                 Date date, double offset_s = 0.0);

// Runs the scenario once per workday (rng seed = seed + day index) and collects the arrivals
// at its bottleneck station. The scenario should carry run or step demand noise so days differ.
[[nodiscard]] SyntheticData simulate_service_days(const sim::ScenarioConfig& scenario, int days, std::uint64_t seed,
                                                  Date first_day = Date::parse("2019-01-07"),
                                                  const std::string& station = "bottleneck",
                                                  Direction direction = Direction::Down);

// Built-in profiles keyed as "<station-slug>-<up|down>", e.g. "prince-edward-down".
[[nodiscard]] const std::vector<std::pair<std::string, StationProfile>>& builtin_profiles();
[[nodiscard]] StationProfile named_profile(const std::string& key);

// Mean, sample sd (n - 1 denominator), min and max.
[[nodiscard]] Moments moments(std::span<const double> values);

}  // namespace metroflow::pipeline
