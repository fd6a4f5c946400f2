#include "metroflow/pipeline/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <tuple>

#include "metroflow/errors.hpp"
#include "metroflow/sim/simulator.hpp"

namespace metroflow::pipeline {

namespace {

using StreamKey = std::tuple<std::string, Direction, Date>;

struct WindowAcc {
    double inverse_sum = 0;
    int usable = 0;
    double movement_sum = 0;
    int count = 0;
};

}  // namespace

Moments moments(std::span<const double> values) {
    if (values.empty()) throw InsufficientDataError("moments of an empty sample");
    Moments m;
    m.min = *std::min_element(values.begin(), values.end());
    m.max = *std::max_element(values.begin(), values.end());
    for (double v : values) m.mean += v;
    m.mean /= values.size();
    if (values.size() > 1) {
        double ss = 0;
        for (double v : values) ss += (v - m.mean) * (v - m.mean);
        m.sd = std::sqrt(ss / (values.size() - 1));
    }
    return m;
}

AggregationResult aggregate_intervals(std::span<const ArrivalEvent> events, const AggregationOptions& options) {
    if (!(options.window_s > 0)) throw ConfigError("aggregation window must be positive");
    std::map<StreamKey, std::vector<const ArrivalEvent*>> streams;
    for (const auto& e : events) streams[{e.station, e.direction, e.date}].push_back(&e);

    AggregationResult out;
    for (const auto& [key, arrivals] : streams) {
        std::map<int, WindowAcc> windows;
        double prev_t = std::numeric_limits<double>::quiet_NaN();
        for (const auto* e : arrivals) {
            if (e->time_s < prev_t) {
                throw ConfigError("arrivals for " + e->station + " " + to_string(e->direction) + " on " + e->date.iso() +
                                  " are not time-ordered");
            }
            if (e->time_s >= options.origin_s) {
                auto& w = windows[static_cast<int>(std::floor((e->time_s - options.origin_s) / options.window_s))];
                w.movement_sum += e->movements;
                ++w.count;
                const double headway = e->time_s - prev_t;
                if (headway > 0) {  // false for NaN (first arrival of the day)
                    w.inverse_sum += options.window_s / headway;
                    ++w.usable;
                }
            }
            prev_t = e->time_s;
        }
        for (const auto& [index, w] : windows) {
            if (w.usable < 2) {
                ++out.dropped_windows;
                continue;
            }
            out.observations.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), index,
                                        w.inverse_sum / w.usable, w.movement_sum / w.count, w.usable});
        }
    }
    return out;
}

std::vector<InstrumentedSample> build_instruments(std::span<const IntervalObservation> observations,
                                                  const WorkdayCalendar& calendar) {
    if (calendar.empty()) throw ConfigError("workday calendar is empty");
    std::map<std::tuple<std::string, Direction, Date, int>, double> lookup;
    for (const auto& o : observations) lookup[{o.station, o.direction, o.date, o.interval}] = o.movements;

    std::vector<InstrumentedSample> out;
    for (const auto& o : observations) {
        const int k = calendar.index_of(o.date);
        if (k <= 0) continue;
        const auto it = lookup.find({o.station, o.direction, calendar.days()[k - 1], o.interval});
        if (it == lookup.end()) continue;
        out.push_back({o.station, o.direction, o.date, k, o.interval, o.flow, o.movements, it->second});
    }
    return out;
}

SyntheticData generate_synthetic(const StationProfile& profile, int days, std::uint64_t seed,
                                 const SyntheticOptions& opt) {
    profile.validate();
    if (days < 1) throw ConfigError("synthetic data needs at least one day");
    if (!(opt.service_end_s > opt.service_start_s) || !(opt.window_s > 0)) throw ConfigError("bad service window");
    if (!(std::abs(opt.day_rho) < 1)) throw ConfigError("day_rho must lie in (-1, 1)");

    SyntheticData out;
    out.calendar = WorkdayCalendar::weekdays(opt.first_day, days);
    const int W = static_cast<int>((opt.service_end_s - opt.service_start_s) / opt.window_s);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n01;

    std::vector<double> base(W);
    for (int i = 0; i < W; ++i) {
        const double h = (opt.service_start_s + (i + 0.5) * opt.window_s) / 3600.0;
        base[i] = 0.3 + std::exp(-0.5 * std::pow((h - 8.5) / 1.0, 2)) + 0.8 * std::exp(-0.5 * std::pow((h - 18.5) / 1.25, 2));
    }

    // latent demand per (day, window), then an affine map onto the profile moments
    std::vector<double> raw(static_cast<std::size_t>(days) * W), control(raw.size());
    double level = n01(rng);
    for (int d = 0; d < days; ++d) {
        if (d > 0) level = opt.day_rho * level + std::sqrt(1 - opt.day_rho * opt.day_rho) * n01(rng);
        for (int i = 0; i < W; ++i) {
            const std::size_t k = static_cast<std::size_t>(d) * W + i;
            control[k] = n01(rng);
            raw[k] = base[i] * std::exp(opt.day_sd * level + opt.interval_sd * n01(rng) - 0.15 * opt.confounding * control[k]);
        }
    }
    const Moments rm = moments(raw);
    const auto& mv = profile.movements;
    const double N = profile.optimum_movements;
    std::vector<double> n_target(raw.size()), shape(raw.size()), q_target(raw.size());
    for (std::size_t k = 0; k < raw.size(); ++k) {
        const double n = rm.sd > 0 ? mv.mean + mv.sd * (raw[k] - rm.mean) / rm.sd : mv.mean;
        n_target[k] = std::clamp(n, mv.min, mv.max);
        shape[k] = 1.0 - std::pow((n_target[k] - N) / N, 2);
    }
    // flow = 5 - b (1 - shape): peaks at five trains per window at the optimum, with b chosen so
    // that the structural part plus noise carries the profile flow sd
    const double noise_sd = 0.3 * profile.flow.sd;
    const double shape_sd = moments(shape).sd;
    const double structural_sd = std::sqrt(std::max(0.0, profile.flow.sd * profile.flow.sd - noise_sd * noise_sd));
    const double b = shape_sd > 1e-12 ? structural_sd / shape_sd : 0.0;
    for (std::size_t k = 0; k < raw.size(); ++k) {
        const double q = 5.0 - b * (1.0 - shape[k]) + 0.6 * opt.confounding * control[k] + noise_sd * n01(rng);
        q_target[k] = std::clamp(q, std::max(profile.flow.min, 0.5), std::max(profile.flow.max, 0.5));
    }

    for (int d = 0; d < days; ++d) {
        const Date date = out.calendar.days()[d];
        double t = opt.service_start_s;
        for (;;) {
            const int i = static_cast<int>((t - opt.service_start_s) / opt.window_s);
            if (i >= W) break;
            const double mean_headway = opt.window_s / q_target[static_cast<std::size_t>(d) * W + i];
            t += std::max(0.5 * mean_headway, mean_headway * (1.0 + opt.headway_jitter * n01(rng)));
            if (t >= opt.service_end_s) break;
            const int j = std::min(W - 1, static_cast<int>((t - opt.service_start_s) / opt.window_s));
            const double mov = n_target[static_cast<std::size_t>(d) * W + j] + opt.train_cv * mv.sd * n01(rng);
            out.events.push_back({profile.station, profile.direction, date, t, std::max(0.0, mov)});
        }
    }
    return out;
}

std::vector<ArrivalEvent> arrivals_from_simulation(const sim::TrajectoryLog& log, int station_index,
                                                   const std::string& station, Direction direction, Date date,
                                                   double offset_s) {
    std::vector<ArrivalEvent> out;
    for (const auto& e : log.events) {
        if (e.kind == sim::EventKind::Arrival && e.station == station_index) {
            out.push_back({station, direction, date, e.t + offset_s, e.movements});
        }
    }
    return out;
}

SyntheticData simulate_service_days(const sim::ScenarioConfig& scenario, int days, std::uint64_t seed, Date first_day,
                                    const std::string& station, Direction direction) {
    if (days < 1) throw ConfigError("need at least one simulated day");
    const int b = scenario.bottleneck_index();
    if (b < 0) throw ConfigError("scenario has no bottleneck station");
    SyntheticData out;
    out.calendar = WorkdayCalendar::weekdays(first_day, days);
    for (int d = 0; d < days; ++d) {
        auto cfg = scenario;
        cfg.rng_seed = seed + static_cast<std::uint64_t>(d);
        const auto log = sim::run_scenario(cfg);
        auto ev = arrivals_from_simulation(log, b, station, direction, out.calendar.days()[d]);
        out.events.insert(out.events.end(), ev.begin(), ev.end());
    }
    return out;
}

const std::vector<std::pair<std::string, StationProfile>>& builtin_profiles() {
    // flow: mean, sd, min, max (tr/10min); movements: mean, sd, min, max (pax/train); optimum
    static const std::vector<std::pair<std::string, StationProfile>> profiles = [] {
        struct Row {
            const char* key;
            const char* name;
            Direction dir;
            Moments flow, mov;
            double optimum;
        };
        const Row rows[] = {
            {"wong-tai-sin-down", "Wong Tai Sin", Direction::Down, {3.23, 1.00, 0.35, 8.58}, {224.50, 87.62, 8.00, 653.00}, 0},
            {"wong-tai-sin-up", "Wong Tai Sin", Direction::Up, {3.40, 1.06, 0.33, 9.02}, {210.00, 67.36, 4.00, 506.00}, 0},
            {"lok-fu-down", "Lok Fu", Direction::Down, {3.33, 1.03, 0.35, 7.54}, {105.28, 41.24, 3.00, 381.00}, 0},
            {"lok-fu-up", "Lok Fu", Direction::Up, {3.38, 1.07, 0.32, 9.20}, {106.60, 40.79, 3.00, 283.50}, 0},
            {"kowloon-tong-down", "Kowloon Tong", Direction::Down, {3.32, 1.02, 0.33, 7.74}, {551.70, 222.28, 19.00, 2244.00}, 0},
            {"kowloon-tong-up", "Kowloon Tong", Direction::Up, {3.34, 1.05, 0.38, 8.75}, {519.50, 191.67, 10.00, 1574.50}, 900},
            {"shek-kip-mei-down", "Shek Kip Mei", Direction::Down, {3.34, 1.01, 0.33, 8.70}, {88.67, 31.99, 3.00, 293.00}, 0},
            {"shek-kip-mei-up", "Shek Kip Mei", Direction::Up, {3.35, 1.04, 0.34, 9.68}, {86.10, 33.19, 5.33, 406.33}, 0},
            {"prince-edward-down", "Prince Edward", Direction::Down, {3.34, 1.04, 0.33, 8.70}, {451.50, 175.94, 6.00, 1523.00}, 900},
            {"prince-edward-up", "Prince Edward", Direction::Up, {3.32, 1.02, 0.36, 9.49}, {416.00, 158.57, 3.00, 1703.50}, 800},
            {"mong-kok-down", "Mong Kok", Direction::Down, {3.35, 1.01, 0.34, 8.19}, {544.60, 257.76, 10.00, 1697.70}, 0},
            {"mong-kok-up", "Mong Kok", Direction::Up, {3.02, 1.00, 0.37, 10.35}, {293.40, 146.84, 12.00, 1595.00}, 700},
            {"yau-ma-tei-down", "Yau Ma Tei", Direction::Down, {3.34, 1.02, 0.34, 8.25}, {115.53, 46.66, 2.00, 398.00}, 0},
            {"yau-ma-tei-up", "Yau Ma Tei", Direction::Up, {3.29, 1.00, 0.33, 10.79}, {524.70, 274.03, 29.00, 2798.00}, 1100},
        };
        std::vector<std::pair<std::string, StationProfile>> v;
        for (const auto& r : rows) {
            // stations without an active bottleneck peak beyond the observed range
            const double optimum = r.optimum > 0 ? r.optimum : r.mov.max;
            v.emplace_back(r.key, StationProfile{r.name, r.dir, r.flow, r.mov, optimum});
        }
        return v;
    }();
    return profiles;
}

StationProfile named_profile(const std::string& key) {
    for (const auto& [k, p] : builtin_profiles()) {
        if (k == key) return p;
    }
    std::string known;
    for (const auto& [k, p] : builtin_profiles()) known += (known.empty() ? "" : ", ") + k;
    throw ConfigError("unknown station profile '" + key + "' (known: " + known + ")");
}

}  // namespace metroflow::pipeline
