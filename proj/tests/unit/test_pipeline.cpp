#include <cmath>
#include <set>
#include <sstream>
#include <type_traits>

#include "doctest.h"

#include "metroflow/errors.hpp"
#include "metroflow/npiv/posterior.hpp"
#include "metroflow/pipeline/io.hpp"
#include "metroflow/pipeline/pipeline.hpp"
#include "metroflow/sim/scenarios.hpp"
#include "metroflow/sim/simulator.hpp"

using namespace metroflow;
using namespace metroflow::pipeline;

namespace {

const Date kMonday = Date::parse("2024-03-04");

std::vector<ArrivalEvent> arrivals(const std::vector<double>& times, double movements, Date date = kMonday,
                                   const std::string& station = "S") {
    std::vector<ArrivalEvent> out;
    for (double t : times) out.push_back({station, Direction::Down, date, t, movements});
    return out;
}

template <typename T>
concept Aggregatable = requires(std::vector<T> v) { aggregate_intervals(v); };

}  // namespace

TEST_CASE("dates and calendars") {
    CHECK(kMonday.iso() == "2024-03-04");
    CHECK_FALSE(kMonday.is_weekend());
    CHECK(kMonday.plus(5).is_weekend());
    CHECK(Date::parse("2024-02-29").iso() == "2024-02-29");
    CHECK_THROWS_AS((void)Date::parse("2023-02-29"), ConfigError);
    CHECK_THROWS_AS((void)Date::parse("2024-3-4"), ConfigError);

    const auto cal = WorkdayCalendar::weekdays(kMonday, 6);
    REQUIRE(cal.days().size() == 6);
    CHECK(cal.days()[5].iso() == "2024-03-11");
    CHECK(cal.index_of(kMonday.plus(5)) == -1);

    std::istringstream in("# holidays removed\n2024-03-05\n\n2024-03-04\n");
    const auto parsed = WorkdayCalendar::parse(in);
    CHECK(parsed.days().front() == kMonday);
    std::istringstream bad("2024-03-04\nnot-a-date\n");
    try {
        (void)WorkdayCalendar::parse(bad);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
    std::istringstream dup("2024-03-04\n2024-03-04\n");
    CHECK_THROWS_AS((void)WorkdayCalendar::parse(dup), ConfigError);
}

TEST_CASE("constant 120 s headways give five trains per window") {
    std::vector<double> t;
    for (int k = 0; k <= 20; ++k) t.push_back(120.0 * k);  // 0 .. 2400 s
    const auto ev = arrivals(t, 300.0);
    const auto res = aggregate_intervals(ev);
    REQUIRE(res.observations.size() == 4);
    CHECK(res.dropped_windows == 1);  // 2400 s is alone in window 4
    for (const auto& o : res.observations) {
        CHECK(o.flow == doctest::Approx(5.0));
        CHECK(o.movements == doctest::Approx(300.0));
    }
}

TEST_CASE("headways 100 and 150 average their inverses") {
    const auto ev = arrivals({590.0, 690.0, 840.0}, 10.0);
    const auto res = aggregate_intervals(ev);
    REQUIRE(res.observations.size() == 1);
    CHECK(res.observations[0].interval == 1);
    CHECK(res.observations[0].flow == doctest::Approx(5.0));
    CHECK(res.observations[0].arrivals == 2);
    CHECK(res.dropped_windows == 1);  // window 0 holds only the first arrival
}

TEST_CASE("single-arrival windows are dropped") {
    const auto ev = arrivals({100.0, 700.0}, 50.0);
    const auto res = aggregate_intervals(ev);
    CHECK(res.observations.empty());
    CHECK(res.dropped_windows == 2);
}

TEST_CASE("aggregation origin, streams and ordering") {
    auto ev = arrivals({21600.0, 21700.0, 21800.0}, 5.0);
    auto other = arrivals({21600.0, 21700.0, 21800.0}, 9.0, kMonday.plus(1));
    ev.insert(ev.end(), other.begin(), other.end());
    const auto res = aggregate_intervals(ev, {600.0, 21600.0});
    REQUIRE(res.observations.size() == 2);
    CHECK(res.observations[0].interval == 0);
    CHECK(res.observations[1].movements == doctest::Approx(9.0));

    const auto unordered = arrivals({200.0, 100.0}, 1.0);
    CHECK_THROWS_AS((void)aggregate_intervals(unordered), ConfigError);
    static_assert(Aggregatable<ArrivalEvent>);
    static_assert(!Aggregatable<IntervalObservation>);
}

TEST_CASE("instruments come from the previous workday") {
    const auto cal = WorkdayCalendar::weekdays(kMonday.plus(4), 3);  // Fri, Mon, Tue
    std::vector<IntervalObservation> obs;
    for (int d = 0; d < 3; ++d) {
        for (int i = 0; i < 2; ++i) obs.push_back({"S", Direction::Up, cal.days()[d], i, 4.0, 100.0 * (d + 1) + i, 3});
    }
    obs.push_back({"S", Direction::Up, kMonday.plus(5), 0, 4.0, 999.0, 3});  // Saturday, not a workday
    const auto s = build_instruments(obs, cal);
    REQUIRE(s.size() == 4);
    CHECK(s[0].date == cal.days()[1]);
    CHECK(s[0].z == doctest::Approx(100.0));  // Monday instrumented by Friday
    CHECK(s[1].z == doctest::Approx(101.0));
    CHECK(s[2].z == doctest::Approx(200.0));
    CHECK(s[2].day == 2);
    for (const auto& x : s) CHECK(x.date != cal.days()[0]);

    CHECK_THROWS_AS((void)build_instruments(obs, WorkdayCalendar{}), ConfigError);
    // a gap in the data leaves rows uninstrumented
    std::vector<IntervalObservation> gap{{"S", Direction::Up, cal.days()[2], 0, 4.0, 1.0, 3}};
    CHECK(build_instruments(gap, cal).empty());
}

TEST_CASE("synthetic Prince Edward downward data match the station profile moments") {
    const auto profile = named_profile("prince-edward-down");
    const auto data = generate_synthetic(profile, 60, 2024);
    CHECK(data.calendar.days().size() == 60);
    for (const auto& d : data.calendar.days()) CHECK_FALSE(d.is_weekend());
    const auto agg = aggregate_intervals(data.events, {600.0, 6 * 3600.0});
    std::vector<double> n;
    for (const auto& o : agg.observations) n.push_back(o.movements);
    const auto m = moments(n);
    CHECK(std::abs(m.mean - 451.50) <= 0.05 * 451.50);
    CHECK(std::abs(m.sd - 175.94) <= 0.10 * 175.94);

    const auto inst = build_instruments(agg.observations, data.calendar);
    std::vector<double> a, b;
    for (const auto& s : inst) {
        a.push_back(s.n);
        b.push_back(s.z);
        CHECK(s.z >= 0.0);
    }
    CHECK(npiv::spearman(a, b) >= 0.5);
}

TEST_CASE("synthetic data are deterministic per seed and constant for a zero-sd profile") {
    const auto profile = named_profile("lok-fu-up");
    CHECK(generate_synthetic(profile, 3, 9).events == generate_synthetic(profile, 3, 9).events);
    CHECK(generate_synthetic(profile, 3, 9).events != generate_synthetic(profile, 3, 10).events);

    auto flat = profile;
    flat.movements.sd = 0.0;
    const auto data = generate_synthetic(flat, 2, 1);
    REQUIRE_FALSE(data.events.empty());
    for (const auto& e : data.events) CHECK(e.movements == flat.movements.mean);
    CHECK_THROWS_AS((void)named_profile("nowhere-up"), ConfigError);
    CHECK(builtin_profiles().size() == 14);
}

TEST_CASE("no look-ahead in synthetic instruments") {
    const auto data = generate_synthetic(named_profile("mong-kok-up"), 8, 3);
    const auto agg = aggregate_intervals(data.events, {600.0, 6 * 3600.0});
    const auto inst = build_instruments(agg.observations, data.calendar);
    REQUIRE_FALSE(inst.empty());
    for (const auto& s : inst) {
        const int k = data.calendar.index_of(s.date);
        CHECK(k == s.day);
        CHECK(k >= 1);
        bool found = false;
        for (const auto& o : agg.observations) {
            if (o.date == data.calendar.days()[k - 1] && o.interval == s.interval) found = o.movements == s.z;
        }
        CHECK(found);
    }
}

TEST_CASE("simulator arrivals feed the aggregation") {
    auto cfg = sim::named_scenario("no-control");
    const auto log = sim::run_scenario(cfg);
    const int b = cfg.bottleneck_index();
    const auto ev = arrivals_from_simulation(log, b, "B", Direction::Down, kMonday);
    REQUIRE(ev.size() > 10);
    for (std::size_t k = 1; k < ev.size(); ++k) CHECK(ev[k].time_s >= ev[k - 1].time_s);
    const auto res = aggregate_intervals(ev);
    for (const auto& o : res.observations) {
        CHECK(o.arrivals >= 2);
        CHECK(o.flow > 0.0);
    }
}

TEST_CASE("event CSV round trip and schema errors") {
    const auto ev = generate_synthetic(named_profile("yau-ma-tei-up"), 1, 4).events;
    std::ostringstream os;
    write_events_csv(ev, os);
    std::istringstream in(os.str());
    const auto back = read_events_csv(in);
    REQUIRE(back.size() == ev.size());
    CHECK(back == ev);

    std::istringstream missing("station,date,time_s\nA,2024-03-04,1\n");
    try {
        (void)read_events_csv(missing);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("direction") != std::string::npos);
        CHECK(msg.find("movements") != std::string::npos);
    }
    std::istringstream bad_dir("station,direction,date,time_s,movements\nA,sideways,2024-03-04,1,2\n");
    CHECK_THROWS_AS((void)read_events_csv(bad_dir), ConfigError);

    std::ostringstream inst;
    write_instruments_csv({{"A", Direction::Up, kMonday, 1, 3, 4.5, 120.0, 110.0}}, inst);
    CHECK(inst.str() == "station,direction,date,day,interval,q,n,z\nA,up,2024-03-04,1,3,4.5,120,110\n");
}
