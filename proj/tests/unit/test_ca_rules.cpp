#include "doctest.h"

#include <cmath>

#include "metroflow/errors.hpp"
#include "metroflow/sim/ca_rules.hpp"

using namespace metroflow::sim;

namespace {

TrainState moving(int x, int v) {
    TrainState t;
    t.index = 1;
    t.position = x;
    t.velocity = v;
    return t;
}

}  // namespace

TEST_CASE("minimum instantaneous distance") {
    CHECK(min_instantaneous_distance(0, 1, 50) == 50.0);
    CHECK(min_instantaneous_distance(20, 1, 50) == 250.0);
    CHECK(min_instantaneous_distance(10, 1, 50) == 100.0);
    CHECK(min_instantaneous_distance(3, 2, 0) == doctest::Approx(2.25));
}

TEST_CASE("scaled comparison agrees with rational arithmetic") {
    for (int v = 0; v <= 30; ++v) {
        for (int b = 1; b <= 4; ++b) {
            for (int gap = 0; gap <= 300; gap += 7) {
                const double d = double(v) * v / (2.0 * b) + 17;
                const auto cmp = compare_to_min_distance(gap, v, b, 17);
                if (gap > d) CHECK(cmp > 0);
                if (gap < d) CHECK(cmp < 0);
                if (gap == d) CHECK(cmp == 0);
            }
        }
    }
    // L_s = 1/(2a) + SM = 50.5 with a = 1
    CHECK(compare_to_departure_distance(50, 1, 50) < 0);
    CHECK(compare_to_departure_distance(51, 1, 50) > 0);
}

TEST_CASE("stop approach velocity is the floored braking envelope") {
    CHECK(stop_approach_velocity(0, 1) == 0);
    CHECK(stop_approach_velocity(50, 1) == 10);
    CHECK(stop_approach_velocity(49, 1) == 9);
    for (int g = 0; g < 5000; g += 13) {
        for (int b = 1; b <= 3; ++b) {
            const int v = stop_approach_velocity(g, b);
            CHECK(static_cast<long>(v) * v <= 2L * b * g);
            CHECK(static_cast<long>(v + 1) * (v + 1) > 2L * b * g);
        }
    }
}

TEST_CASE("following update branches") {
    LineConfig cfg;
    SUBCASE("accelerate branch caps at v_max") {
        auto t = update_following(moving(100, 20), 400, cfg);
        CHECK(t.velocity == 20);
        CHECK(t.position == 120);
    }
    SUBCASE("decelerate branch") {
        auto t = update_following(moving(100, 10), 150, cfg);
        CHECK(t.velocity == 9);
        CHECK(t.position == 109);
    }
    SUBCASE("hold branch at exact distance") {
        auto t = update_following(moving(100, 10), 200, cfg);
        CHECK(t.velocity == 10);
        CHECK(t.position == 110);
    }
    SUBCASE("deceleration clamps at zero") {
        auto t = update_following(moving(100, 0), 120, cfg);
        CHECK(t.velocity == 0);
        CHECK(t.position == 100);
    }
    SUBCASE("leader behind is a collision bug") {
        CHECK_THROWS_AS((void)update_following(moving(100, 5), 100, cfg), metroflow::CollisionError);
    }
}

TEST_CASE("approach to an empty station") {
    LineConfig cfg;
    CHECK(update_approaching_empty_station(moving(100, 20), 300, cfg).velocity == 20);
    auto braking = update_approaching_empty_station(moving(100, 20), 50, cfg);
    CHECK(braking.velocity == 10);
    CHECK(braking.position == 110);
    auto arrival = update_approaching_empty_station(moving(999, 1), 0, cfg);
    CHECK(arrival.velocity == 0);
    CHECK(arrival.position == 999);

    // From rest the train creeps to the platform and stops exactly on it.
    for (int g : {1, 2, 5, 17, 50, 133}) {
        TrainState t = moving(1000 - g, 0);
        int steps = 0;
        while (t.position != 1000 && steps < 1000) {
            t = update_approaching_empty_station(t, 1000 - t.position, cfg);
            REQUIRE(t.position <= 1000);
            ++steps;
        }
        CHECK(t.position == 1000);
    }
}

TEST_CASE("dwelling and departure") {
    LineConfig cfg;
    TrainState t = moving(1000, 0);
    t.dwell_elapsed = 29;
    auto still = update_dwelling(t, 30, 200, cfg);
    CHECK(still.train.velocity == 0);
    CHECK(still.train.dwell_elapsed == 30);
    CHECK_FALSE(still.departed);

    t.dwell_elapsed = 30;
    auto go = update_dwelling(t, 30, 200, cfg);
    CHECK(go.departed);
    CHECK(go.train.velocity == 1);
    CHECK(go.train.position == 1001);

    auto blocked = update_dwelling(t, 30, 40, cfg);
    CHECK_FALSE(blocked.departed);
    CHECK(blocked.train.velocity == 0);
    CHECK(blocked.train.dwell_elapsed == 30);
}

TEST_CASE("bottleneck dwell time") {
    BottleneckDwell m{40.0, 400.0, 0.1};
    CHECK(bottleneck_dwell_time(4.0, 100, m).seconds == 40);
    auto r = bottleneck_dwell_time(10.0, 70, m);
    CHECK(r.seconds == 70);
    CHECK(r.movements == doctest::Approx(700.0));
    CHECK(bottleneck_dwell_time(0.0, 500, m).seconds == 40);
    // 40 + 0.1 * 4.6 = 40.46 rounds down, 40 + 0.1 * 5.2 rounds up
    CHECK(bottleneck_dwell_time(4.046, 100, m).seconds == 40);
    CHECK(bottleneck_dwell_time(4.052, 100, m).seconds == 41);
}
