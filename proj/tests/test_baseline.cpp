#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "dronesim/baseline.hpp"

using namespace dronesim;

namespace {
const std::vector<int> kFree{4, 3, 2};
}

TEST_CASE("hysteresis gates the handover decision") {
    // serving 0 at -80; candidate 1 at -74 is 6 dB up: stays
    Action a = baseline_action({-80.0, -74.0, -90.0}, 0, kFree, true, 7.0, 100);
    CHECK(a.target_bs == 0);
    CHECK(a.rrb_count == 4);
    CHECK(a.power_level == 0);

    // 7.1 dB up: switches and uses the target's free RRBs
    a = baseline_action({-80.0, -72.9, -90.0}, 0, kFree, true, 7.0, 100);
    CHECK(a.target_bs == 1);
    CHECK(a.rrb_count == 3);

    // exactly 7.0 dB is not strictly above the threshold: stays
    a = baseline_action({-80.0, -73.0, -90.0}, 0, kFree, true, 7.0, 100);
    CHECK(a.target_bs == 0);

    // all equal RSS: no candidate beats the serving BS
    a = baseline_action({-80.0, -80.0, -80.0}, 1, kFree, true, 7.0, 100);
    CHECK(a.target_bs == 1);
}

TEST_CASE("handover instants are respected") {
    // 20 dB up but ho_allowed is false: stays on the serving BS
    Action a = baseline_action({-90.0, -70.0, -95.0}, 0, kFree, false, 7.0, 50);
    CHECK(a.target_bs == 0);
    CHECK(a.rrb_count == 4);
}

TEST_CASE("transmission follows the buffer") {
    // empty buffer: no grant even with signal to spare
    Action a = baseline_action({-80.0, -95.0, -95.0}, 0, kFree, true, 7.0, 0);
    CHECK(a.rrb_count == 0);
    CHECK(a.target_bs == 0);

    // empty buffer with a triggered handover still switches
    a = baseline_action({-90.0, -70.0, -95.0}, 0, kFree, true, 7.0, 0);
    CHECK(a.target_bs == 1);
    CHECK(a.rrb_count == 0);

    // backlogged but the target cell is fully occupied: grant is zero
    a = baseline_action({-80.0, -95.0, -95.0}, 0, {0, 4, 4}, true, 7.0, 100);
    CHECK(a.target_bs == 0);
    CHECK(a.rrb_count == 0);
}

TEST_CASE("strongest candidate wins among several") {
    // BS 2 is strongest and clears the margin over serving BS 1
    Action a = baseline_action({-70.0, -78.0, -69.0}, 1, kFree, true, 7.0, 10);
    CHECK(a.target_bs == 2);
    CHECK(a.rrb_count == 2);
}

TEST_CASE("baseline action validates its inputs") {
    CHECK_THROWS_AS(baseline_action({-80.0, -70.0}, 2, {4, 4}, true, 7.0, 0),
                    std::out_of_range);
    CHECK_THROWS_AS(baseline_action({-80.0, -70.0}, 0, {4}, true, 7.0, 0),
                    std::invalid_argument);
}

TEST_CASE("RSS is transmit power minus measured loss") {
    const auto rss = baseline_rss_dbm(23.0, {80.0, 95.5, 103.25});
    REQUIRE(rss.size() == 3);
    CHECK(rss[0] == doctest::Approx(-57.0).epsilon(1e-12));
    CHECK(rss[1] == doctest::Approx(-72.5).epsilon(1e-12));
    CHECK(rss[2] == doctest::Approx(-80.25).epsilon(1e-12));
}
