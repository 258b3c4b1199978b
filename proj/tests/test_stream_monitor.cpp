#include <random>
#include <vector>

#include "crowdship/stream_monitor.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace crowdship;

namespace {
const CourierId kA{1};
const LatLon kHere{40.4168, -3.7038};

GpsEvent ev(double t, double speed, LatLon where = kHere) { return {kA, t, where, speed}; }
}  // namespace

TEST_CASE("window mean and max over the last five minutes") {
    WindowState w(kA);
    ingest_event(w, ev(0, 3));
    ingest_event(w, ev(60, 4));
    const auto sv = ingest_event(w, ev(120, 5));
    CHECK(sv.avg_speed_5min == doctest::Approx(4.0));
    CHECK(sv.max_speed_5min == 5.0);
    CHECK(sv.timestamp == 120.0);
    CHECK(sv.location == kHere);
}

TEST_CASE("single stationary event") {
    WindowState w(kA);
    const auto sv = ingest_event(w, ev(10, 0));
    CHECK(sv.avg_speed_5min == 0.0);
    CHECK(sv.max_speed_5min == 0.0);
    CHECK(sv.stop_count_10min == 1);
}

TEST_CASE("stops are counted over ten minutes") {
    WindowState w(kA);
    const std::vector<double> speeds{5, 5, 0, 0, 5};
    SituationVector sv;
    for (std::size_t i = 0; i < speeds.size(); ++i) sv = ingest_event(w, ev(60.0 * i, speeds[i]));
    CHECK(sv.stop_count_10min == 2);
}

TEST_CASE("samples older than the windows drop out") {
    WindowState w(kA);
    ingest_event(w, ev(0, 0));
    ingest_event(w, ev(100, 6));
    auto sv = ingest_event(w, ev(400, 2));
    // t=100 is outside (400-300, 400]; t=0 stop still inside ten minutes.
    CHECK(sv.avg_speed_5min == doctest::Approx(2.0));
    CHECK(sv.max_speed_5min == 2.0);
    CHECK(sv.stop_count_10min == 1);
    sv = ingest_event(w, ev(600, 2));
    CHECK(sv.stop_count_10min == 0);
    for (const auto& s : w.samples()) CHECK(s.timestamp > 600.0 - 600.0);
}

TEST_CASE("out-of-order and invalid events are rejected") {
    WindowState w(kA);
    ingest_event(w, ev(100, 1));
    CHECK_THROWS_AS(ingest_event(w, ev(99, 1)), OrderingError);
    CHECK_THROWS_AS(ingest_event(w, ev(101, -1)), std::invalid_argument);
    CHECK_THROWS_AS(ingest_event(w, GpsEvent{CourierId{2}, 102, kHere, 1}), std::invalid_argument);
    CHECK_NOTHROW(ingest_event(w, ev(100, 1)));  // equal timestamps are allowed
}

TEST_CASE("aggregates match a full rescan on random streams") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> gap(0.0, 90.0), speed(0.0, 7.0);
    std::bernoulli_distribution stop(0.2);
    for (int run = 0; run < 20; ++run) {
        WindowState w(kA), twin(kA);
        std::vector<GpsEvent> seen;
        double t = 0.0;
        for (int i = 0; i < 200; ++i) {
            t += gap(rng);
            const GpsEvent e = ev(t, stop(rng) ? 0.0 : speed(rng));
            seen.push_back(e);
            const auto sv = ingest_event(w, e);
            const auto expected = oracle::rescan(seen);
            CHECK(sv.avg_speed_5min == doctest::Approx(expected.avg).epsilon(1e-12));
            CHECK(sv.max_speed_5min == expected.max);
            CHECK(sv.stop_count_10min == expected.stops);
            CHECK(sv.avg_speed_5min <= sv.max_speed_5min);
            CHECK(ingest_event(twin, e) == sv);
            for (const auto& s : w.samples()) CHECK(s.timestamp > t - 600.0);
        }
    }
}

TEST_CASE("significance rules") {
    SituationVector a{kA, 0.0, kHere, 4.0, 5.0, 0};
    SituationVector b = a;
    b.timestamp = 10.0;
    CHECK_FALSE(significant_change(a, b));
    b.avg_speed_5min = 4.6;
    CHECK(significant_change(a, b));
    b = a;
    b.timestamp = 61.0;
    CHECK(significant_change(a, b));
    b = a;
    b.timestamp = 5.0;
    b.location = {kHere.lat + 0.0005, kHere.lon};  // about 56 m north
    CHECK(significant_change(a, b));
}

TEST_CASE("monitor forwards the first and significant updates only") {
    StreamMonitor m;
    CHECK(m.observe(ev(0, 4)).forward);
    CHECK_FALSE(m.observe(ev(10, 4)).forward);
    CHECK(m.observe(ev(20, 6)).forward);  // avg jumps by 0.67
    CHECK_FALSE(m.observe(ev(50, 5.5)).forward);
    CHECK(m.observe(ev(80, 5.5)).forward);  // heartbeat since t=20
    REQUIRE(m.latest(kA));
    CHECK(m.latest(kA)->timestamp == 80.0);
    m.forget(kA);
    CHECK_FALSE(m.latest(kA));
    CHECK(m.tracked() == 0);
}
