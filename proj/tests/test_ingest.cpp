#include <map>
#include <sstream>

#include "crowdship/ingest.hpp"
#include "doctest.h"

using namespace crowdship;

namespace {
const char* kHeader = "trip_id,user_id,hour,offset_s,lat,lon,speed_mps\n";
}

TEST_CASE("three-row trip") {
    std::istringstream in(std::string(kHeader) +
                          "7,70,9,0,40.41,-3.70,4.0\n"
                          "7,70,9,60,40.42,-3.70,4.5\n"
                          "7,70,9,120,40.43,-3.70,5.0\n");
    const auto p = parse_traces(in);
    REQUIRE(p.trips.size() == 1);
    const auto& t = p.trips[0];
    CHECK(t.trip_id == 7);
    CHECK(t.user_id == 70);
    CHECK(t.hour_of_day == 9);
    REQUIRE(t.samples.size() == 3);
    CHECK(t.samples[1].offset == 60.0);
    CHECK(t.samples[2].location.lat == 40.43);
    CHECK(t.samples[2].speed == 5.0);
    CHECK(t.duration() == 120.0);
    CHECK(p.malformed_rows == 0);
}

TEST_CASE("interleaved trips are partitioned like a group-by") {
    std::string csv = kHeader;
    std::map<int, std::vector<double>> expected;
    for (int k = 0; k < 30; ++k) {
        const int trip = 1 + (k * 7) % 3;
        const double off = 60.0 * (k / 3);
        csv += std::to_string(trip) + ",1," + std::to_string(8 + trip) + "," + std::to_string(static_cast<int>(off)) +
               ",40.41,-3.70,3.0\n";
        expected[trip].push_back(off);
    }
    std::istringstream in(csv);
    const auto p = parse_traces(in);
    REQUIRE(p.trips.size() == expected.size());
    for (const auto& t : p.trips) {
        const auto& offs = expected.at(static_cast<int>(t.trip_id));
        REQUIRE(t.samples.size() == offs.size());
        for (std::size_t i = 0; i < offs.size(); ++i) CHECK(t.samples[i].offset == offs[i]);
    }
}

TEST_CASE("malformed rows are skipped up to five percent") {
    std::string csv = kHeader;
    for (int i = 0; i < 40; ++i) csv += "1,1,9," + std::to_string(60 * i) + ",40.41,-3.70,3.0\n";
    csv += "1,1,9,-60,40.41,-3.70,3.0\n";
    csv += "1,1,9,not_a_number,40.41,-3.70,3.0\n";
    std::istringstream ok(csv);
    const auto p = parse_traces(ok);
    CHECK(p.malformed_rows == 2);
    CHECK(p.rows == 42);
    CHECK(p.trips.at(0).samples.size() == 40);

    csv += "1,1,9,5,91.0,-3.70,3.0\n";
    csv += "garbage\n";
    std::istringstream bad(csv);
    CHECK_THROWS_AS(parse_traces(bad), IngestError);
    CHECK_THROWS_AS(parse_traces(std::filesystem::path("/nonexistent/traces.csv")), IngestError);
}

TEST_CASE("trace round trip") {
    Rng rng(5);
    const auto trips = synth_traces(50, {}, rng);
    std::stringstream buf;
    write_traces(buf, trips);
    const auto back = parse_traces(buf);
    CHECK(back.malformed_rows == 0);
    CHECK(back.trips == trips);
}

TEST_CASE("task round trip and ordering") {
    std::vector<TaskRecord> tasks{{2, 100.5, {40.41, -3.70}, {40.42, -3.71}}, {1, 50.25, {40.40, -3.69}, {40.41, -3.70}}};
    std::stringstream buf;
    write_tasks(buf, tasks);
    const auto back = parse_tasks(buf);
    REQUIRE(back.size() == 2);
    CHECK(back[0] == tasks[1]);
    CHECK(back[1] == tasks[0]);
    std::istringstream bad("task_id,release_s,origin_lat,origin_lon,dest_lat,dest_lon\n1,2,3\n");
    CHECK_THROWS_AS(parse_tasks(bad), IngestError);
}

TEST_CASE("randomized starts stay in the trip hour and keep sample spacing") {
    Rng gen(9);
    const auto trips = synth_traces(300, {}, gen);
    const double epoch = 2 * 86400.0;
    Rng a(11), b(11), c(11);
    const auto starts = draw_start_times(trips, a, epoch);
    for (std::size_t i = 0; i < trips.size(); ++i) {
        CHECK(starts[i] >= epoch + trips[i].hour_of_day * 3600.0);
        CHECK(starts[i] < epoch + (trips[i].hour_of_day + 1) * 3600.0);
    }
    const auto events = randomize_starts(trips, b, epoch);
    std::size_t total = 0;
    for (const auto& t : trips) total += t.samples.size();
    REQUIRE(events.size() == total);
    for (std::size_t i = 1; i < events.size(); ++i) CHECK(events[i - 1].timestamp <= events[i].timestamp);

    std::map<std::uint64_t, std::vector<double>> stamps;
    for (const auto& e : events) stamps[static_cast<std::uint64_t>(e.courier)].push_back(e.timestamp);
    for (std::size_t i = 0; i < trips.size(); ++i) {
        const auto& s = stamps.at(trips[i].trip_id);
        for (std::size_t k = 0; k < s.size(); ++k) {
            CHECK(s[k] - s[0] == doctest::Approx(trips[i].samples[k].offset).epsilon(1e-12));
        }
    }
    CHECK(randomize_starts(trips, c, epoch) == events);
}

TEST_CASE("synthetic traces respect their bounds") {
    TraceSynthConfig cfg;
    Rng rng(13);
    const auto trips = synth_traces(8500, cfg, rng);
    REQUIRE(trips.size() == 8500);
    for (const auto& t : trips) {
        CHECK(t.hour_of_day >= 8);
        CHECK(t.hour_of_day <= 19);
        CHECK(t.duration() >= cfg.min_duration);
        CHECK(t.duration() <= cfg.max_duration);
        double sum = 0.0;
        for (std::size_t k = 0; k < t.samples.size(); ++k) {
            const auto& s = t.samples[k];
            CHECK(distance(s.location, cfg.center) <= cfg.radius + 1e-6);
            CHECK(s.speed >= cfg.min_speed);
            CHECK(s.speed <= cfg.max_speed);
            if (k > 0) {
                CHECK(s.offset > t.samples[k - 1].offset);
                CHECK(s.offset - t.samples[k - 1].offset <= cfg.sample_interval + 1e-9);
            }
            sum += s.speed;
        }
        const double mean = sum / static_cast<double>(t.samples.size());
        CHECK(mean >= cfg.min_speed);
        CHECK(mean <= cfg.max_speed);
        // Constant speed along a straight line.
        CHECK(distance(t.samples.front().location, t.samples.back().location) / t.duration() ==
              doctest::Approx(t.samples.front().speed).epsilon(1e-6));
    }
    cfg.max_duration = 10.0;
    CHECK_THROWS_AS(synth_traces(1, cfg, rng), std::invalid_argument);
}
