#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <vector>

#include "crowdship/geo.hpp"
#include "crowdship/random.hpp"
#include "crowdship/stream_monitor.hpp"

namespace crowdship {

struct TraceSample {
    double offset = 0.0;  // seconds since trip start
    LatLon location;
    double speed = 0.0;  // m/s

    friend bool operator==(const TraceSample&, const TraceSample&) = default;
};

/// One bike trip: hour of day plus samples relative to an obscured start.
struct Trip {
    std::uint64_t trip_id = 0;
    std::uint64_t user_id = 0;
    int hour_of_day = 0;
    std::vector<TraceSample> samples;

    double duration() const { return samples.empty() ? 0.0 : samples.back().offset; }

    friend bool operator==(const Trip&, const Trip&) = default;
};

struct IngestError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParsedTraces {
    std::vector<Trip> trips;  // ordered by trip_id
    std::size_t rows = 0;
    std::size_t malformed_rows = 0;
};

inline constexpr double kMaxMalformedFraction = 0.05;

/// Read the canonical trace schema
///   trip_id,user_id,hour,offset_s,lat,lon,speed_mps
/// (header row required). Malformed rows are skipped and counted; more than
/// 5% malformed rows, or an unreadable file, raise IngestError.
ParsedTraces parse_traces(const std::filesystem::path& path);
ParsedTraces parse_traces(std::istream& in);

void write_traces(std::ostream& out, const std::vector<Trip>& trips);

/// Absolute start per trip: day_epoch + hour * 3600 + U[0, 3600).
std::vector<double> draw_start_times(const std::vector<Trip>& trips, Rng& rng, double day_epoch);

/// Merged GPS stream of all trips (courier id = trip id), sorted by timestamp.
std::vector<GpsEvent> randomize_starts(const std::vector<Trip>& trips, Rng& rng, double day_epoch);
std::vector<GpsEvent> timed_events(const std::vector<Trip>& trips, const std::vector<double>& starts);

struct TraceSynthConfig {
    LatLon center{40.4168, -3.7038};
    double radius = 1500.0;
    double min_speed = 2.5;
    double max_speed = 6.5;
    double min_duration = 300.0;
    double max_duration = 2400.0;
    double sample_interval = 60.0;
    int first_hour = 8;
    int last_hour = 19;
};

/// Synthetic stand-in for bike-sharing GPS traces: straight rides at constant
/// speed between random points of the disk, sampled every minute plus a final
/// sample on arrival. Start/end/speed are redrawn until the duration is within
/// bounds.
std::vector<Trip> synth_traces(std::size_t count, const TraceSynthConfig& config, Rng& rng,
                               std::uint64_t first_trip_id = 1);

/// Explicit task replay: task_id,release_s,origin_lat,origin_lon,dest_lat,dest_lon
struct TaskRecord {
    std::uint64_t task_id = 0;
    double release = 0.0;
    LatLon origin;
    LatLon destination;

    friend bool operator==(const TaskRecord&, const TaskRecord&) = default;
};

std::vector<TaskRecord> parse_tasks(const std::filesystem::path& path);
std::vector<TaskRecord> parse_tasks(std::istream& in);
void write_tasks(std::ostream& out, const std::vector<TaskRecord>& tasks);

}  // namespace crowdship
