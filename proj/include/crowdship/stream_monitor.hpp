#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <stdexcept>
#include <unordered_map>

#include "crowdship/geo.hpp"

namespace crowdship {

enum class CourierId : std::uint64_t {};

/// Raw GPS sample from a courier's phone.
struct GpsEvent {
    CourierId courier{};
    double timestamp = 0.0;  // seconds since epoch of the run
    LatLon location;
    double speed = 0.0;  // m/s

    friend bool operator==(const GpsEvent&, const GpsEvent&) = default;
};

/// Windowed summary of one courier's GPS stream.
struct SituationVector {
    CourierId courier{};
    double timestamp = 0.0;
    LatLon location;
    double avg_speed_5min = 0.0;
    double max_speed_5min = 0.0;
    int stop_count_10min = 0;

    friend bool operator==(const SituationVector&, const SituationVector&) = default;
};

struct OrderingError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

inline constexpr double kSpeedWindowSeconds = 300.0;
inline constexpr double kStopWindowSeconds = 600.0;
inline constexpr double kStopSpeedThreshold = 0.1;

/// Last ten minutes of samples for a single courier.
class WindowState {
public:
    struct Sample {
        double timestamp;
        double speed;
        LatLon location;
    };

    explicit WindowState(CourierId courier) : courier_(courier) {}

    CourierId courier() const { return courier_; }
    const std::deque<Sample>& samples() const { return samples_; }
    std::optional<double> last_timestamp() const { return last_timestamp_; }

    // ingest_event needs to mutate the ring directly.
    friend SituationVector ingest_event(WindowState& state, const GpsEvent& event);

private:
    CourierId courier_;
    std::deque<Sample> samples_;
    std::optional<double> last_timestamp_;
};

/// Append `event`, prune the ring to the stop window and summarize.
/// Throws OrderingError if `event` is older than the last ingested one and
/// std::invalid_argument for an event of another courier or with negative speed.
SituationVector ingest_event(WindowState& state, const GpsEvent& event);

inline constexpr double kSignificantSpeedDelta = 0.5;     // m/s
inline constexpr double kSignificantDisplacement = 50.0;  // m
inline constexpr double kHeartbeatSeconds = 60.0;

/// Whether `next` differs enough from the last forwarded `prev` to be sent on.
bool significant_change(const SituationVector& prev, const SituationVector& next);

/// Per-courier local situation monitoring. Every update is returned to the
/// caller (for the trigger policy); `forward` marks the ones that pass the
/// significance filter and should reach the global registry.
class StreamMonitor {
public:
    struct Update {
        SituationVector vector;
        bool forward = false;
    };

    Update observe(const GpsEvent& event);

    std::optional<SituationVector> latest(CourierId courier) const;
    void forget(CourierId courier);
    std::size_t tracked() const { return couriers_.size(); }

private:
    struct Entry {
        WindowState window;
        std::optional<SituationVector> latest;
        std::optional<SituationVector> last_forwarded;
    };
    std::unordered_map<CourierId, Entry> couriers_;
};

}  // namespace crowdship
