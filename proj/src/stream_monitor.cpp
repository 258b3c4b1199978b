#include "crowdship/stream_monitor.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace crowdship {

SituationVector ingest_event(WindowState& state, const GpsEvent& event) {
    if (event.courier != state.courier_) {
        throw std::invalid_argument("ingest_event: event belongs to another courier");
    }
    if (!(event.speed >= 0.0)) {
        throw std::invalid_argument("ingest_event: negative speed");
    }
    if (state.last_timestamp_ && event.timestamp < *state.last_timestamp_) {
        throw OrderingError("ingest_event: event at t=" + std::to_string(event.timestamp) +
                            " precedes last ingested t=" + std::to_string(*state.last_timestamp_));
    }

    state.samples_.push_back({event.timestamp, event.speed, event.location});
    state.last_timestamp_ = event.timestamp;

    const double now = event.timestamp;
    while (!state.samples_.empty() && state.samples_.front().timestamp <= now - kStopWindowSeconds) {
        state.samples_.pop_front();
    }

    SituationVector sv;
    sv.courier = event.courier;
    sv.timestamp = now;
    sv.location = event.location;

    double speed_sum = 0.0;
    int speed_n = 0;
    for (const auto& s : state.samples_) {
        if (s.speed < kStopSpeedThreshold) ++sv.stop_count_10min;
        if (s.timestamp > now - kSpeedWindowSeconds) {
            speed_sum += s.speed;
            sv.max_speed_5min = std::max(sv.max_speed_5min, s.speed);
            ++speed_n;
        }
    }
    // The newest sample is always inside the speed window, so speed_n >= 1.
    sv.avg_speed_5min = std::min(speed_sum / speed_n, sv.max_speed_5min);
    return sv;
}

bool significant_change(const SituationVector& prev, const SituationVector& next) {
    if (std::abs(next.avg_speed_5min - prev.avg_speed_5min) >= kSignificantSpeedDelta) return true;
    if (distance(prev.location, next.location) >= kSignificantDisplacement) return true;
    return next.timestamp - prev.timestamp >= kHeartbeatSeconds;
}

StreamMonitor::Update StreamMonitor::observe(const GpsEvent& event) {
    auto it = couriers_.find(event.courier);
    if (it == couriers_.end()) {
        it = couriers_.emplace(event.courier, Entry{WindowState(event.courier), {}, {}}).first;
    }
    Entry& entry = it->second;
    Update update;
    update.vector = ingest_event(entry.window, event);
    update.forward = !entry.last_forwarded || significant_change(*entry.last_forwarded, update.vector);
    entry.latest = update.vector;
    if (update.forward) entry.last_forwarded = update.vector;
    return update;
}

std::optional<SituationVector> StreamMonitor::latest(CourierId courier) const {
    const auto it = couriers_.find(courier);
    if (it == couriers_.end()) return std::nullopt;
    return it->second.latest;
}

void StreamMonitor::forget(CourierId courier) { couriers_.erase(courier); }

}  // namespace crowdship
