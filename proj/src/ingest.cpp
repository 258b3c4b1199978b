#include "crowdship/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>

namespace crowdship {
namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        fields.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return fields;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

template <typename T>
std::optional<T> parse_number(std::string_view s) {
    s = trim(s);
    T value{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    if constexpr (std::is_floating_point_v<T>) {
        if (!std::isfinite(value)) return std::nullopt;
    }
    return value;
}

bool valid_location(const LatLon& p) { return p.lat >= -90.0 && p.lat <= 90.0 && p.lon >= -180.0 && p.lon <= 180.0; }

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

ParsedTraces parse_traces(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IngestError("cannot read trace file " + path.string());
    return parse_traces(in);
}

ParsedTraces parse_traces(std::istream& in) {
    struct Partial {
        std::uint64_t user_id = 0;
        int hour = 0;
        std::vector<TraceSample> samples;
    };
    std::map<std::uint64_t, Partial> partial;
    ParsedTraces out;

    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        if (header) {
            header = false;
            if (trim(line).starts_with("trip_id")) continue;
        }
        ++out.rows;
        const auto f = split_fields(line);
        if (f.size() != 7) {
            ++out.malformed_rows;
            continue;
        }
        const auto trip = parse_number<std::uint64_t>(f[0]);
        const auto user = parse_number<std::uint64_t>(f[1]);
        const auto hour = parse_number<int>(f[2]);
        const auto offset = parse_number<double>(f[3]);
        const auto lat = parse_number<double>(f[4]);
        const auto lon = parse_number<double>(f[5]);
        const auto speed = parse_number<double>(f[6]);
        if (!trip || !user || !hour || !offset || !lat || !lon || !speed || *hour < 0 || *hour > 23 ||
            *offset < 0.0 || *speed < 0.0 || !valid_location({*lat, *lon})) {
            ++out.malformed_rows;
            continue;
        }
        auto [it, inserted] = partial.try_emplace(*trip);
        if (inserted) {
            it->second.user_id = *user;
            it->second.hour = *hour;
        } else if (it->second.user_id != *user || it->second.hour != *hour) {
            ++out.malformed_rows;
            continue;
        }
        it->second.samples.push_back({*offset, {*lat, *lon}, *speed});
    }

    for (auto& [id, p] : partial) {
        std::stable_sort(p.samples.begin(), p.samples.end(),
                         [](const TraceSample& a, const TraceSample& b) { return a.offset < b.offset; });
        Trip trip{id, p.user_id, p.hour, {}};
        for (const auto& s : p.samples) {
            if (!trip.samples.empty() && s.offset <= trip.samples.back().offset) {
                ++out.malformed_rows;  // duplicate offset
                continue;
            }
            trip.samples.push_back(s);
        }
        // Offsets are relative to the trip start.
        const double base = trip.samples.front().offset;
        for (auto& s : trip.samples) s.offset -= base;
        out.trips.push_back(std::move(trip));
    }

    if (out.rows > 0 &&
        static_cast<double>(out.malformed_rows) > kMaxMalformedFraction * static_cast<double>(out.rows)) {
        throw IngestError("trace file has " + std::to_string(out.malformed_rows) + " malformed rows out of " +
                          std::to_string(out.rows) + " (limit 5%)");
    }
    return out;
}

void write_traces(std::ostream& out, const std::vector<Trip>& trips) {
    out << "trip_id,user_id,hour,offset_s,lat,lon,speed_mps\n";
    for (const auto& t : trips) {
        for (const auto& s : t.samples) {
            out << t.trip_id << ',' << t.user_id << ',' << t.hour_of_day << ',' << format_double(s.offset) << ','
                << format_double(s.location.lat) << ',' << format_double(s.location.lon) << ','
                << format_double(s.speed) << '\n';
        }
    }
}

std::vector<double> draw_start_times(const std::vector<Trip>& trips, Rng& rng, double day_epoch) {
    std::uniform_real_distribution<double> within_hour(0.0, 3600.0);
    std::vector<double> starts;
    starts.reserve(trips.size());
    for (const auto& t : trips) starts.push_back(day_epoch + t.hour_of_day * 3600.0 + within_hour(rng));
    return starts;
}

std::vector<GpsEvent> timed_events(const std::vector<Trip>& trips, const std::vector<double>& starts) {
    std::vector<GpsEvent> events;
    for (std::size_t i = 0; i < trips.size(); ++i) {
        for (const auto& s : trips[i].samples) {
            events.push_back({CourierId{trips[i].trip_id}, starts[i] + s.offset, s.location, s.speed});
        }
    }
    std::stable_sort(events.begin(), events.end(), [](const GpsEvent& a, const GpsEvent& b) {
        if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
        return a.courier < b.courier;
    });
    return events;
}

std::vector<GpsEvent> randomize_starts(const std::vector<Trip>& trips, Rng& rng, double day_epoch) {
    return timed_events(trips, draw_start_times(trips, rng, day_epoch));
}

std::vector<Trip> synth_traces(std::size_t count, const TraceSynthConfig& config, Rng& rng,
                               std::uint64_t first_trip_id) {
    if (config.max_duration * config.max_speed < config.min_duration * config.min_speed) {
        throw std::invalid_argument("synth_traces: duration and speed bounds admit no trip");
    }
    std::uniform_int_distribution<int> hour(config.first_hour, config.last_hour);
    std::uniform_real_distribution<double> speed_dist(config.min_speed, config.max_speed);

    std::vector<Trip> trips;
    trips.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        Trip trip;
        trip.trip_id = first_trip_id + i;
        trip.user_id = trip.trip_id;
        trip.hour_of_day = hour(rng);

        LatLon from, to;
        double speed = 0.0, duration = 0.0;
        do {
            from = sample_in_disk(config.center, config.radius, rng);
            to = sample_in_disk(config.center, config.radius, rng);
            speed = speed_dist(rng);
            duration = distance(from, to) / speed;
        } while (duration < config.min_duration || duration > config.max_duration);

        for (double t = 0.0; t < duration; t += config.sample_interval) {
            trip.samples.push_back({t, interpolate(from, to, t / duration), speed});
        }
        trip.samples.push_back({duration, to, speed});
        trips.push_back(std::move(trip));
    }
    return trips;
}

std::vector<TaskRecord> parse_tasks(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IngestError("cannot read task file " + path.string());
    return parse_tasks(in);
}

std::vector<TaskRecord> parse_tasks(std::istream& in) {
    std::vector<TaskRecord> tasks;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        if (line_no == 1 && trim(line).starts_with("task_id")) continue;
        const auto f = split_fields(line);
        const auto bad = [&] { return IngestError("malformed task row at line " + std::to_string(line_no)); };
        if (f.size() != 6) throw bad();
        const auto id = parse_number<std::uint64_t>(f[0]);
        const auto release = parse_number<double>(f[1]);
        const auto olat = parse_number<double>(f[2]);
        const auto olon = parse_number<double>(f[3]);
        const auto dlat = parse_number<double>(f[4]);
        const auto dlon = parse_number<double>(f[5]);
        if (!id || !release || !olat || !olon || !dlat || !dlon) throw bad();
        if (!valid_location({*olat, *olon}) || !valid_location({*dlat, *dlon})) throw bad();
        tasks.push_back({*id, *release, {*olat, *olon}, {*dlat, *dlon}});
    }
    std::stable_sort(tasks.begin(), tasks.end(),
                     [](const TaskRecord& a, const TaskRecord& b) { return a.release < b.release; });
    return tasks;
}

void write_tasks(std::ostream& out, const std::vector<TaskRecord>& tasks) {
    out << "task_id,release_s,origin_lat,origin_lon,dest_lat,dest_lon\n";
    for (const auto& t : tasks) {
        out << t.task_id << ',' << format_double(t.release) << ',' << format_double(t.origin.lat) << ','
            << format_double(t.origin.lon) << ',' << format_double(t.destination.lat) << ','
            << format_double(t.destination.lon) << '\n';
    }
}

}  // namespace crowdship
