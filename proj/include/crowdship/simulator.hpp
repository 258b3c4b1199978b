#pragma once

#include <cstdint>
#include <deque>
#include <unordered_map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "crowdship/courier_model.hpp"
#include "crowdship/delay_predictor.hpp"
#include "crowdship/ingest.hpp"
#include "crowdship/negotiation.hpp"
#include "crowdship/random.hpp"
#include "crowdship/stream_monitor.hpp"

namespace crowdship {

enum class Strategy { NOT, S_BEST, F_BEST };

const char* to_string(Strategy s);
std::optional<Strategy> parse_strategy(std::string_view name);

inline constexpr double kSecondsPerDay = 86400.0;

struct SimConfig {
    LatLon center{40.4168, -3.7038};
    double radius = 1500.0;
    double reward = 7.0;
    double deadline = 1800.0;  // seconds after release
    double penalty = 7.0;
    double cost_per_km = 3.0;
    double waiting_cost_per_min = 0.5;
    double default_speed = 5.0;
    double incident_speed = 0.3;
    double prediction_error = 900.0;
    double trigger_threshold = 0.8;
    double tasks_per_hour = 50.0;
    double incident_probability_per_min = 0.05;
    Strategy strategy = Strategy::S_BEST;
    std::uint64_t seed = 42;
    double time_step = 1.0;
    int days = 2;
    int day_start_hour = 8;
    int day_end_hour = 20;
    /// GPS sampling period of couriers executing a task.
    double task_gps_interval = 60.0;
    HoeffdingTreeConfig tree;

    /// Throws std::invalid_argument on negative rates/costs/speeds, a
    /// non-positive radius or time step, or an empty day window.
    void validate() const;

    CourierParams courier_params() const { return {cost_per_km, waiting_cost_per_min, prediction_error}; }
};

/// Poisson task arrivals with origins and destinations uniform over the
/// operating disk, active only inside the daily window.
class TaskArrivalProcess {
public:
    TaskArrivalProcess(const SimConfig& config, Rng rng);

    /// Tasks released in (previous call's clock, clock].
    std::vector<DeliveryTask> spawn_tasks(double clock);

private:
    void draw_next(double from);

    SimConfig config_;
    Rng rng_;
    double next_arrival_;
    std::uint64_t next_id_ = 1;
};

/// Probability of no incident over `minutes` full engagement minutes.
double no_incident_probability(double per_minute, int minutes);

/// Incident trial for the given engagement minute; identical across strategy
/// arms for the same (seed, courier, engagement, minute).
bool incident_trial(std::uint64_t seed, double per_minute, CourierId courier, std::uint64_t engagement,
                    std::uint64_t minute);

struct TimelinePoint {
    std::size_t completion_index = 0;
    double cumulative_delay_fraction = 0.0;
};

/// Running delayed fraction over completed deliveries.
struct DelayMetrics {
    std::size_t completed = 0;
    std::size_t delayed = 0;
    std::vector<TimelinePoint> timeline;

    double fraction() const { return completed == 0 ? 0.0 : static_cast<double>(delayed) / completed; }
};

/// Append the completion of `task` (must be delivered) to the timeline.
TimelinePoint record_outcome(DelayMetrics& metrics, const DeliveryTask& task);

struct ResultRow {
    double completion_clock = 0.0;
    TaskId task{};
    CourierId courier{};
    bool delayed = false;
    double cumulative_delay_fraction = 0.0;
    std::size_t transfers_so_far = 0;
};

struct SimSummary {
    Strategy strategy = Strategy::NOT;
    std::uint64_t seed = 0;
    std::size_t tasks_spawned = 0;
    std::size_t delivered_on_time = 0;
    std::size_t delivered_late = 0;
    std::size_t expired_unassigned = 0;
    double final_delay_fraction = 0.0;
    std::size_t sessions_attempted = 0;
    std::size_t sessions_with_candidates = 0;
    std::size_t transfers_executed = 0;
    std::size_t bid_calls = 0;
    std::size_t acceptance_calls = 0;
    std::size_t consent_violations = 0;
    std::size_t invariant_violations = 0;
    std::size_t untrained_outcomes = 0;
    std::size_t couriers_seen = 0;
    PrequentialMetrics prequential;
    double rewards_paid = 0.0;
    double penalties_charged = 0.0;
    double transfer_payments = 0.0;
    double settled_courier_utility = 0.0;
    std::string model;
};

struct SimResults {
    std::vector<ResultRow> rows;
    std::vector<TransferLogRecord> transfers;
    SimSummary summary;
};

void write_results(std::ostream& out, const std::vector<ResultRow>& rows);
void write_summary(std::ostream& out, const SimSummary& summary);
void write_transfer_log(std::ostream& out, const std::vector<TransferLogRecord>& records);

/// Fixed-step crowdshipping world. Couriers replay GPS traces until they
/// accept a task, then travel straight to the parcel, its destination and
/// their own destination.
class Simulator {
public:
    enum class Mode { trace, task, waiting, gone };

    struct Courier {
        CourierState state;
        Mode mode = Mode::trace;
        const Trip* trip = nullptr;  // null for fixture couriers that never leave
        double trip_start = 0.0;
        std::size_t next_sample = 0;  // next trace sample to emit
        std::uint64_t engagement = 0;
        double engagement_start = 0.0;
        std::uint64_t minutes_trialled = 0;
        double next_gps = 0.0;
    };

    struct Task {
        DeliveryTask task;
        std::optional<std::size_t> assignee;
        std::optional<std::size_t> holder;  // courier physically carrying the parcel
        double next_sample = 0.0;
        double accepted_cost = 0.0;
        std::size_t transfers = 0;
    };

    Simulator(SimConfig config, std::vector<std::vector<Trip>> trips_per_day,
              std::optional<std::vector<TaskRecord>> explicit_tasks = std::nullopt);

    /// Run all configured days.
    SimResults run();

    // --- building blocks, public for fixtures -------------------------------

    double clock() const { return clock_; }
    void set_clock(double t) { clock_ = t; }

    /// A courier that idles at `location` with destination `destination`
    /// until engaged (no trace).
    std::size_t add_idle_courier(CourierId id, const LatLon& location, const LatLon& destination);
    /// Adds a pending task; its id is rewritten to index + 1.
    std::size_t add_task(DeliveryTask task);

    /// Nearest willing courier without a task gets the task.
    std::optional<std::size_t> assign_task(std::size_t task_index);

    /// Task couriers advance; trace couriers are positioned lazily, see
    /// sync_trace_location.
    void step_movement(double dt);
    void step_incidents(double dt);

    /// Emit due GPS events and run the strategy on deliverer updates.
    void step_sensing();

    /// Trigger and transfer handling for one deliverer's fresh situation.
    void step_strategy(std::size_t courier_index, const SituationVector& sv);

    const std::vector<Courier>& couriers() const { return couriers_; }
    std::vector<Courier>& couriers() { return couriers_; }
    const std::vector<Task>& tasks() const { return tasks_; }
    std::vector<Task>& tasks() { return tasks_; }
    const HoeffdingTree& tree() const { return tree_; }
    HoeffdingTree& tree() { return tree_; }
    const DelayMetrics& delay_metrics() const { return delay_; }
    const SimSummary& summary() const { return summary_; }
    const SimConfig& config() const { return config_; }
    const std::vector<ResultRow>& rows() const { return rows_; }
    const GlobalRegistry& registry() const { return registry_; }

    /// Place a trace-mode courier at its interpolated trace position.
    void sync_trace_location(std::size_t courier_index);

    /// Position of the parcel of `task_index` (origin, or its holder).
    LatLon parcel_location(std::size_t task_index) const;

private:
    void run_day(int day);
    void activate_trips(const std::vector<Trip>& trips, const std::vector<double>& starts, std::size_t& cursor,
                        int day);
    void spawn(double clock);
    void assign_pending();
    void move_task_courier(std::size_t ci, double dt);
    void on_arrival(std::size_t ci, double at);
    void sample_features();
    void complete_delivery(std::size_t ti, std::size_t ci, double at);
    void ingest(std::size_t ci, const GpsEvent& event);
    void start_engagement(std::size_t ci);
    void execute_transfer(std::size_t ti, std::size_t from, std::size_t to, double bid);
    void retire(std::size_t ci);
    bool day_has_work() const;
    static std::size_t task_index(TaskId id) { return static_cast<std::size_t>(static_cast<std::uint64_t>(id) - 1); }
    std::size_t courier_index(CourierId id) const;

    SimConfig config_;
    std::vector<std::vector<Trip>> trips_per_day_;
    std::deque<std::vector<Trip>> day_trips_storage_;  // couriers point into these
    std::unordered_map<CourierId, std::size_t> courier_index_;
    std::optional<std::vector<TaskRecord>> explicit_tasks_;
    std::size_t explicit_cursor_ = 0;

    Rng noise_rng_;
    Rng training_rng_;
    std::optional<TaskArrivalProcess> arrivals_;

    double clock_ = 0.0;
    std::vector<Courier> couriers_;
    std::vector<std::size_t> active_;  // couriers not gone, in activation order
    std::vector<Task> tasks_;
    std::vector<std::size_t> pending_;  // unassigned task indices
    std::vector<std::size_t> in_flight_;  // assigned task indices

    StreamMonitor monitor_;
    GlobalRegistry registry_;
    TriggerState triggers_;
    HoeffdingTree tree_;
    TrainingBuffer buffer_;
    DelayMetrics delay_;
    SimSummary summary_;
    std::vector<ResultRow> rows_;
    std::vector<TransferLogRecord> transfer_log_;
    std::uint64_t next_engagement_ = 1;
};

}  // namespace crowdship
