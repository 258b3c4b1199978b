#include "crowdship/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <stdexcept>

namespace crowdship {

const char* to_string(Strategy s) {
    switch (s) {
        case Strategy::NOT: return "NOT";
        case Strategy::S_BEST: return "S_BEST";
        case Strategy::F_BEST: return "F_BEST";
    }
    return "?";
}

std::optional<Strategy> parse_strategy(std::string_view name) {
    if (name == "NOT") return Strategy::NOT;
    if (name == "S_BEST" || name == "S-BEST") return Strategy::S_BEST;
    if (name == "F_BEST" || name == "F-BEST") return Strategy::F_BEST;
    return std::nullopt;
}

void SimConfig::validate() const {
    const auto require = [](bool ok, const char* what) {
        if (!ok) throw std::invalid_argument(std::string("invalid simulation config: ") + what);
    };
    require(radius > 0.0, "radius must be positive");
    require(reward >= 0.0 && penalty >= 0.0, "reward and penalty must be non-negative");
    require(deadline >= 0.0, "deadline must be non-negative");
    require(cost_per_km >= 0.0 && waiting_cost_per_min >= 0.0, "costs must be non-negative");
    require(default_speed >= 0.0 && incident_speed >= 0.0, "speeds must be non-negative");
    require(prediction_error >= 0.0, "prediction error must be non-negative");
    require(tasks_per_hour >= 0.0, "task rate must be non-negative");
    require(incident_probability_per_min >= 0.0 && incident_probability_per_min <= 1.0,
            "incident probability must lie in [0, 1]");
    require(trigger_threshold >= 0.0 && trigger_threshold <= 1.0, "trigger threshold must lie in [0, 1]");
    require(time_step > 0.0, "time step must be positive");
    require(days >= 1, "at least one day");
    require(day_start_hour >= 1 && day_start_hour < day_end_hour && day_end_hour <= 24, "empty day window");
    require(task_gps_interval > 0.0, "GPS interval must be positive");
}

// ---------------------------------------------------------------------------

TaskArrivalProcess::TaskArrivalProcess(const SimConfig& config, Rng rng) : config_(config), rng_(std::move(rng)) {
    draw_next(0.0);
}

void TaskArrivalProcess::draw_next(double from) {
    if (config_.tasks_per_hour <= 0.0) {
        next_arrival_ = std::numeric_limits<double>::infinity();
        return;
    }
    std::exponential_distribution<double> gap(config_.tasks_per_hour / 3600.0);
    for (;;) {
        const double day = std::floor(from / kSecondsPerDay);
        const double window_start = day * kSecondsPerDay + config_.day_start_hour * 3600.0;
        const double window_end = day * kSecondsPerDay + config_.day_end_hour * 3600.0;
        if (from < window_start) {
            from = window_start;
            continue;
        }
        if (from >= window_end) {
            from = (day + 1.0) * kSecondsPerDay;
            continue;
        }
        // Memorylessness: a gap crossing the window end restarts next morning.
        const double t = from + gap(rng_);
        if (t < window_end) {
            next_arrival_ = t;
            return;
        }
        from = window_end;
    }
}

std::vector<DeliveryTask> TaskArrivalProcess::spawn_tasks(double clock) {
    std::vector<DeliveryTask> out;
    while (next_arrival_ <= clock) {
        DeliveryTask t;
        t.id = TaskId{next_id_++};
        t.release_time = next_arrival_;
        t.origin = sample_in_disk(config_.center, config_.radius, rng_);
        t.destination = sample_in_disk(config_.center, config_.radius, rng_);
        t.deadline = t.release_time + config_.deadline;
        t.reward = config_.reward;
        t.penalty = config_.penalty;
        out.push_back(t);
        draw_next(next_arrival_);
    }
    return out;
}

double no_incident_probability(double per_minute, int minutes) { return std::pow(1.0 - per_minute, minutes); }

bool incident_trial(std::uint64_t seed, double per_minute, CourierId courier, std::uint64_t engagement,
                    std::uint64_t minute) {
    return keyed_uniform(seed, Stream::incidents, static_cast<std::uint64_t>(courier), engagement, minute) <
           per_minute;
}

TimelinePoint record_outcome(DelayMetrics& metrics, const DeliveryTask& task) {
    if (task.state != TaskState::delivered_on_time && task.state != TaskState::delivered_late) {
        throw std::logic_error("record_outcome: task not delivered");
    }
    ++metrics.completed;
    if (task.state == TaskState::delivered_late) ++metrics.delayed;
    const TimelinePoint p{metrics.completed, metrics.fraction()};
    metrics.timeline.push_back(p);
    return p;
}

// ---------------------------------------------------------------------------

Simulator::Simulator(SimConfig config, std::vector<std::vector<Trip>> trips_per_day,
                     std::optional<std::vector<TaskRecord>> explicit_tasks)
    : config_(std::move(config)),
      trips_per_day_(std::move(trips_per_day)),
      explicit_tasks_(std::move(explicit_tasks)),
      noise_rng_(make_stream(config_.seed, Stream::courier_noise)),
      training_rng_(make_stream(config_.seed, Stream::training)),
      tree_(config_.tree) {
    config_.validate();
    if (!explicit_tasks_) arrivals_.emplace(config_, make_stream(config_.seed, Stream::task_arrivals));
    summary_.strategy = config_.strategy;
    summary_.seed = config_.seed;
}

std::size_t Simulator::add_idle_courier(CourierId id, const LatLon& location, const LatLon& destination) {
    Courier c;
    c.state.id = id;
    c.state.location = location;
    c.state.destination = destination;
    c.state.current_speed = config_.default_speed;
    c.state.params = config_.courier_params();
    c.next_gps = clock_;
    couriers_.push_back(c);
    courier_index_[id] = couriers_.size() - 1;
    active_.push_back(couriers_.size() - 1);
    ++summary_.couriers_seen;
    return couriers_.size() - 1;
}

std::size_t Simulator::add_task(DeliveryTask task) {
    task.id = TaskId{tasks_.size() + 1};
    Task t;
    t.task = task;
    tasks_.push_back(t);
    pending_.push_back(tasks_.size() - 1);
    return tasks_.size() - 1;
}

std::size_t Simulator::courier_index(CourierId id) const {
    const auto it = courier_index_.find(id);
    if (it == courier_index_.end()) throw std::logic_error("unknown courier id");
    return it->second;
}

LatLon Simulator::parcel_location(std::size_t ti) const {
    const Task& t = tasks_[ti];
    return t.holder ? couriers_[*t.holder].state.location : t.task.origin;
}

void Simulator::start_engagement(std::size_t ci) {
    Courier& c = couriers_[ci];
    c.mode = Mode::task;
    c.engagement = next_engagement_++;
    c.engagement_start = clock_;
    c.minutes_trialled = 0;
    c.state.incident_active = false;
    c.state.current_speed = config_.default_speed;
    c.next_gps = clock_ + config_.task_gps_interval;
}

std::optional<std::size_t> Simulator::assign_task(std::size_t ti) {
    Task& t = tasks_[ti];
    if (t.task.state != TaskState::unassigned) throw std::logic_error("assign_task: task already assigned");

    std::vector<std::pair<double, std::size_t>> order;
    for (std::size_t ci : active_) {
        const Courier& c = couriers_[ci];
        if (c.mode != Mode::trace || c.state.assigned_task) continue;
        sync_trace_location(ci);
        order.emplace_back(distance(c.state.location, t.task.origin), ci);
    }
    std::sort(order.begin(), order.end(), [this](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first < b.first;
        return couriers_[a.second].state.id < couriers_[b.second].state.id;
    });

    for (const auto& [dist, ci] : order) {
        Courier& c = couriers_[ci];
        if (!accepts_task(c.state, t.task, t.task.origin, clock_, noise_rng_)) continue;
        t.accepted_cost = delivery_cost(c.state, t.task, t.task.origin);
        advance_state(t.task, TaskState::assigned);
        t.assignee = ci;
        t.next_sample = clock_ + kSampleIntervalSeconds;
        c.state.assigned_task = t.task.id;
        c.state.picked_up = false;
        start_engagement(ci);
        registry_.set_role(c.state.id, CourierRole::deliverer);
        std::erase(pending_, ti);
        in_flight_.push_back(ti);
        return ci;
    }
    return std::nullopt;
}

void Simulator::assign_pending() {
    const auto pending = pending_;
    for (std::size_t ti : pending) {
        Task& t = tasks_[ti];
        if (clock_ >= t.task.deadline) {
            advance_state(t.task, TaskState::expired_unassigned);
            ++summary_.expired_unassigned;
            std::erase(pending_, ti);
            continue;
        }
        assign_task(ti);
    }
}

void Simulator::retire(std::size_t ci) {
    Courier& c = couriers_[ci];
    c.mode = Mode::gone;
    monitor_.forget(c.state.id);
    registry_.remove(c.state.id);
    std::erase(active_, ci);
}

void Simulator::sync_trace_location(std::size_t ci) {
    Courier& c = couriers_[ci];
    if (c.mode != Mode::trace || c.trip == nullptr) return;
    const auto& s = c.trip->samples;
    const double rel = clock_ - c.trip_start;
    if (rel >= s.back().offset) {
        c.state.location = s.back().location;
        return;
    }
    const auto upper =
        std::upper_bound(s.begin(), s.end(), rel, [](double v, const TraceSample& x) { return v < x.offset; });
    if (upper == s.begin()) {
        c.state.location = s.front().location;
        return;
    }
    const auto lower = upper - 1;
    const double frac = (rel - lower->offset) / (upper->offset - lower->offset);
    c.state.location = interpolate(lower->location, upper->location, frac);
}

void Simulator::step_movement(double dt) {
    const auto active = active_;
    for (std::size_t ci : active) {
        Courier& c = couriers_[ci];
        switch (c.mode) {
            case Mode::trace: break;  // resolved on demand by sync_trace_location
            case Mode::task: move_task_courier(ci, dt); break;
            case Mode::waiting:
            case Mode::gone: break;
        }
    }
}

void Simulator::move_task_courier(std::size_t ci, double dt) {
    double budget = dt;
    double t = clock_ - dt;
    // Each arrival changes the courier's target, so this terminates within a
    // handful of iterations.
    for (int guard = 0; guard < 8 && budget > 0.0; ++guard) {
        Courier& c = couriers_[ci];
        if (c.mode != Mode::task) return;
        LatLon target = c.state.destination;
        if (c.state.assigned_task) {
            const auto ti = task_index(*c.state.assigned_task);
            target = c.state.picked_up ? tasks_[ti].task.destination : parcel_location(ti);
        }
        const double speed = c.state.current_speed;
        if (speed <= 0.0) return;
        const double d = distance(c.state.location, target);
        const double needed = d / speed;
        if (needed <= budget) {
            c.state.location = target;
            budget -= needed;
            t += needed;
            on_arrival(ci, t);
        } else {
            c.state.location = advance_toward(c.state.location, target, speed * budget);
            budget = 0.0;
        }
    }
}

void Simulator::on_arrival(std::size_t ci, double at) {
    Courier& c = couriers_[ci];
    if (!c.state.assigned_task) {
        retire(ci);  // reached own destination
        return;
    }
    const auto ti = task_index(*c.state.assigned_task);
    Task& t = tasks_[ti];
    if (!c.state.picked_up) {
        if (!t.holder) {
            advance_state(t.task, TaskState::picked_up);
        } else if (*t.holder != ci) {
            Courier& h = couriers_[*t.holder];
            h.mode = Mode::task;  // handover done, resume own trip
            h.next_gps = std::max(h.next_gps, clock_);
        }
        t.holder = ci;
        c.state.picked_up = true;
        return;
    }
    complete_delivery(ti, ci, at);
}

void Simulator::complete_delivery(std::size_t ti, std::size_t ci, double at) {
    Task& t = tasks_[ti];
    Courier& c = couriers_[ci];
    const bool on_time = at < t.task.deadline;
    advance_state(t.task, on_time ? TaskState::delivered_on_time : TaskState::delivered_late);
    if (on_time) {
        ++summary_.delivered_on_time;
        summary_.rewards_paid += t.task.reward;
        summary_.settled_courier_utility += t.task.reward - t.accepted_cost;
    } else {
        ++summary_.delivered_late;
        summary_.penalties_charged += t.task.penalty;
        summary_.settled_courier_utility += -t.task.penalty - t.accepted_cost;
    }

    const TimelinePoint point = record_outcome(delay_, t.task);
    rows_.push_back({at, t.task.id, c.state.id, !on_time, point.cumulative_delay_fraction, summary_.transfers_executed});

    // Test, then train.
    const Label actual = on_time ? Label::no_delay : Label::delay;
    if (const auto* samples = buffer_.samples(t.task.id); samples != nullptr && !samples->empty()) {
        prequential_update(summary_.prequential, predicted_label(predict_on_time(tree_, samples->back())), actual);
    }
    if (train_on_outcome(tree_, buffer_, t.task.id, actual, training_rng_) == TrainResult::empty_buffer) {
        ++summary_.untrained_outcomes;
    }

    c.state.assigned_task.reset();
    c.state.picked_up = false;
    t.assignee.reset();
    t.holder.reset();
    std::erase(in_flight_, ti);
    triggers_.forget(t.task.id);
    registry_.remove(c.state.id);
}

void Simulator::step_incidents(double) {
    const double p = config_.incident_probability_per_min;
    for (std::size_t ci : active_) {
        Courier& c = couriers_[ci];
        if (!c.state.assigned_task || c.state.incident_active) continue;
        while (c.engagement_start + 60.0 * static_cast<double>(c.minutes_trialled + 1) <= clock_) {
            ++c.minutes_trialled;
            if (incident_trial(config_.seed, p, c.state.id, c.engagement, c.minutes_trialled)) {
                c.state.incident_active = true;
                c.state.current_speed = config_.incident_speed;
                break;
            }
        }
    }
}

void Simulator::ingest(std::size_t ci, const GpsEvent& event) {
    const auto update = monitor_.observe(event);
    Courier& c = couriers_[ci];
    std::optional<CourierRole> role;
    if (c.state.assigned_task) {
        role = CourierRole::deliverer;
    } else if (c.mode == Mode::trace) {
        role = CourierRole::available;
    }
    if (role && update.forward) {
        registry_.update(update.vector, event.speed);
        registry_.set_role(c.state.id, *role);
    }
    if (c.state.assigned_task && config_.strategy != Strategy::NOT) step_strategy(ci, update.vector);
}

void Simulator::step_sensing() {
    const auto active = active_;
    for (std::size_t ci : active) {
        Courier& c = couriers_[ci];
        if (c.mode == Mode::gone) continue;
        if (c.mode == Mode::trace && c.trip != nullptr) {
            const auto& s = c.trip->samples;
            while (c.next_sample < s.size() && c.trip_start + s[c.next_sample].offset <= clock_) {
                const auto& x = s[c.next_sample];
                ++c.next_sample;
                ingest(ci, {c.state.id, c.trip_start + x.offset, x.location, x.speed});
                if (couriers_[ci].mode != Mode::trace) break;  // engaged by a transfer
            }
            if (couriers_[ci].mode == Mode::trace && c.next_sample >= s.size()) retire(ci);
            continue;
        }
        if (clock_ >= c.next_gps) {
            const double speed = c.mode == Mode::task ? c.state.current_speed : 0.0;
            c.next_gps += config_.task_gps_interval;
            if (c.next_gps <= clock_) c.next_gps = clock_ + config_.task_gps_interval;
            ingest(ci, {c.state.id, clock_, c.state.location, speed});
        }
    }
}

void Simulator::sample_features() {
    for (std::size_t ti : in_flight_) {
        Task& t = tasks_[ti];
        while (clock_ >= t.next_sample) {
            t.next_sample += kSampleIntervalSeconds;
            const std::size_t ci = *t.assignee;
            const auto sv = monitor_.latest(couriers_[ci].state.id);
            if (!sv) continue;
            const LatLon pickup = t.holder == ci ? sv->location : parcel_location(ti);
            buffer_.record_sample(t.task.id, build_features(*sv, t.task, clock_, pickup));
        }
    }
}

namespace {

class SimulatedParties final : public NegotiationParties {
public:
    SimulatedParties(std::function<bool()> active, std::function<double(CourierId)> bid,
                     std::function<double(CourierId)> delta, std::function<bool(CourierId, double, double)> accepts)
        : active_(std::move(active)), bid_(std::move(bid)), delta_(std::move(delta)), accepts_(std::move(accepts)) {}

    bool task_active() override { return active_(); }
    double bid(CourierId c) override { return bid_(c); }
    double temporal_distance(CourierId c) override { return delta_(c); }
    bool deliverer_accepts(CourierId c, double b, double d) override { return accepts_(c, b, d); }

private:
    std::function<bool()> active_;
    std::function<double(CourierId)> bid_;
    std::function<double(CourierId)> delta_;
    std::function<bool(CourierId, double, double)> accepts_;
};

}  // namespace

void Simulator::step_strategy(std::size_t ci, const SituationVector& sv) {
    if (config_.strategy == Strategy::NOT) return;
    const Courier& d = couriers_[ci];
    const auto ti = task_index(*d.state.assigned_task);
    const Task& t = tasks_[ti];
    const LatLon own_pickup = t.holder == ci ? sv.location : parcel_location(ti);
    const double sigma = predict_on_time(tree_, build_features(sv, t.task, clock_, own_pickup));
    if (!trigger_check(sigma, config_.trigger_threshold, triggers_, t.task.id, clock_)) return;
    triggers_.record_attempt(t.task.id, clock_);
    ++summary_.sessions_attempted;

    const LatLon pickup = parcel_location(ti);
    TransferSession session;
    session.request = {t.task.id, d.state.id, sigma, clock_};
    session.ranking = rank_candidates(registry_, tree_, t.task, sigma, clock_, pickup, d.state.id);

    TransferLogRecord log{clock_, t.task.id, d.state.id, OutcomeKind::no_agreement, std::nullopt, 0.0, 0,
                          session.ranking.size()};
    if (!session.ranking.empty()) {
        ++summary_.sessions_with_candidates;
        TransferOutcome outcome;
        if (config_.strategy == Strategy::F_BEST) {
            outcome = force_transfer(session.ranking, t.task);
        } else {
            SimulatedParties parties(
                [&] { return tasks_[ti].assignee == ci; },
                [&](CourierId id) {
                    ++summary_.bid_calls;
                    sync_trace_location(courier_index(id));
                    return candidate_bid(couriers_[courier_index(id)].state, tasks_[ti].task, pickup, clock_, noise_rng_);
                },
                [&](CourierId id) { return temporal_distance(registry_, id, couriers_[ci].state.location, clock_); },
                [&](CourierId, double bid, double delta) {
                    ++summary_.acceptance_calls;
                    return deliverer_accepts_transfer(couriers_[ci].state, tasks_[ti].task, bid, delta, clock_,
                                                      noise_rng_);
                });
            outcome = negotiate(session, parties);
            if (outcome.kind == OutcomeKind::transferred) {
                const auto& last = session.bids.back();
                if (!(last.bid > 0.0) || !last.deliverer_accepted.value_or(false)) ++summary_.consent_violations;
            }
        }
        log.outcome = outcome.kind;
        log.substitute = outcome.substitute;
        log.winning_bid = outcome.bid;
        log.candidates_queried = session.bids.size();
        if (outcome.kind == OutcomeKind::transferred) {
            execute_transfer(ti, ci, courier_index(*outcome.substitute), outcome.bid);
        }
    }
    transfer_log_.push_back(log);
}

void Simulator::execute_transfer(std::size_t ti, std::size_t from, std::size_t to, double bid) {
    Task& t = tasks_[ti];
    Courier& d = couriers_[from];
    sync_trace_location(to);
    Courier& s = couriers_[to];
    if (s.state.assigned_task || s.mode != Mode::trace) ++summary_.invariant_violations;

    const LatLon pickup = parcel_location(ti);
    d.state.assigned_task.reset();
    d.state.picked_up = false;
    // A deliverer carrying the parcel waits in place for the substitute.
    d.mode = t.holder == from ? Mode::waiting : Mode::task;
    registry_.remove(d.state.id);

    s.state.assigned_task = t.task.id;
    s.state.picked_up = false;
    t.accepted_cost = delivery_cost(s.state, t.task, pickup);
    start_engagement(to);
    registry_.set_role(s.state.id, CourierRole::deliverer);

    if (t.task.state == TaskState::assigned) advance_state(t.task, TaskState::assigned);
    t.assignee = to;
    ++t.transfers;
    ++summary_.transfers_executed;
    summary_.transfer_payments += bid;
}

void Simulator::spawn(double clock) {
    if (explicit_tasks_) {
        auto& list = *explicit_tasks_;
        while (explicit_cursor_ < list.size() && list[explicit_cursor_].release <= clock) {
            const auto& r = list[explicit_cursor_++];
            DeliveryTask t;
            t.origin = r.origin;
            t.destination = r.destination;
            t.release_time = r.release;
            t.deadline = r.release + config_.deadline;
            t.reward = config_.reward;
            t.penalty = config_.penalty;
            add_task(t);
        }
        return;
    }
    for (auto& t : arrivals_->spawn_tasks(clock)) add_task(t);
}

bool Simulator::day_has_work() const { return !pending_.empty() || !in_flight_.empty(); }

void Simulator::activate_trips(const std::vector<Trip>& trips, const std::vector<double>& starts,
                               std::size_t& cursor, int day) {
    // `starts` is sorted alongside `trips` by the caller.
    while (cursor < trips.size() && starts[cursor] <= clock_) {
        const Trip& trip = trips[cursor];
        Courier c;
        c.state.id = CourierId{static_cast<std::uint64_t>(day) * 1'000'000'000ULL + trip.trip_id};
        c.state.location = trip.samples.front().location;
        c.state.destination = trip.samples.back().location;
        c.state.current_speed = config_.default_speed;
        c.state.params = config_.courier_params();
        c.trip = &trip;
        c.trip_start = starts[cursor];
        couriers_.push_back(c);
        courier_index_[c.state.id] = couriers_.size() - 1;
        active_.push_back(couriers_.size() - 1);
        ++summary_.couriers_seen;
        ++cursor;
    }
}

void Simulator::run_day(int day) {
    const double epoch = day * kSecondsPerDay;
    std::vector<Trip> trips;
    if (!trips_per_day_.empty()) trips = trips_per_day_[static_cast<std::size_t>(day) % trips_per_day_.size()];
    Rng start_rng = make_stream(config_.seed + static_cast<std::uint64_t>(day) * 7919ULL, Stream::trace_starts);
    const auto raw_starts = draw_start_times(trips, start_rng, epoch);

    std::vector<std::size_t> order(trips.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return raw_starts[a] < raw_starts[b]; });
    auto& day_trips = day_trips_storage_.emplace_back();
    std::vector<double> starts;
    for (std::size_t i : order) {
        if (trips[i].samples.empty()) continue;
        day_trips.push_back(std::move(trips[i]));
        starts.push_back(raw_starts[i]);
    }

    const double window_start = epoch + config_.day_start_hour * 3600.0;
    const double window_end = epoch + config_.day_end_hour * 3600.0;
    clock_ = std::max(clock_, window_start - 3600.0);
    std::size_t cursor = 0;
    const double dt = config_.time_step;
    while (true) {
        clock_ += dt;
        activate_trips(day_trips, starts, cursor, day);
        if (clock_ <= window_end + dt) spawn(std::min(clock_, window_end));
        step_movement(dt);
        step_incidents(dt);
        step_sensing();
        sample_features();
        assign_pending();
        if (clock_ >= window_end && !day_has_work()) break;
    }
    const auto active = active_;
    for (std::size_t ci : active) retire(ci);
}

SimResults Simulator::run() {
    for (int day = 0; day < config_.days; ++day) run_day(day);

    summary_.tasks_spawned = tasks_.size();
    summary_.final_delay_fraction = delay_.fraction();
    summary_.model = describe(tree_);
    std::size_t finished = 0;
    for (const auto& t : tasks_) finished += t.task.finished() ? 1 : 0;
    if (finished != tasks_.size()) summary_.invariant_violations += tasks_.size() - finished;
    return {rows_, transfer_log_, summary_};
}

// ---------------------------------------------------------------------------

namespace {
std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}
std::string opt_ratio(std::optional<double> v) { return v ? fmt("%.6f", *v) : "n/a"; }
}  // namespace

void write_results(std::ostream& out, const std::vector<ResultRow>& rows) {
    out << "completion_clock,task_id,courier_id,delayed,cumulative_delay_fraction,transfers_so_far\n";
    for (const auto& r : rows) {
        out << fmt("%.3f", r.completion_clock) << ',' << static_cast<std::uint64_t>(r.task) << ','
            << static_cast<std::uint64_t>(r.courier) << ',' << (r.delayed ? 1 : 0) << ','
            << fmt("%.6f", r.cumulative_delay_fraction) << ',' << r.transfers_so_far << '\n';
    }
}

void write_summary(std::ostream& out, const SimSummary& s) {
    out << "strategy: " << to_string(s.strategy) << "\n"
        << "seed: " << s.seed << "\n"
        << "tasks_spawned: " << s.tasks_spawned << "\n"
        << "delivered_on_time: " << s.delivered_on_time << "\n"
        << "delivered_late: " << s.delivered_late << "\n"
        << "expired_unassigned: " << s.expired_unassigned << "\n"
        << "final_delay_fraction: " << fmt("%.6f", s.final_delay_fraction) << "\n"
        << "transfers_attempted: " << s.sessions_attempted << "\n"
        << "transfer_sessions_with_candidates: " << s.sessions_with_candidates << "\n"
        << "transfers_succeeded: " << s.transfers_executed << "\n"
        << "consent_violations: " << s.consent_violations << "\n"
        << "invariant_violations: " << s.invariant_violations << "\n"
        << "couriers_seen: " << s.couriers_seen << "\n"
        << "prequential_predictions: " << s.prequential.total() << "\n"
        << "prequential_accuracy: " << opt_ratio(s.prequential.accuracy()) << "\n"
        << "prequential_precision: " << opt_ratio(s.prequential.precision()) << "\n"
        << "prequential_recall: " << opt_ratio(s.prequential.recall()) << "\n"
        << "rewards_paid_eur: " << fmt("%.2f", s.rewards_paid) << "\n"
        << "penalties_charged_eur: " << fmt("%.2f", s.penalties_charged) << "\n"
        << "transfer_payments_eur: " << fmt("%.2f", s.transfer_payments) << "\n"
        << "settled_courier_utility_eur: " << fmt("%.2f", s.settled_courier_utility) << "\n"
        << "--- model ---\n"
        << s.model;
}

void write_transfer_log(std::ostream& out, const std::vector<TransferLogRecord>& records) {
    write_transfer_log_header(out);
    for (const auto& r : records) write_transfer_log_record(out, r);
}

}  // namespace crowdship
