#include "crowdship/courier_model.hpp"

#include <algorithm>
#include <string>

namespace crowdship {

const char* to_string(TaskState state) {
    switch (state) {
        case TaskState::unassigned: return "unassigned";
        case TaskState::assigned: return "assigned";
        case TaskState::picked_up: return "picked_up";
        case TaskState::delivered_on_time: return "delivered_on_time";
        case TaskState::delivered_late: return "delivered_late";
        case TaskState::expired_unassigned: return "expired_unassigned";
    }
    return "?";
}

void advance_state(DeliveryTask& task, TaskState next) {
    const TaskState cur = task.state;
    bool ok = false;
    switch (next) {
        case TaskState::assigned: ok = cur == TaskState::unassigned || cur == TaskState::assigned; break;
        case TaskState::picked_up: ok = cur == TaskState::assigned; break;
        case TaskState::delivered_on_time:
        case TaskState::delivered_late: ok = cur == TaskState::picked_up; break;
        case TaskState::expired_unassigned: ok = cur == TaskState::unassigned; break;
        case TaskState::unassigned: ok = false; break;
    }
    if (!ok) {
        throw std::logic_error(std::string("illegal task transition ") + to_string(cur) + " -> " +
                               to_string(next));
    }
    task.state = next;
}

double detour_distance(const CourierState& courier, const DeliveryTask& task, const LatLon& pickup) {
    const double with_task = distance(courier.location, pickup) + distance(pickup, task.destination) +
                             distance(task.destination, courier.destination);
    const double direct = distance(courier.location, courier.destination);
    return std::max(0.0, with_task - direct);
}

double delivery_cost(const CourierState& courier, const DeliveryTask& task, const LatLon& pickup) {
    return courier.params.cost_per_km * detour_distance(courier, task, pickup) / 1000.0;
}

double utility(const CourierState& courier, const DeliveryTask& task, double arrival, const LatLon& pickup) {
    const double cost = delivery_cost(courier, task, pickup);
    return arrival < task.deadline ? task.reward - cost : -task.penalty - cost;
}

ArrivalEstimate estimate_arrival(const CourierState& courier, const DeliveryTask& task, const LatLon& pickup,
                                 double now, Rng& rng) {
    const double path = distance(courier.location, pickup) + distance(pickup, task.destination);
    const double speed = std::max(courier.current_speed, kMinPlanningSpeed);
    ArrivalEstimate est;
    est.true_arrival = now + path / speed;
    const double bound = courier.params.error_bound;
    if (bound > 0.0) {
        std::uniform_real_distribution<double> noise(-bound, bound);
        est.noise = noise(rng);
    }
    est.estimate = est.true_arrival + est.noise;
    return est;
}

bool accepts_task(const CourierState& courier, const DeliveryTask& task, const LatLon& pickup, double now,
                  Rng& rng) {
    if (courier.assigned_task) throw std::logic_error("accepts_task: courier already has a task");
    const ArrivalEstimate est = estimate_arrival(courier, task, pickup, now, rng);
    return utility(courier, task, est.estimate, pickup) > 0.0;
}

double waiting_cost(const CourierState& courier, double delta_seconds) {
    if (!courier.picked_up) return 0.0;
    return courier.params.waiting_cost_per_min * delta_seconds / 60.0;
}

double candidate_bid(const CourierState& candidate, const DeliveryTask& task, const LatLon& pickup, double now,
                     Rng& rng) {
    if (candidate.assigned_task) throw std::logic_error("candidate_bid: candidate already has a task");
    const ArrivalEstimate est = estimate_arrival(candidate, task, pickup, now, rng);
    const double surplus = utility(candidate, task, est.estimate, pickup);
    return std::max(0.0, surplus - kBidMargin);
}

LatLon continuation_pickup(const CourierState& deliverer, const DeliveryTask& task) {
    return deliverer.picked_up ? deliverer.location : task.origin;
}

double continuation_utility(const CourierState& deliverer, const DeliveryTask& task, double now, Rng& rng) {
    const LatLon pickup = continuation_pickup(deliverer, task);
    const ArrivalEstimate est = estimate_arrival(deliverer, task, pickup, now, rng);
    return utility(deliverer, task, est.estimate, pickup);
}

bool deliverer_accepts_transfer(const CourierState& deliverer, const DeliveryTask& task, double bid,
                                double delta_seconds, double now, Rng& rng) {
    if (!(bid > 0.0)) throw std::invalid_argument("deliverer_accepts_transfer: bid must be positive");
    const double own = continuation_utility(deliverer, task, now, rng);
    return bid - waiting_cost(deliverer, delta_seconds) > own;
}

}  // namespace crowdship
