#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>

#include "crowdship/geo.hpp"
#include "crowdship/random.hpp"
#include "crowdship/stream_monitor.hpp"

namespace crowdship {

enum class TaskId : std::uint64_t {};

enum class TaskState {
    unassigned,
    assigned,
    picked_up,
    delivered_on_time,
    delivered_late,
    expired_unassigned,
};

const char* to_string(TaskState state);

/// A point-to-point parcel delivery with a deadline, a reward for on-time
/// arrival and a penalty for late arrival.
struct DeliveryTask {
    TaskId id{};
    LatLon origin;
    LatLon destination;
    double deadline = 0.0;  // absolute seconds
    double reward = 0.0;    // EUR
    double penalty = 0.0;   // EUR
    double release_time = 0.0;
    TaskState state = TaskState::unassigned;

    bool active() const { return state == TaskState::assigned || state == TaskState::picked_up; }
    bool finished() const {
        return state == TaskState::delivered_on_time || state == TaskState::delivered_late ||
               state == TaskState::expired_unassigned;
    }
};

/// Move `task` to `next`, enforcing the lifecycle
/// unassigned -> assigned -> picked_up -> delivered_*, plus
/// unassigned -> expired_unassigned. Throws std::logic_error otherwise.
void advance_state(DeliveryTask& task, TaskState next);

struct CourierParams {
    double cost_per_km = 3.0;
    double waiting_cost_per_min = 0.5;
    double error_bound = 900.0;  // seconds
};

struct CourierState {
    CourierId id{};
    LatLon location;
    LatLon destination;
    /// Speed the courier travels at while executing a task (m/s).
    double current_speed = 5.0;
    CourierParams params;
    std::optional<TaskId> assigned_task;
    bool picked_up = false;
    bool incident_active = false;
};

inline constexpr double kMinPlanningSpeed = 0.3;  // m/s
inline constexpr double kBidMargin = 0.01;        // EUR

/// Extra path length of l_i -> pickup -> d_p -> d_i over l_i -> d_i, never negative.
double detour_distance(const CourierState& courier, const DeliveryTask& task, const LatLon& pickup);

/// Travel cost of the detour at the courier's per-km rate.
double delivery_cost(const CourierState& courier, const DeliveryTask& task, const LatLon& pickup);

/// r_p - C if arrival < deadline, -s_p - C otherwise.
double utility(const CourierState& courier, const DeliveryTask& task, double arrival, const LatLon& pickup);

struct ArrivalEstimate {
    double true_arrival = 0.0;
    double noise = 0.0;
    double estimate = 0.0;
};

/// Exact arrival along l_i -> pickup -> d_p at the courier's speed (clamped
/// below at kMinPlanningSpeed), plus fresh noise e ~ U[-E, +E].
ArrivalEstimate estimate_arrival(const CourierState& courier, const DeliveryTask& task, const LatLon& pickup,
                                 double now, Rng& rng);

/// Accept iff the utility at the noisy estimated arrival is positive.
bool accepts_task(const CourierState& courier, const DeliveryTask& task, const LatLon& pickup, double now,
                  Rng& rng);

/// K(delta): waiting cost for a physical handover, zero without a parcel in hand.
double waiting_cost(const CourierState& courier, double delta_seconds);

/// Truthful bid: estimated surplus of taking over the task minus kBidMargin,
/// 0 meaning "not interested".
double candidate_bid(const CourierState& candidate, const DeliveryTask& task, const LatLon& pickup, double now,
                     Rng& rng);

/// Where the deliverer would have to pick the parcel up to continue: the
/// task origin before pickup, their own position after.
LatLon continuation_pickup(const CourierState& deliverer, const DeliveryTask& task);

/// Deliverer's noisy estimate of the utility of finishing the task themself.
double continuation_utility(const CourierState& deliverer, const DeliveryTask& task, double now, Rng& rng);

/// bid - K(delta) > continuation_utility.
bool deliverer_accepts_transfer(const CourierState& deliverer, const DeliveryTask& task, double bid,
                                double delta_seconds, double now, Rng& rng);

}  // namespace crowdship
