#include <random>

#include "crowdship/courier_model.hpp"
#include "doctest.h"

using namespace crowdship;

namespace {

const LatLon kA{40.4168, -3.7038};
LatLon north(double m) { return offset(kA, 0.0, m); }

CourierState courier_at(LatLon where, LatLon dest, double error_bound = 0.0) {
    CourierState c;
    c.id = CourierId{1};
    c.location = where;
    c.destination = dest;
    c.current_speed = 5.0;
    c.params.error_bound = error_bound;
    return c;
}

DeliveryTask task_between(LatLon o, LatLon d, double deadline, double reward = 7.0, double penalty = 7.0) {
    DeliveryTask t;
    t.id = TaskId{1};
    t.origin = o;
    t.destination = d;
    t.deadline = deadline;
    t.reward = reward;
    t.penalty = penalty;
    return t;
}

}  // namespace

TEST_CASE("task lifecycle transitions") {
    DeliveryTask t;
    CHECK_THROWS_AS(advance_state(t, TaskState::picked_up), std::logic_error);
    advance_state(t, TaskState::assigned);
    advance_state(t, TaskState::assigned);  // transfer
    CHECK_THROWS_AS(advance_state(t, TaskState::delivered_on_time), std::logic_error);
    advance_state(t, TaskState::picked_up);
    CHECK(t.active());
    advance_state(t, TaskState::delivered_late);
    CHECK(t.finished());
    CHECK_THROWS_AS(advance_state(t, TaskState::assigned), std::logic_error);

    DeliveryTask u;
    advance_state(u, TaskState::expired_unassigned);
    CHECK(u.finished());
}

TEST_CASE("detour on a shared route is zero") {
    const auto c = courier_at(kA, north(1000));
    CHECK(detour_distance(c, task_between(kA, north(1000), 0), kA) == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("detour with a backtracking loop on a meridian") {
    // A -> 500 m (pickup) -> back to 250 m (drop) -> 1000 m: 500 + 250 + 750 - 1000.
    const auto c = courier_at(kA, north(1000));
    const auto task = task_between(north(500), north(250), 0);
    CHECK(detour_distance(c, task, task.origin) == doctest::Approx(500.0).epsilon(1e-9));
}

TEST_CASE("detour is never negative") {
    std::mt19937_64 rng(2);
    for (int i = 0; i < 500; ++i) {
        const auto c = courier_at(sample_in_disk(kA, 1500, rng), sample_in_disk(kA, 1500, rng));
        const auto t = task_between(sample_in_disk(kA, 1500, rng), sample_in_disk(kA, 1500, rng), 0);
        CHECK(detour_distance(c, t, t.origin) >= 0.0);
    }
}

TEST_CASE("delivery cost is linear in the detour") {
    auto c = courier_at(kA, north(1000));
    CHECK(delivery_cost(c, task_between(north(500), north(0), 0), north(500)) == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(delivery_cost(c, task_between(north(1250), north(1000), 0), north(1250)) ==
          doctest::Approx(1.5).epsilon(1e-9));
    CHECK(delivery_cost(c, task_between(kA, north(1000), 0), kA) == doctest::Approx(0.0).scale(1.0));
    // 2.5 km detour at 3 EUR/km.
    CHECK(delivery_cost(c, task_between(north(2250), north(1000), 0), north(2250)) ==
          doctest::Approx(7.5).epsilon(1e-9));
}

TEST_CASE("utility branches with strict deadline") {
    const auto c = courier_at(kA, north(1000));
    const auto t = task_between(north(500), north(0), 1000.0);  // 1 km detour
    CHECK(utility(c, t, 999.0, t.origin) == doctest::Approx(4.0).epsilon(1e-9));
    CHECK(utility(c, t, 1001.0, t.origin) == doctest::Approx(-10.0).epsilon(1e-9));
    CHECK(utility(c, t, 1000.0, t.origin) == doctest::Approx(-10.0).epsilon(1e-9));
}

TEST_CASE("arrival estimate") {
    auto c = courier_at(kA, north(5000));
    const auto t = task_between(north(1000), north(3000), 0);
    Rng rng(1);
    auto e = estimate_arrival(c, t, t.origin, 100.0, rng);
    CHECK(e.true_arrival == doctest::Approx(100.0 + 600.0).epsilon(1e-9));
    CHECK(e.estimate == e.true_arrival);

    c.params.error_bound = 900.0;
    double sum = 0.0;
    for (int i = 0; i < 10000; ++i) {
        e = estimate_arrival(c, t, t.origin, 0.0, rng);
        CHECK(std::abs(e.noise) <= 900.0);
        CHECK(e.estimate >= 600.0 - 900.0);
        CHECK(e.estimate <= 600.0 + 900.0);
        sum += e.noise;
    }
    CHECK(std::abs(sum / 10000.0) < 0.02 * 1800.0);

    c.current_speed = 0.0;
    c.params.error_bound = 0.0;
    CHECK(estimate_arrival(c, t, t.origin, 0.0, rng).true_arrival == doctest::Approx(3000.0 / 0.3).epsilon(1e-9));
}

TEST_CASE("task acceptance") {
    Rng rng(1);
    auto c = courier_at(kA, north(1000));
    CHECK(accepts_task(c, task_between(kA, north(1000), 1e6), kA, 0.0, rng));
    // 8 EUR detour cost exceeds the reward.
    const auto far = task_between(north(2500), north(1166.6667), 1e6);
    CHECK(delivery_cost(c, far, far.origin) > 7.0);
    CHECK_FALSE(accepts_task(c, far, far.origin, 0.0, rng));
    // Estimated arrival after the deadline.
    CHECK_FALSE(accepts_task(c, task_between(kA, north(1000), 100.0), kA, 0.0, rng));
    c.assigned_task = TaskId{9};
    CHECK_THROWS_AS(accepts_task(c, task_between(kA, north(1000), 1e6), kA, 0.0, rng), std::logic_error);
}

TEST_CASE("acceptance is monotone in the reward for a fixed noise draw") {
    std::mt19937_64 geo(4);
    for (int i = 0; i < 300; ++i) {
        auto c = courier_at(sample_in_disk(kA, 1500, geo), sample_in_disk(kA, 1500, geo), 900.0);
        auto t = task_between(sample_in_disk(kA, 1500, geo), sample_in_disk(kA, 1500, geo), 1200.0);
        bool accepted = false;
        for (double r = 0.0; r <= 20.0; r += 1.0) {
            t.reward = r;
            Rng same(i);
            const bool now = accepts_task(c, t, t.origin, 0.0, same);
            CHECK_FALSE((accepted && !now));
            accepted = accepted || now;
        }
    }
}

TEST_CASE("waiting cost only with a parcel in hand") {
    auto c = courier_at(kA, kA);
    CHECK(waiting_cost(c, 240.0) == 0.0);
    c.picked_up = true;
    CHECK(waiting_cost(c, 240.0) == doctest::Approx(2.0));
    CHECK(waiting_cost(c, 0.0) == 0.0);
}

TEST_CASE("bid is surplus minus margin, zero without interest") {
    Rng rng(1);
    const auto c = courier_at(kA, north(1000));
    // Zero detour, surplus = reward.
    CHECK(candidate_bid(c, task_between(kA, north(1000), 1e6, 2.5), kA, 0.0, rng) == doctest::Approx(2.49));
    CHECK(candidate_bid(c, task_between(kA, north(1000), 100.0), kA, 0.0, rng) == 0.0);
    auto busy = c;
    busy.assigned_task = TaskId{3};
    CHECK_THROWS_AS(candidate_bid(busy, task_between(kA, north(1000), 1e6), kA, 0.0, rng), std::logic_error);
}

TEST_CASE("deliverer transfer acceptance") {
    Rng rng(1);
    // Carrying the parcel far from the destination at incident speed: late.
    auto d = courier_at(kA, north(3000));
    d.picked_up = true;
    d.current_speed = 0.3;
    const auto t = task_between(north(-500), north(3000), 600.0);
    CHECK(continuation_pickup(d, t) == d.location);
    CHECK(continuation_utility(d, t, 0.0, rng) == doctest::Approx(-7.0).epsilon(1e-9));
    CHECK(deliverer_accepts_transfer(d, t, 3.0, 120.0, 0.0, rng));  // 3.0 - 1.0 > -7

    // On time with positive continuation utility.
    auto ok = courier_at(kA, north(3000));
    ok.picked_up = true;
    const auto t2 = task_between(north(-500), north(3000), 1e6, 7.0);
    CHECK(continuation_utility(ok, t2, 0.0, rng) == doctest::Approx(7.0).epsilon(1e-9));
    CHECK_FALSE(deliverer_accepts_transfer(ok, t2, 0.5, 240.0, 0.0, rng));

    // Not picked up: no waiting cost.
    auto pre = courier_at(kA, north(3000));
    CHECK(continuation_pickup(pre, t2) == t2.origin);
    CHECK_THROWS_AS(deliverer_accepts_transfer(pre, t2, 0.0, 0.0, 0.0, rng), std::invalid_argument);
}

TEST_CASE("accepted transfers are rational for both sides") {
    std::mt19937_64 geo(6);
    for (int i = 0; i < 500; ++i) {
        auto d = courier_at(sample_in_disk(kA, 1500, geo), sample_in_disk(kA, 1500, geo), 900.0);
        d.picked_up = i % 2 == 0;
        auto cand = courier_at(sample_in_disk(kA, 1500, geo), sample_in_disk(kA, 1500, geo), 900.0);
        const auto t = task_between(sample_in_disk(kA, 1500, geo), sample_in_disk(kA, 1500, geo), 900.0);
        const LatLon pickup = continuation_pickup(d, t);

        Rng bid_rng(i);
        const double bid = candidate_bid(cand, t, pickup, 0.0, bid_rng);
        if (bid <= 0.0) continue;
        Rng replay(i);
        const auto est = estimate_arrival(cand, t, pickup, 0.0, replay);
        CHECK(utility(cand, t, est.estimate, pickup) - bid == doctest::Approx(kBidMargin));

        const double delta = distance(cand.location, d.location) / 5.0;
        Rng acc_rng(1000 + i), acc_replay(1000 + i);
        if (deliverer_accepts_transfer(d, t, bid, delta, 0.0, acc_rng)) {
            CHECK(bid - waiting_cost(d, delta) > continuation_utility(d, t, 0.0, acc_replay));
        }
    }
}
