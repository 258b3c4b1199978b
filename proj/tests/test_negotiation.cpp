#include <algorithm>
#include <random>
#include <sstream>

#include "crowdship/negotiation.hpp"
#include "doctest.h"

using namespace crowdship;

namespace {

const LatLon kA{40.4168, -3.7038};
LatLon north(double m) { return offset(kA, 0.0, m); }

SituationVector situation(std::uint64_t id, LatLon where, double t, double avg = 4.0) {
    SituationVector sv;
    sv.courier = CourierId{id};
    sv.timestamp = t;
    sv.location = where;
    sv.avg_speed_5min = avg;
    sv.max_speed_5min = avg;
    return sv;
}

DeliveryTask make_task(LatLon o, LatLon d, double deadline, double reward = 7.0) {
    DeliveryTask t;
    t.id = TaskId{1};
    t.origin = o;
    t.destination = d;
    t.deadline = deadline;
    t.reward = reward;
    t.penalty = 7.0;
    t.state = TaskState::picked_up;
    return t;
}

CourierState courier(std::uint64_t id, LatLon where, LatLon dest) {
    CourierState c;
    c.id = CourierId{id};
    c.location = where;
    c.destination = dest;
    c.current_speed = 5.0;
    c.params.error_bound = 0.0;
    return c;
}

// Parties backed by the real courier decision functions.
struct ModelParties : NegotiationParties {
    DeliveryTask task;
    CourierState deliverer;
    std::map<CourierId, CourierState> candidates;
    bool active = true;
    Rng rng{1};
    int bid_calls = 0, accept_calls = 0;

    bool task_active() override { return active; }
    double bid(CourierId c) override {
        ++bid_calls;
        return candidate_bid(candidates.at(c), task, deliverer.location, 0.0, rng);
    }
    double temporal_distance(CourierId c) override {
        return distance(candidates.at(c).location, deliverer.location) / candidates.at(c).current_speed;
    }
    bool deliverer_accepts(CourierId, double bid, double delta) override {
        ++accept_calls;
        return deliverer_accepts_transfer(deliverer, task, bid, delta, 0.0, rng);
    }
};

// A deliverer stuck at incident speed 3 km from the destination: late for sure.
ModelParties stuck_deliverer(double reward) {
    ModelParties p;
    p.task = make_task(north(-200), north(3000), 700.0, reward);
    p.deliverer = courier(1, kA, north(3000));
    p.deliverer.picked_up = true;
    p.deliverer.current_speed = 0.3;
    return p;
}

TransferSession session_for(const std::vector<std::uint64_t>& ids) {
    TransferSession s;
    s.request = {TaskId{1}, CourierId{1}, 0.1, 0.0};
    for (auto id : ids) s.ranking.push_back({CourierId{id}, 0.9});
    return s;
}

}  // namespace

TEST_CASE("trigger fires strictly below threshold, respecting cooldown") {
    TriggerState st;
    const TaskId t{1};
    CHECK(trigger_check(0.79, 0.80, st, t, 100.0));
    CHECK_FALSE(trigger_check(0.80, 0.80, st, t, 100.0));
    st.record_attempt(t, 100.0);
    CHECK_FALSE(trigger_check(0.5, 0.80, st, t, 130.0));
    CHECK(trigger_check(0.5, 0.80, st, t, 160.0));
    CHECK(trigger_check(0.5, 0.80, st, TaskId{2}, 130.0));
    st.forget(t);
    CHECK(trigger_check(0.5, 0.80, st, t, 101.0));
}

TEST_CASE("ranking filters dominated, assigned and stale couriers and sorts by sigma") {
    // Tree that learned: short remaining distance is on time.
    HoeffdingTree tree;
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 4000.0);
    for (int i = 0; i < 2000; ++i) {
        FeatureVector fv{u(rng), 900.0, 4.0, 4.0};
        tree.learn(fv, fv.remaining_distance < 2000.0 ? Label::no_delay : Label::delay);
    }
    const auto task = make_task(north(0), north(500), 1000.0);
    GlobalRegistry reg;
    const double now = 1000.0;
    const std::vector<double> positions{100.0, 900.0, 1700.0, 2500.0, 3300.0};
    for (std::size_t i = 0; i < positions.size(); ++i) reg.update(situation(10 + i, north(-positions[i]), now), 4.0);
    reg.update(situation(20, north(-50), now), 4.0);
    reg.set_role(CourierId{20}, CourierRole::deliverer);
    reg.update(situation(21, north(-50), now - 601.0), 4.0);

    std::vector<RankedCandidate> expected;
    const double sigma_d = 0.3;
    for (std::size_t i = 0; i < positions.size(); ++i) {
        const auto& e = *reg.find(CourierId{10 + i});
        const double s = predict_on_time(tree, build_features(e.situation, task, now, task.origin));
        if (s > sigma_d) expected.push_back({CourierId{10 + i}, s});
    }
    std::sort(expected.begin(), expected.end(), [](auto& a, auto& b) { return a.sigma > b.sigma; });
    REQUIRE_FALSE(expected.empty());
    REQUIRE(expected.size() < positions.size());

    const auto ranking = rank_candidates(reg, tree, task, sigma_d, now, task.origin);
    REQUIRE(ranking.size() == expected.size());
    for (std::size_t i = 0; i < ranking.size(); ++i) {
        CHECK(ranking[i].courier == expected[i].courier);
        CHECK(ranking[i].sigma > sigma_d);
    }
    CHECK(rank_candidates(reg, tree, task, 1.0, now, task.origin).empty());
}

TEST_CASE("equal sigma breaks ties by courier id") {
    HoeffdingTree untrained;
    GlobalRegistry reg;
    for (std::uint64_t id : {7u, 3u, 5u}) reg.update(situation(id, kA, 0.0), 4.0);
    const auto r = rank_candidates(reg, untrained, make_task(kA, north(100), 100.0), 0.3, 0.0, kA, CourierId{5});
    REQUIRE(r.size() == 2);
    CHECK(r[0].courier == CourierId{3});
    CHECK(r[1].courier == CourierId{7});
    CHECK(r[0].sigma == doctest::Approx(0.5));
}

TEST_CASE("temporal distance") {
    GlobalRegistry reg;
    reg.update(situation(1, kA, 0.0), 5.0);
    reg.update(situation(2, kA, 0.0), 0.0);
    CHECK(temporal_distance(reg, CourierId{1}, north(600), 0.0) == doctest::Approx(120.0).epsilon(1e-9));
    CHECK(temporal_distance(reg, CourierId{1}, kA, 0.0) == 0.0);
    CHECK(temporal_distance(reg, CourierId{2}, north(600), 0.0) == doctest::Approx(2000.0).epsilon(1e-9));
    CHECK_THROWS_AS(temporal_distance(reg, CourierId{1}, kA, 601.0), StaleCourierError);
    CHECK_THROWS_AS(temporal_distance(reg, CourierId{9}, kA, 0.0), StaleCourierError);
}

TEST_CASE("single willing candidate is accepted") {
    auto p = stuck_deliverer(2.5);
    // Candidate standing at the deliverer heading to the destination: zero detour.
    p.candidates[CourierId{2}] = courier(2, kA, north(3000));
    auto s = session_for({2});
    const auto out = negotiate(s, p);
    CHECK(out.kind == OutcomeKind::transferred);
    CHECK(out.substitute == CourierId{2});
    CHECK(out.bid == doctest::Approx(2.49));
    REQUIRE(s.bids.size() == 1);
    CHECK(s.bids[0].temporal_distance == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("candidate whose detour exceeds the reward bids zero") {
    auto p = stuck_deliverer(2.5);
    // Going the other way: detour about 6 km.
    p.candidates[CourierId{2}] = courier(2, kA, north(-3000));
    auto s = session_for({2});
    const auto out = negotiate(s, p);
    CHECK(out.kind == OutcomeKind::no_agreement);
    CHECK(s.bids.at(0).bid == 0.0);
    CHECK(p.accept_calls == 0);
}

TEST_CASE("first candidate rejected, second accepted") {
    // On-time deliverer whose own route costs a 2 km detour: continuation utility 7 - 6 = 1.
    ModelParties p;
    p.task = make_task(north(-200), north(1000), 1e6, 7.0);
    p.deliverer = courier(1, kA, north(-1000));
    p.deliverer.picked_up = true;
    Rng probe(0);
    REQUIRE(continuation_utility(p.deliverer, p.task, 0.0, probe) == doctest::Approx(1.0));
    // Same detour: bids 0.99 and is rejected. Zero detour: bids 6.99 and is accepted.
    p.candidates[CourierId{2}] = courier(2, kA, north(-1000));
    p.candidates[CourierId{3}] = courier(3, kA, north(1000));
    auto s = session_for({2, 3});
    const auto out = negotiate(s, p);
    CHECK(out.kind == OutcomeKind::transferred);
    CHECK(out.substitute == CourierId{3});
    CHECK(out.bid == doctest::Approx(6.99));
    REQUIRE(s.bids.size() == 2);
    CHECK(s.bids[0].bid == doctest::Approx(0.99));
    CHECK(s.bids[0].deliverer_accepted == false);
    CHECK(p.bid_calls == 2);
}

TEST_CASE("session solicits each candidate at most once and aborts on a stale task") {
    auto p = stuck_deliverer(2.5);
    for (std::uint64_t id = 2; id < 7; ++id) p.candidates[CourierId{id}] = courier(id, kA, north(-3000));
    auto s = session_for({2, 3, 4, 5, 6});
    negotiate(s, p);
    CHECK(p.bid_calls == 5);

    auto q = stuck_deliverer(2.5);
    q.candidates[CourierId{2}] = courier(2, kA, north(3000));
    q.active = false;
    auto s2 = session_for({2});
    CHECK(negotiate(s2, q).kind == OutcomeKind::aborted_stale_task);
    CHECK(q.bid_calls == 0);
}

TEST_CASE("forced transfer takes the top candidate") {
    const auto task = make_task(kA, north(100), 100.0);
    CandidateRanking r{{CourierId{3}, 0.9}, {CourierId{1}, 0.6}};
    const auto out = force_transfer(r, task);
    CHECK(out.kind == OutcomeKind::transferred);
    CHECK(out.substitute == CourierId{3});
    CHECK(force_transfer({}, task).kind == OutcomeKind::no_agreement);
}

TEST_CASE("transfer log rows") {
    std::ostringstream out;
    write_transfer_log_header(out);
    write_transfer_log_record(out, {3600.0, TaskId{4}, CourierId{7}, OutcomeKind::transferred, CourierId{9}, 2.49, 1, 3});
    write_transfer_log_record(out, {3661.0, TaskId{4}, CourierId{7}, OutcomeKind::no_agreement, std::nullopt, 0.0, 2, 2});
    CHECK(out.str() ==
          "timestamp,task_id,deliverer_id,outcome,substitute_id,winning_bid,candidates_queried,ranking_size\n"
          "3600,4,7,transferred,9,2.4900,1,3\n"
          "3661,4,7,no_agreement,,0.0000,2,2\n");
}
