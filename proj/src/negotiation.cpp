#include "crowdship/negotiation.hpp"

#include <algorithm>
#include <cstdio>

namespace crowdship {

void GlobalRegistry::update(const SituationVector& sv, double current_speed) {
    auto& e = entries_[sv.courier];
    e.situation = sv;
    e.current_speed = current_speed;
}

void GlobalRegistry::set_role(CourierId courier, CourierRole role) {
    const auto it = entries_.find(courier);
    if (it != entries_.end()) it->second.role = role;
}

const GlobalRegistry::Entry* GlobalRegistry::find(CourierId courier) const {
    const auto it = entries_.find(courier);
    return it == entries_.end() ? nullptr : &it->second;
}

std::optional<double> TriggerState::last_attempt(TaskId task) const {
    const auto it = last_attempt_.find(task);
    if (it == last_attempt_.end()) return std::nullopt;
    return it->second;
}

bool trigger_check(double sigma, double threshold, const TriggerState& state, TaskId task, double now) {
    if (!(sigma < threshold)) return false;
    const auto last = state.last_attempt(task);
    return !last || now - *last >= kTriggerCooldownSeconds;
}

CandidateRanking rank_candidates(const GlobalRegistry& registry, const HoeffdingTree& tree, const DeliveryTask& task,
                                 double deliverer_sigma, double now, const LatLon& pickup,
                                 std::optional<CourierId> exclude) {
    CandidateRanking ranking;
    for (const auto& [id, entry] : registry.entries()) {
        if (entry.role != CourierRole::available || !registry.is_fresh(entry, now)) continue;
        if (exclude && *exclude == id) continue;
        const double sigma = predict_on_time(tree, build_features(entry.situation, task, now, pickup));
        if (sigma > deliverer_sigma) ranking.push_back({id, sigma});
    }
    std::sort(ranking.begin(), ranking.end(), [](const RankedCandidate& a, const RankedCandidate& b) {
        if (a.sigma != b.sigma) return a.sigma > b.sigma;
        return a.courier < b.courier;
    });
    return ranking;
}

double temporal_distance(const GlobalRegistry& registry, CourierId candidate, const LatLon& deliverer_location,
                         double now) {
    const auto* entry = registry.find(candidate);
    if (entry == nullptr || !registry.is_fresh(*entry, now)) {
        throw StaleCourierError("temporal_distance: candidate is unknown or stale");
    }
    const double speed = std::max(entry->current_speed, kMinPlanningSpeed);
    return distance(entry->situation.location, deliverer_location) / speed;
}

TransferOutcome negotiate(TransferSession& session, NegotiationParties& parties) {
    session.outcome = {};
    for (const auto& candidate : session.ranking) {
        if (!parties.task_active()) {
            session.outcome.kind = OutcomeKind::aborted_stale_task;
            return session.outcome;
        }
        BidRecord record{candidate.courier, parties.bid(candidate.courier), std::nullopt, std::nullopt};
        if (record.bid > 0.0) {
            record.temporal_distance = parties.temporal_distance(candidate.courier);
            record.deliverer_accepted = parties.deliverer_accepts(candidate.courier, record.bid, *record.temporal_distance);
        }
        session.bids.push_back(record);
        if (record.deliverer_accepted.value_or(false)) {
            session.outcome = {OutcomeKind::transferred, candidate.courier, record.bid};
            return session.outcome;
        }
    }
    session.outcome.kind = OutcomeKind::no_agreement;
    return session.outcome;
}

TransferOutcome force_transfer(const CandidateRanking& ranking, const DeliveryTask&) {
    if (ranking.empty()) return {OutcomeKind::no_agreement, std::nullopt, 0.0};
    return {OutcomeKind::transferred, ranking.front().courier, 0.0};
}

const char* to_string(OutcomeKind kind) {
    switch (kind) {
        case OutcomeKind::transferred: return "transferred";
        case OutcomeKind::no_agreement: return "no_agreement";
        case OutcomeKind::aborted_stale_task: return "aborted_stale_task";
    }
    return "?";
}

void write_transfer_log_header(std::ostream& out) {
    out << "timestamp,task_id,deliverer_id,outcome,substitute_id,winning_bid,candidates_queried,ranking_size\n";
}

void write_transfer_log_record(std::ostream& out, const TransferLogRecord& r) {
    char bid[32];
    std::snprintf(bid, sizeof bid, "%.4f", r.winning_bid);
    out << static_cast<long long>(r.timestamp) << ',' << static_cast<std::uint64_t>(r.task) << ','
        << static_cast<std::uint64_t>(r.deliverer) << ',' << to_string(r.outcome) << ',';
    if (r.substitute) out << static_cast<std::uint64_t>(*r.substitute);
    out << ',' << bid << ',' << r.candidates_queried << ',' << r.ranking_size << '\n';
}

}  // namespace crowdship
