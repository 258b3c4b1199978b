#pragma once

#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "crowdship/courier_model.hpp"
#include "crowdship/delay_predictor.hpp"
#include "crowdship/stream_monitor.hpp"

namespace crowdship {

enum class CourierRole { available, deliverer };

inline constexpr double kRegistryStaleSeconds = 600.0;

struct StaleCourierError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// The logistics provider's view of the crowd: latest forwarded situation
/// vector and role per courier.
class GlobalRegistry {
public:
    struct Entry {
        SituationVector situation;
        double current_speed = 0.0;  // m/s, last sensed
        CourierRole role = CourierRole::available;
    };

    void update(const SituationVector& sv, double current_speed);
    void set_role(CourierId courier, CourierRole role);
    void remove(CourierId courier) { entries_.erase(courier); }

    const Entry* find(CourierId courier) const;
    bool is_fresh(const Entry& entry, double now) const {
        return now - entry.situation.timestamp <= kRegistryStaleSeconds;
    }
    const std::map<CourierId, Entry>& entries() const { return entries_; }

private:
    std::map<CourierId, Entry> entries_;
};

struct TransferRequest {
    TaskId task{};
    CourierId deliverer{};
    double deliverer_sigma = 0.0;
    double timestamp = 0.0;
};

struct RankedCandidate {
    CourierId courier{};
    double sigma = 0.0;
};

/// Candidates strictly preferred over the deliverer, best first.
using CandidateRanking = std::vector<RankedCandidate>;

inline constexpr double kTriggerCooldownSeconds = 60.0;

/// Last transfer attempt per task.
class TriggerState {
public:
    std::optional<double> last_attempt(TaskId task) const;
    void record_attempt(TaskId task, double now) { last_attempt_[task] = now; }
    void forget(TaskId task) { last_attempt_.erase(task); }

private:
    std::map<TaskId, double> last_attempt_;
};

/// Fires iff sigma < threshold and the task's cooldown has elapsed.
bool trigger_check(double sigma, double threshold, const TriggerState& state, TaskId task, double now);

/// Rank every fresh, available courier (other than `exclude`) by predicted
/// on-time probability of collecting the parcel at `pickup`; drop those
/// dominated by the deliverer. Ties are broken by courier id.
CandidateRanking rank_candidates(const GlobalRegistry& registry, const HoeffdingTree& tree, const DeliveryTask& task,
                                 double deliverer_sigma, double now, const LatLon& pickup,
                                 std::optional<CourierId> exclude = std::nullopt);

/// delta_j: distance to the deliverer over the candidate's sensed speed
/// (clamped at kMinPlanningSpeed). Throws StaleCourierError for unknown or
/// stale candidates.
double temporal_distance(const GlobalRegistry& registry, CourierId candidate, const LatLon& deliverer_location,
                         double now);

enum class OutcomeKind { transferred, no_agreement, aborted_stale_task };

struct TransferOutcome {
    OutcomeKind kind = OutcomeKind::no_agreement;
    std::optional<CourierId> substitute;
    double bid = 0.0;
};

struct BidRecord {
    CourierId candidate{};
    double bid = 0.0;
    std::optional<double> temporal_distance;
    std::optional<bool> deliverer_accepted;
};

struct TransferSession {
    TransferRequest request;
    CandidateRanking ranking;
    std::vector<BidRecord> bids;
    TransferOutcome outcome;
};

/// The courier-side decisions the protocol consults.
class NegotiationParties {
public:
    virtual ~NegotiationParties() = default;
    /// False once the deliverer no longer holds the task.
    virtual bool task_active() = 0;
    virtual double bid(CourierId candidate) = 0;
    virtual double temporal_distance(CourierId candidate) = 0;
    virtual bool deliverer_accepts(CourierId candidate, double bid, double delta_seconds) = 0;
};

/// Offer the task down the ranking until a candidate with a positive bid is
/// accepted by the deliverer. Each candidate is queried at most once.
TransferOutcome negotiate(TransferSession& session, NegotiationParties& parties);

/// Reassign to the top candidate without consulting anyone.
TransferOutcome force_transfer(const CandidateRanking& ranking, const DeliveryTask& task);

const char* to_string(OutcomeKind kind);

/// One row of the transfer log.
struct TransferLogRecord {
    double timestamp = 0.0;
    TaskId task{};
    CourierId deliverer{};
    OutcomeKind outcome = OutcomeKind::no_agreement;
    std::optional<CourierId> substitute;
    double winning_bid = 0.0;
    std::size_t candidates_queried = 0;
    std::size_t ranking_size = 0;
};

void write_transfer_log_header(std::ostream& out);
void write_transfer_log_record(std::ostream& out, const TransferLogRecord& record);

}  // namespace crowdship
