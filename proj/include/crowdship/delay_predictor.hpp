#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "crowdship/courier_model.hpp"
#include "crowdship/random.hpp"
#include "crowdship/stream_monitor.hpp"

namespace crowdship {

inline constexpr std::size_t kNumFeatures = 4;
using FeatureArray = std::array<double, kNumFeatures>;

/// Inputs of the delay classifier for one (courier, task) pair.
struct FeatureVector {
    double remaining_distance = 0.0;  // m
    double remaining_time = 0.0;      // s, negative past the deadline
    double avg_speed_5min = 0.0;
    double max_speed_5min = 0.0;

    FeatureArray as_array() const { return {remaining_distance, remaining_time, avg_speed_5min, max_speed_5min}; }
    static FeatureVector from_array(const FeatureArray& a) { return {a[0], a[1], a[2], a[3]}; }

    friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

enum class Label : std::size_t { delay = 0, no_delay = 1 };
inline constexpr std::size_t kNumLabels = 2;

/// Features for a courier that still has to collect the parcel at `pickup`.
FeatureVector build_features(const SituationVector& sv, const DeliveryTask& task, double now,
                             const LatLon& pickup);

/// Features for the courier assigned to `task`: routed via the task origin
/// until the parcel is picked up, straight to the destination afterwards.
FeatureVector build_features(const SituationVector& sv, const DeliveryTask& task, double now);

/// epsilon = sqrt(R^2 ln(1/delta) / (2n)). Throws std::domain_error for
/// n = 0, R <= 0 or delta outside (0, 1].
double hoeffding_bound(double range, double confidence, std::uint64_t n);

/// Running mean/variance of one numeric attribute (Welford).
class GaussianEstimator {
public:
    void add(double x);

    std::uint64_t count() const { return count_; }
    double mean() const { return mean_; }
    /// Sample variance; 0 with fewer than two observations.
    double variance() const;
    /// Probability mass at or below `x` under the fitted normal.
    double probability_below(double x) const;

private:
    std::uint64_t count_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

/// Variance used in likelihoods is floored here so that attributes observed
/// at a single repeated value stay finite.
inline constexpr double kMinLikelihoodVariance = 1e-6;

double log_normal_pdf(double x, double mean, double variance);

struct HoeffdingTreeConfig {
    std::uint64_t grace_period = 200;
    double split_confidence = 1e-7;
    double tie_threshold = 0.05;
    std::size_t thresholds_per_feature = 10;
    double min_branch_fraction = 0.01;

    static constexpr std::uint64_t kNeverSplit = std::numeric_limits<std::uint64_t>::max();
};

/// Incremental decision tree over numeric features with Naive-Bayes leaves.
class HoeffdingTree {
public:
    struct LeafStats {
        std::array<double, kNumLabels> class_counts{};
        std::array<std::array<GaussianEstimator, kNumFeatures>, kNumLabels> estimators{};
        FeatureArray min_seen;
        FeatureArray max_seen;
        std::uint64_t seen = 0;
        std::uint64_t seen_at_last_attempt = 0;

        LeafStats();
    };

    struct Node {
        bool is_leaf = true;
        std::size_t feature = 0;
        double threshold = 0.0;  // x[feature] <= threshold goes left
        std::size_t left = 0;
        std::size_t right = 0;
        std::size_t depth = 0;
        LeafStats stats;
    };

    explicit HoeffdingTree(HoeffdingTreeConfig config = {});

    const HoeffdingTreeConfig& config() const { return config_; }

    /// Posterior over {delay, no_delay}, summing to one.
    std::array<double, kNumLabels> posterior(const FeatureVector& fv) const;

    void learn(const FeatureVector& fv, Label label);

    std::size_t node_count() const { return nodes_.size(); }
    std::size_t leaf_count() const;
    std::size_t depth() const;
    std::uint64_t examples_seen() const { return examples_seen_; }
    const std::vector<Node>& nodes() const { return nodes_; }

    /// Leaf reached by `fv`.
    const Node& route(const FeatureVector& fv) const;

private:
    std::size_t route_index(const FeatureArray& x) const;
    void attempt_split(std::size_t leaf_index);

    HoeffdingTreeConfig config_;
    std::vector<Node> nodes_;
    std::uint64_t examples_seen_ = 0;
};

/// Naive-Bayes posterior of a single leaf. Class priors are Laplace-smoothed;
/// a feature contributes its Gaussian likelihood only once every class has
/// at least two observations of it.
std::array<double, kNumLabels> naive_bayes_posterior(const HoeffdingTree::LeafStats& leaf, const FeatureArray& x);

/// Laplace-smoothed class prior (count + 1) / (total + 2).
std::array<double, kNumLabels> smoothed_prior(const HoeffdingTree::LeafStats& leaf);

/// sigma: probability of on-time delivery.
double predict_on_time(const HoeffdingTree& tree, const FeatureVector& fv);

void learn_one(HoeffdingTree& tree, const FeatureVector& fv, Label label);

/// delay iff sigma < 0.5.
Label predicted_label(double sigma);

/// Plain-text model statistics.
std::string describe(const HoeffdingTree& tree);

/// Feature vectors sampled during each active delivery.
class TrainingBuffer {
public:
    void record_sample(TaskId task, const FeatureVector& fv) { samples_[task].push_back(fv); }
    const std::vector<FeatureVector>* samples(TaskId task) const;
    void clear(TaskId task) { samples_.erase(task); }
    std::size_t tasks() const { return samples_.size(); }

private:
    std::map<TaskId, std::vector<FeatureVector>> samples_;
};

inline constexpr double kSampleIntervalSeconds = 60.0;

enum class TrainResult { trained, empty_buffer };

/// Train on one uniformly chosen sample of the task, then drop the task's entry.
TrainResult train_on_outcome(HoeffdingTree& tree, TrainingBuffer& buffer, TaskId task, Label outcome, Rng& rng);

/// Confusion counts with `delay` as the positive class.
struct PrequentialMetrics {
    std::uint64_t tp = 0, tn = 0, fp = 0, fn = 0;

    std::uint64_t total() const { return tp + tn + fp + fn; }
    std::optional<double> accuracy() const;
    std::optional<double> precision() const;
    std::optional<double> recall() const;
};

void prequential_update(PrequentialMetrics& metrics, Label predicted, Label actual);

}  // namespace crowdship
