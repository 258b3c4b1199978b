#include "crowdship/delay_predictor.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace crowdship {

FeatureVector build_features(const SituationVector& sv, const DeliveryTask& task, double now,
                             const LatLon& pickup) {
    FeatureVector fv;
    fv.remaining_distance = distance(sv.location, pickup) + distance(pickup, task.destination);
    fv.remaining_time = task.deadline - now;
    fv.avg_speed_5min = sv.avg_speed_5min;
    fv.max_speed_5min = sv.max_speed_5min;
    return fv;
}

FeatureVector build_features(const SituationVector& sv, const DeliveryTask& task, double now) {
    if (task.state == TaskState::picked_up) return build_features(sv, task, now, sv.location);
    return build_features(sv, task, now, task.origin);
}

double hoeffding_bound(double range, double confidence, std::uint64_t n) {
    if (n == 0) throw std::domain_error("hoeffding_bound: n must be positive");
    if (!(range > 0.0)) throw std::domain_error("hoeffding_bound: range must be positive");
    if (!(confidence > 0.0 && confidence <= 1.0)) {
        throw std::domain_error("hoeffding_bound: confidence must lie in (0, 1]");
    }
    return std::sqrt(range * range * std::log(1.0 / confidence) / (2.0 * static_cast<double>(n)));
}

// ---------------------------------------------------------------------------

void GaussianEstimator::add(double x) {
    ++count_;
    const double d = x - mean_;
    mean_ += d / static_cast<double>(count_);
    m2_ += d * (x - mean_);
}

double GaussianEstimator::variance() const {
    if (count_ < 2) return 0.0;
    return std::max(0.0, m2_ / static_cast<double>(count_ - 1));
}

double GaussianEstimator::probability_below(double x) const {
    if (count_ == 0) return 0.0;
    const double var = variance();
    if (var <= 0.0) return mean_ <= x ? 1.0 : 0.0;
    return 0.5 * std::erfc(-(x - mean_) / std::sqrt(2.0 * var));
}

double log_normal_pdf(double x, double mean, double variance) {
    const double var = std::max(variance, kMinLikelihoodVariance);
    const double d = x - mean;
    return -0.5 * std::log(2.0 * std::numbers::pi * var) - d * d / (2.0 * var);
}

// ---------------------------------------------------------------------------

HoeffdingTree::LeafStats::LeafStats() {
    min_seen.fill(std::numeric_limits<double>::infinity());
    max_seen.fill(-std::numeric_limits<double>::infinity());
}

HoeffdingTree::HoeffdingTree(HoeffdingTreeConfig config) : config_(config) { nodes_.emplace_back(); }

std::size_t HoeffdingTree::route_index(const FeatureArray& x) const {
    std::size_t i = 0;
    while (!nodes_[i].is_leaf) {
        const Node& n = nodes_[i];
        i = x[n.feature] <= n.threshold ? n.left : n.right;
    }
    return i;
}

const HoeffdingTree::Node& HoeffdingTree::route(const FeatureVector& fv) const {
    return nodes_[route_index(fv.as_array())];
}

std::array<double, kNumLabels> smoothed_prior(const HoeffdingTree::LeafStats& leaf) {
    const double total = leaf.class_counts[0] + leaf.class_counts[1];
    return {(leaf.class_counts[0] + 1.0) / (total + 2.0), (leaf.class_counts[1] + 1.0) / (total + 2.0)};
}

std::array<double, kNumLabels> naive_bayes_posterior(const HoeffdingTree::LeafStats& leaf, const FeatureArray& x) {
    const auto prior = smoothed_prior(leaf);
    std::array<double, kNumLabels> log_score{std::log(prior[0]), std::log(prior[1])};
    for (std::size_t f = 0; f < kNumFeatures; ++f) {
        const bool usable = leaf.estimators[0][f].count() >= 2 && leaf.estimators[1][f].count() >= 2;
        if (!usable) continue;
        for (std::size_t c = 0; c < kNumLabels; ++c) {
            const auto& est = leaf.estimators[c][f];
            log_score[c] += log_normal_pdf(x[f], est.mean(), est.variance());
        }
    }
    // Two-class softmax in log space.
    const double m = std::max(log_score[0], log_score[1]);
    const double e0 = std::exp(log_score[0] - m);
    const double e1 = std::exp(log_score[1] - m);
    return {e0 / (e0 + e1), e1 / (e0 + e1)};
}

std::array<double, kNumLabels> HoeffdingTree::posterior(const FeatureVector& fv) const {
    const FeatureArray x = fv.as_array();
    return naive_bayes_posterior(nodes_[route_index(x)].stats, x);
}

void HoeffdingTree::learn(const FeatureVector& fv, Label label) {
    const FeatureArray x = fv.as_array();
    const std::size_t li = route_index(x);
    LeafStats& s = nodes_[li].stats;
    const auto c = static_cast<std::size_t>(label);
    s.class_counts[c] += 1.0;
    for (std::size_t f = 0; f < kNumFeatures; ++f) {
        s.estimators[c][f].add(x[f]);
        s.min_seen[f] = std::min(s.min_seen[f], x[f]);
        s.max_seen[f] = std::max(s.max_seen[f], x[f]);
    }
    ++s.seen;
    ++examples_seen_;
    if (config_.grace_period != HoeffdingTreeConfig::kNeverSplit &&
        s.seen - s.seen_at_last_attempt >= config_.grace_period) {
        s.seen_at_last_attempt = s.seen;
        attempt_split(li);
    }
}

namespace {

double entropy(const std::array<double, kNumLabels>& dist) {
    const double total = dist[0] + dist[1];
    if (total <= 0.0) return 0.0;
    double h = 0.0;
    for (double d : dist) {
        if (d > 0.0) {
            const double p = d / total;
            h -= p * std::log2(p);
        }
    }
    return h;
}

struct SplitCandidate {
    double merit = 0.0;
    std::size_t feature = 0;
    double threshold = 0.0;
    std::array<double, kNumLabels> left{};
    std::array<double, kNumLabels> right{};
};

}  // namespace

void HoeffdingTree::attempt_split(std::size_t leaf_index) {
    const LeafStats& s = nodes_[leaf_index].stats;
    const std::array<double, kNumLabels> observed{static_cast<double>(s.estimators[0][0].count()),
                                                  static_cast<double>(s.estimators[1][0].count())};
    if (observed[0] <= 0.0 || observed[1] <= 0.0) return;  // pure leaf
    const double total = observed[0] + observed[1];
    const double pre = entropy(observed);

    // Best split per feature; the null split (merit 0) is always a contender.
    std::vector<SplitCandidate> best_per_feature;
    for (std::size_t f = 0; f < kNumFeatures; ++f) {
        if (!(s.min_seen[f] < s.max_seen[f])) continue;
        const double step = (s.max_seen[f] - s.min_seen[f]) / static_cast<double>(config_.thresholds_per_feature + 1);
        std::optional<SplitCandidate> best;
        for (std::size_t k = 1; k <= config_.thresholds_per_feature; ++k) {
            const double t = s.min_seen[f] + step * static_cast<double>(k);
            SplitCandidate cand;
            cand.feature = f;
            cand.threshold = t;
            for (std::size_t c = 0; c < kNumLabels; ++c) {
                cand.left[c] = observed[c] * s.estimators[c][f].probability_below(t);
                cand.right[c] = observed[c] - cand.left[c];
            }
            const double wl = cand.left[0] + cand.left[1];
            const double wr = cand.right[0] + cand.right[1];
            if (wl < config_.min_branch_fraction * total || wr < config_.min_branch_fraction * total) continue;
            cand.merit = pre - (wl * entropy(cand.left) + wr * entropy(cand.right)) / total;
            if (!best || cand.merit > best->merit) best = cand;
        }
        if (best) best_per_feature.push_back(*best);
    }
    if (best_per_feature.empty()) return;

    std::stable_sort(best_per_feature.begin(), best_per_feature.end(),
                     [](const SplitCandidate& a, const SplitCandidate& b) { return a.merit > b.merit; });
    const SplitCandidate& best = best_per_feature[0];
    const double second = best_per_feature.size() > 1 ? std::max(0.0, best_per_feature[1].merit) : 0.0;
    if (!(best.merit > 0.0)) return;

    const double eps = hoeffding_bound(1.0, config_.split_confidence, static_cast<std::uint64_t>(total));
    if (!(best.merit - second > eps || eps < config_.tie_threshold)) return;

    const std::size_t depth = nodes_[leaf_index].depth;
    Node left_leaf, right_leaf;
    left_leaf.depth = right_leaf.depth = depth + 1;
    left_leaf.stats.class_counts = best.left;
    right_leaf.stats.class_counts = best.right;
    const std::size_t li = nodes_.size();
    nodes_.push_back(std::move(left_leaf));
    nodes_.push_back(std::move(right_leaf));

    Node& n = nodes_[leaf_index];
    n.is_leaf = false;
    n.feature = best.feature;
    n.threshold = best.threshold;
    n.left = li;
    n.right = li + 1;
    n.stats = LeafStats{};
}

std::size_t HoeffdingTree::leaf_count() const {
    return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.is_leaf; }));
}

std::size_t HoeffdingTree::depth() const {
    std::size_t d = 0;
    for (const auto& n : nodes_) d = std::max(d, n.depth);
    return d;
}

double predict_on_time(const HoeffdingTree& tree, const FeatureVector& fv) {
    return tree.posterior(fv)[static_cast<std::size_t>(Label::no_delay)];
}

void learn_one(HoeffdingTree& tree, const FeatureVector& fv, Label label) { tree.learn(fv, label); }

Label predicted_label(double sigma) { return sigma < 0.5 ? Label::delay : Label::no_delay; }

std::string describe(const HoeffdingTree& tree) {
    static constexpr std::array<const char*, kNumFeatures> names{"remaining_distance", "remaining_time",
                                                                 "avg_speed_5min", "max_speed_5min"};
    std::ostringstream out;
    out << "nodes: " << tree.node_count() << "\n"
        << "leaves: " << tree.leaf_count() << "\n"
        << "depth: " << tree.depth() << "\n"
        << "examples_seen: " << tree.examples_seen() << "\n";
    for (std::size_t i = 0; i < tree.nodes().size(); ++i) {
        const auto& n = tree.nodes()[i];
        if (n.is_leaf) continue;
        out << "split " << i << ": " << names[n.feature] << " <= " << n.threshold << " -> " << n.left << " | "
            << n.right << "\n";
    }
    return out.str();
}

// ---------------------------------------------------------------------------

const std::vector<FeatureVector>* TrainingBuffer::samples(TaskId task) const {
    const auto it = samples_.find(task);
    return it == samples_.end() ? nullptr : &it->second;
}

TrainResult train_on_outcome(HoeffdingTree& tree, TrainingBuffer& buffer, TaskId task, Label outcome, Rng& rng) {
    const auto* samples = buffer.samples(task);
    if (samples == nullptr || samples->empty()) {
        buffer.clear(task);
        return TrainResult::empty_buffer;
    }
    std::uniform_int_distribution<std::size_t> pick(0, samples->size() - 1);
    learn_one(tree, (*samples)[pick(rng)], outcome);
    buffer.clear(task);
    return TrainResult::trained;
}

namespace {
std::optional<double> ratio(std::uint64_t num, std::uint64_t den) {
    if (den == 0) return std::nullopt;
    return static_cast<double>(num) / static_cast<double>(den);
}
}  // namespace

std::optional<double> PrequentialMetrics::accuracy() const { return ratio(tp + tn, total()); }
std::optional<double> PrequentialMetrics::precision() const { return ratio(tp, tp + fp); }
std::optional<double> PrequentialMetrics::recall() const { return ratio(tp, tp + fn); }

void prequential_update(PrequentialMetrics& metrics, Label predicted, Label actual) {
    if (predicted == Label::delay) {
        (actual == Label::delay ? metrics.tp : metrics.fp) += 1;
    } else {
        (actual == Label::delay ? metrics.fn : metrics.tn) += 1;
    }
}

}  // namespace crowdship
