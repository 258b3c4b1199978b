#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "crowdship/delay_predictor.hpp"
#include "crowdship/ingest.hpp"
#include "crowdship/simulator.hpp"

namespace crowdship {

struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

enum class ExperimentMode { predict_eval, simulate, compare };

enum class Scenario { one = 1, two = 2, three = 3, custom = 0 };

std::optional<Scenario> parse_scenario(std::string_view s);

/// Per-parameter overrides on top of a scenario preset.
struct ConfigOverrides {
    std::optional<double> radius, reward, deadline, penalty, cost_per_km, waiting_cost_per_min, default_speed,
        incident_speed, prediction_error, trigger_threshold, tasks_per_hour, incident_probability_per_min;
    std::optional<int> days;
    std::optional<double> center_lat, center_lon;
};

/// Scenario presets: (tasks/h, incident probability per minute) =
/// 1: (50, 0.05), 2: (50, 0.10), 3: (100, 0.05); other parameters shared.
SimConfig scenario_config(Scenario scenario);

/// Preset plus overrides. Overriding the scenario-defining parameters
/// (task rate, incident probability) is only allowed with Scenario::custom,
/// and a task rate cannot be combined with an explicit task file.
SimConfig build_config(Scenario scenario, const ConfigOverrides& overrides, bool explicit_tasks);

struct ExperimentSpec {
    ExperimentMode mode = ExperimentMode::simulate;
    Scenario scenario = Scenario::one;
    SimConfig sim = scenario_config(Scenario::one);
    std::uint64_t seed = 42;
    std::vector<std::uint64_t> seeds;                // compare mode
    std::optional<std::filesystem::path> traces;     // nullopt: synthetic
    std::optional<std::filesystem::path> tasks;
    std::filesystem::path out = "out";
    std::size_t couriers_per_day = 8500;
    std::size_t eval_trips = 10000;
};

/// Trips per simulated day: synthetic per day from the seed, or the trace
/// file replayed every day.
std::vector<std::vector<Trip>> load_trips(const ExperimentSpec& spec, std::uint64_t seed);

// --- delay-prediction experiment --------------------------------------------

struct CurvePoint {
    std::size_t trips = 0;
    std::optional<double> accuracy, precision, recall;
};

struct PredictEvalResult {
    std::vector<CurvePoint> curve;
    PrequentialMetrics metrics;
    std::size_t skipped_trips = 0;  // fewer than two samples
    std::string model;
};

/// Outcome of one trip given its absolute start and deadline.
using OutcomeRule = std::function<Label(const Trip& trip, double start, double deadline)>;

/// On time iff the trip ends strictly before its deadline.
Label deadline_outcome(const Trip& trip, double start, double deadline);

inline constexpr double kMinEvalDeadline = 60.0;
inline constexpr double kMaxEvalDeadline = 1800.0;

/// Deadline per trip: start + U[60, 1800] s.
std::vector<double> draw_eval_deadlines(const std::vector<double>& starts, Rng& rng);

/// Prequential test-then-train over trips in completion order. Each trip is
/// tested with its last vector before completion and trained with one
/// uniformly chosen vector from the same trip.
PredictEvalResult prequential_over_trips(const std::vector<Trip>& trips, const std::vector<double>& starts,
                                         const std::vector<double>& deadlines, const OutcomeRule& outcome,
                                         Rng& training_rng, HoeffdingTreeConfig tree_config = {});

/// Throws UsageError for an empty trace set.
PredictEvalResult run_predict_eval(const ExperimentSpec& spec);

void write_curve(std::ostream& out, const std::vector<CurvePoint>& curve);

// --- simulation ---------------------------------------------------------------

SimResults run_simulation(const ExperimentSpec& spec);

/// results.csv, summary.txt, transfers.csv
void write_simulation_outputs(const std::filesystem::path& dir, const SimResults& results);

struct StrategyRow {
    Strategy strategy = Strategy::NOT;
    std::vector<double> final_fractions;  // per seed
    std::vector<std::size_t> transfers;   // executed, per seed
    std::vector<std::size_t> attempts;    // sessions, per seed
    double mean_fraction = 0.0;
    double stddev_fraction = 0.0;
    double mean_transfers = 0.0;
    double mean_attempts = 0.0;
};

struct Comparison {
    std::vector<std::uint64_t> seeds;
    std::vector<StrategyRow> rows;  // NOT, S_BEST, F_BEST

    const StrategyRow& row(Strategy s) const;
};

/// Run NOT, S_BEST and F_BEST for every seed with shared trace and task
/// streams. `per_run` (optional) sees every finished run.
Comparison compare_strategies(const ExperimentSpec& spec, const std::vector<std::uint64_t>& seeds,
                              const std::function<void(const SimResults&)>& per_run = {});

void write_comparison(std::ostream& out, const Comparison& comparison);
/// One row per (strategy, seed).
void write_comparison_runs(std::ostream& out, const Comparison& comparison);

}  // namespace crowdship
