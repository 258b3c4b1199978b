#include "crowdship/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <unordered_map>

namespace crowdship {
namespace {

std::string format_optional(const std::optional<double>& v) {
    if (!v) return "";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", *v);
    return buf;
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

double mean_of(const std::vector<double>& v) {
    return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

std::optional<Scenario> parse_scenario(std::string_view s) {
    if (s == "1") return Scenario::one;
    if (s == "2") return Scenario::two;
    if (s == "3") return Scenario::three;
    if (s == "custom") return Scenario::custom;
    return std::nullopt;
}

SimConfig scenario_config(Scenario scenario) {
    SimConfig config;
    switch (scenario) {
        case Scenario::two:
            config.incident_probability_per_min = 0.10;
            break;
        case Scenario::three:
            config.tasks_per_hour = 100.0;
            break;
        case Scenario::one:
        case Scenario::custom:
            break;
    }
    return config;
}

SimConfig build_config(Scenario scenario, const ConfigOverrides& o, bool explicit_tasks) {
    if (scenario != Scenario::custom && (o.tasks_per_hour || o.incident_probability_per_min)) {
        throw UsageError("task rate and incident probability define the scenario; use --scenario custom to set them");
    }
    if (explicit_tasks && o.tasks_per_hour) {
        throw UsageError("a task rate cannot be combined with an explicit task file");
    }
    SimConfig c = scenario_config(scenario);
    auto apply = [](double& field, const std::optional<double>& v) {
        if (v) field = *v;
    };
    apply(c.radius, o.radius);
    apply(c.reward, o.reward);
    apply(c.deadline, o.deadline);
    apply(c.penalty, o.penalty);
    apply(c.cost_per_km, o.cost_per_km);
    apply(c.waiting_cost_per_min, o.waiting_cost_per_min);
    apply(c.default_speed, o.default_speed);
    apply(c.incident_speed, o.incident_speed);
    apply(c.prediction_error, o.prediction_error);
    apply(c.trigger_threshold, o.trigger_threshold);
    apply(c.tasks_per_hour, o.tasks_per_hour);
    apply(c.incident_probability_per_min, o.incident_probability_per_min);
    apply(c.center.lat, o.center_lat);
    apply(c.center.lon, o.center_lon);
    if (o.days) c.days = *o.days;
    try {
        c.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    return c;
}

std::vector<std::vector<Trip>> load_trips(const ExperimentSpec& spec, std::uint64_t seed) {
    if (spec.traces) {
        auto parsed = parse_traces(*spec.traces);
        if (parsed.trips.empty()) throw UsageError("trace file has no trips: " + spec.traces->string());
        return {std::move(parsed.trips)};
    }
    TraceSynthConfig synth;
    synth.center = spec.sim.center;
    synth.radius = spec.sim.radius;
    std::vector<std::vector<Trip>> days;
    for (int d = 0; d < spec.sim.days; ++d) {
        Rng rng = make_stream(seed + static_cast<std::uint64_t>(d) * 7919ULL, Stream::traces);
        days.push_back(synth_traces(spec.couriers_per_day, synth, rng));
    }
    return days;
}

Label deadline_outcome(const Trip& trip, double start, double deadline) {
    return start + trip.duration() < deadline ? Label::no_delay : Label::delay;
}

std::vector<double> draw_eval_deadlines(const std::vector<double>& starts, Rng& rng) {
    std::uniform_real_distribution<double> slack(kMinEvalDeadline, kMaxEvalDeadline);
    std::vector<double> deadlines;
    deadlines.reserve(starts.size());
    for (double s : starts) deadlines.push_back(s + slack(rng));
    return deadlines;
}

PredictEvalResult prequential_over_trips(const std::vector<Trip>& trips, const std::vector<double>& starts,
                                         const std::vector<double>& deadlines, const OutcomeRule& outcome,
                                         Rng& training_rng, HoeffdingTreeConfig tree_config) {
    if (starts.size() != trips.size() || deadlines.size() != trips.size()) {
        throw std::invalid_argument("one start and one deadline per trip required");
    }
    std::unordered_map<std::uint64_t, std::size_t> index;
    for (std::size_t i = 0; i < trips.size(); ++i) {
        if (!index.emplace(trips[i].trip_id, i).second) throw std::invalid_argument("duplicate trip id");
    }

    HoeffdingTree tree(tree_config);
    StreamMonitor monitor;
    std::vector<std::vector<FeatureVector>> vectors(trips.size());
    std::vector<std::size_t> seen(trips.size(), 0);
    PredictEvalResult result;
    std::size_t finished = 0;

    for (const auto& ev : timed_events(trips, starts)) {
        const std::size_t i = index.at(static_cast<std::uint64_t>(ev.courier));
        const Trip& trip = trips[i];
        const auto update = monitor.observe(ev);
        ++seen[i];
        if (seen[i] < trip.samples.size()) {
            DeliveryTask task;
            task.id = TaskId{trip.trip_id};
            task.origin = trip.samples.front().location;
            task.destination = trip.samples.back().location;
            task.deadline = deadlines[i];
            task.state = TaskState::picked_up;
            vectors[i].push_back(build_features(update.vector, task, ev.timestamp));
            continue;
        }

        monitor.forget(ev.courier);
        ++finished;
        auto& vs = vectors[i];
        if (vs.empty()) {
            ++result.skipped_trips;
        } else {
            const Label actual = outcome(trip, starts[i], deadlines[i]);
            prequential_update(result.metrics, predicted_label(predict_on_time(tree, vs.back())), actual);
            std::uniform_int_distribution<std::size_t> pick(0, vs.size() - 1);
            tree.learn(vs[pick(training_rng)], actual);
        }
        vs.clear();
        vs.shrink_to_fit();
        result.curve.push_back(
            {finished, result.metrics.accuracy(), result.metrics.precision(), result.metrics.recall()});
    }
    result.model = describe(tree);
    return result;
}

PredictEvalResult run_predict_eval(const ExperimentSpec& spec) {
    std::vector<Trip> trips;
    if (spec.traces) {
        trips = parse_traces(*spec.traces).trips;
    } else {
        TraceSynthConfig synth;
        synth.center = spec.sim.center;
        synth.radius = spec.sim.radius;
        Rng rng = make_stream(spec.seed, Stream::traces);
        trips = synth_traces(spec.eval_trips, synth, rng);
    }
    if (trips.empty()) throw UsageError("no trips to evaluate");

    Rng start_rng = make_stream(spec.seed, Stream::trace_starts);
    Rng deadline_rng = make_stream(spec.seed, Stream::deadlines);
    Rng training_rng = make_stream(spec.seed, Stream::training);
    const auto starts = draw_start_times(trips, start_rng, 0.0);
    const auto deadlines = draw_eval_deadlines(starts, deadline_rng);
    return prequential_over_trips(trips, starts, deadlines, deadline_outcome, training_rng, spec.sim.tree);
}

void write_curve(std::ostream& out, const std::vector<CurvePoint>& curve) {
    out << "trips,accuracy,precision,recall\n";
    for (const auto& p : curve) {
        out << p.trips << ',' << format_optional(p.accuracy) << ',' << format_optional(p.precision) << ','
            << format_optional(p.recall) << '\n';
    }
}

SimResults run_simulation(const ExperimentSpec& spec) {
    SimConfig config = spec.sim;
    config.seed = spec.seed;
    std::optional<std::vector<TaskRecord>> tasks;
    if (spec.tasks) tasks = parse_tasks(*spec.tasks);
    Simulator sim(config, load_trips(spec, spec.seed), std::move(tasks));
    return sim.run();
}

void write_simulation_outputs(const std::filesystem::path& dir, const SimResults& results) {
    std::filesystem::create_directories(dir);
    auto rows = open_output(dir / "results.csv");
    write_results(rows, results.rows);
    auto summary = open_output(dir / "summary.txt");
    write_summary(summary, results.summary);
    auto transfers = open_output(dir / "transfers.csv");
    write_transfer_log(transfers, results.transfers);
}

const StrategyRow& Comparison::row(Strategy s) const {
    for (const auto& r : rows) {
        if (r.strategy == s) return r;
    }
    throw std::out_of_range("strategy not in comparison");
}

Comparison compare_strategies(const ExperimentSpec& spec, const std::vector<std::uint64_t>& seeds,
                              const std::function<void(const SimResults&)>& per_run) {
    Comparison cmp;
    cmp.seeds = seeds;
    for (Strategy s : {Strategy::NOT, Strategy::S_BEST, Strategy::F_BEST}) {
        StrategyRow row;
        row.strategy = s;
        cmp.rows.push_back(row);
    }

    std::optional<std::vector<TaskRecord>> tasks;
    if (spec.tasks) tasks = parse_tasks(*spec.tasks);

    for (std::uint64_t seed : seeds) {
        const auto trips = load_trips(spec, seed);
        for (auto& row : cmp.rows) {
            SimConfig config = spec.sim;
            config.seed = seed;
            config.strategy = row.strategy;
            Simulator sim(config, trips, tasks);
            const SimResults res = sim.run();
            row.final_fractions.push_back(res.summary.final_delay_fraction);
            row.transfers.push_back(res.summary.transfers_executed);
            row.attempts.push_back(res.summary.sessions_attempted);
            if (per_run) per_run(res);
        }
    }

    for (auto& row : cmp.rows) {
        row.mean_fraction = mean_of(row.final_fractions);
        double ss = 0.0;
        for (double f : row.final_fractions) ss += (f - row.mean_fraction) * (f - row.mean_fraction);
        row.stddev_fraction =
            row.final_fractions.size() > 1 ? std::sqrt(ss / static_cast<double>(row.final_fractions.size() - 1)) : 0.0;
        std::vector<double> t(row.transfers.begin(), row.transfers.end());
        std::vector<double> a(row.attempts.begin(), row.attempts.end());
        row.mean_transfers = mean_of(t);
        row.mean_attempts = mean_of(a);
    }
    return cmp;
}

void write_comparison(std::ostream& out, const Comparison& cmp) {
    out << "strategy,seeds,mean_delay_fraction,stddev_delay_fraction,mean_transfers,mean_sessions\n";
    for (const auto& r : cmp.rows) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%s,%zu,%.6f,%.6f,%.2f,%.2f\n", to_string(r.strategy), r.final_fractions.size(),
                      r.mean_fraction, r.stddev_fraction, r.mean_transfers, r.mean_attempts);
        out << buf;
    }
}

void write_comparison_runs(std::ostream& out, const Comparison& cmp) {
    out << "strategy,seed,final_delay_fraction,transfers,sessions\n";
    for (const auto& r : cmp.rows) {
        for (std::size_t i = 0; i < r.final_fractions.size(); ++i) {
            char buf[160];
            std::snprintf(buf, sizeof buf, "%s,%llu,%.6f,%zu,%zu\n", to_string(r.strategy),
                          static_cast<unsigned long long>(cmp.seeds[i]), r.final_fractions[i], r.transfers[i],
                          r.attempts[i]);
            out << buf;
        }
    }
}

}  // namespace crowdship
