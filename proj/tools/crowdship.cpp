#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "crowdship/experiment.hpp"

namespace cs = crowdship;

namespace {

int run(const cs::ExperimentSpec& spec) {
    std::filesystem::create_directories(spec.out);
    switch (spec.mode) {
        case cs::ExperimentMode::predict_eval: {
            const auto result = cs::run_predict_eval(spec);
            std::ofstream curve(spec.out / "prediction_curve.csv");
            cs::write_curve(curve, result.curve);
            std::ofstream model(spec.out / "model.txt");
            model << result.model;
            const auto acc = result.metrics.accuracy();
            std::cout << "trips " << result.curve.size() << "  accuracy " << (acc ? *acc : 0.0) << "  precision "
                      << result.metrics.precision().value_or(0.0) << "  recall "
                      << result.metrics.recall().value_or(0.0) << '\n';
            return 0;
        }
        case cs::ExperimentMode::simulate: {
            const auto results = cs::run_simulation(spec);
            cs::write_simulation_outputs(spec.out, results);
            cs::write_summary(std::cout, results.summary);
            return 0;
        }
        case cs::ExperimentMode::compare: {
            std::vector<std::uint64_t> seeds = spec.seeds;
            if (seeds.empty()) seeds = {spec.seed};
            const auto cmp = cs::compare_strategies(spec, seeds);
            std::ofstream table(spec.out / "comparison.csv");
            cs::write_comparison(table, cmp);
            std::ofstream runs(spec.out / "comparison_runs.csv");
            cs::write_comparison_runs(runs, cmp);
            cs::write_comparison(std::cout, cmp);
            return 0;
        }
    }
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Crowdshipping simulator with streaming delay prediction and task transfer"};

    std::string mode = "simulate";
    std::string scenario = "1";
    std::string strategy = "S_BEST";
    std::string traces = "synthetic";
    std::string tasks;
    cs::ExperimentSpec spec;
    cs::ConfigOverrides o;
    std::string out = "out";

    app.add_option("--mode", mode, "predict_eval | simulate | compare")
        ->check(CLI::IsMember({"predict_eval", "simulate", "compare"}));
    app.add_option("--scenario", scenario, "1 | 2 | 3 | custom")->check(CLI::IsMember({"1", "2", "3", "custom"}));
    app.add_option("--strategy", strategy, "NOT | S_BEST | F_BEST")->check(CLI::IsMember({"NOT", "S_BEST", "F_BEST"}));
    app.add_option("--seed", spec.seed, "experiment seed");
    app.add_option("--seeds", spec.seeds, "seeds for --mode compare");
    app.add_option("--traces", traces, "trace CSV, or 'synthetic'");
    app.add_option("--tasks", tasks, "task CSV to replay instead of Poisson arrivals");
    app.add_option("--out", out, "output directory");
    app.add_option("--couriers-per-day,--couriers_per_day", spec.couriers_per_day, "synthetic traces per day")->check(CLI::PositiveNumber);
    app.add_option("--eval-trips,--eval_trips", spec.eval_trips, "synthetic trips for predict_eval")->check(CLI::PositiveNumber);

    app.add_option("--radius", o.radius, "operating radius (m)");
    app.add_option("--center-lat,--center_lat", o.center_lat);
    app.add_option("--center-lon,--center_lon", o.center_lon);
    app.add_option("--reward", o.reward);
    app.add_option("--deadline", o.deadline, "seconds after release");
    app.add_option("--penalty", o.penalty);
    app.add_option("--cost-per-km,--cost_per_km", o.cost_per_km);
    app.add_option("--waiting-cost-per-min,--waiting_cost_per_min", o.waiting_cost_per_min);
    app.add_option("--default-speed,--default_speed", o.default_speed, "m/s");
    app.add_option("--incident-speed,--incident_speed", o.incident_speed, "m/s");
    app.add_option("--prediction-error,--prediction_error", o.prediction_error, "seconds");
    app.add_option("--trigger-threshold,--trigger_threshold", o.trigger_threshold);
    app.add_option("--tasks-per-hour,--tasks_per_hour", o.tasks_per_hour, "custom scenario only");
    app.add_option("--incident-probability,--incident_probability_per_min", o.incident_probability_per_min, "per minute; custom scenario only");
    app.add_option("--days", o.days);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        spec.mode = mode == "predict_eval" ? cs::ExperimentMode::predict_eval
                    : mode == "compare"    ? cs::ExperimentMode::compare
                                           : cs::ExperimentMode::simulate;
        spec.scenario = *cs::parse_scenario(scenario);
        spec.sim = cs::build_config(spec.scenario, o, !tasks.empty());
        spec.sim.strategy = *cs::parse_strategy(strategy);
        spec.sim.seed = spec.seed;
        if (traces != "synthetic") spec.traces = traces;
        if (!tasks.empty()) spec.tasks = tasks;
        spec.out = out;
        return run(spec);
    } catch (const cs::UsageError& e) {
        std::cerr << "crowdship: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "crowdship: " << e.what() << '\n';
        return 1;
    }
}
