// Command-line front end: synthesize gains, run and certify scenarios, fan
// out Monte-Carlo sweeps, and list the shipped scenario set.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <nlohmann/json.hpp>

#include "containment/harness.hpp"

using namespace containment;
using ordered_json = nlohmann::ordered_json;

namespace {

struct CommonArgs {
    std::string scenario;
    std::string out_dir;
    std::string gains = "scenario";  // scenario | synthesized
    double dt = 0.0;
    double horizon = 0.0;
    std::uint64_t seed = 0;
    bool seed_set = false;
    bool serial = false;
};

Scenario resolve_scenario(const CommonArgs& args) {
    Scenario scenario;
    if (std::filesystem::exists(args.scenario)) {
        scenario = load_scenario(args.scenario);
    } else {
        scenario = builtin_scenario(args.scenario);
    }
    if (args.dt > 0.0) scenario.dt = args.dt;
    if (args.horizon > 0.0) scenario.horizon = args.horizon;
    if (args.seed_set) {
        scenario.seed = args.seed;
        scenario.noise.seed = args.seed;
    }
    return scenario;
}

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("scenario", args.scenario, "built-in scenario name or path to a scenario JSON")
        ->required();
    cmd->add_option("--out", args.out_dir, "directory for trace CSVs and JSON reports");
    cmd->add_option("--gains", args.gains, "gain source: scenario (default) or synthesized")
        ->check(CLI::IsMember({"scenario", "synthesized"}));
    cmd->add_option("--dt", args.dt, "override the integration step (continuous runs)");
    cmd->add_option("--horizon", args.horizon, "override the horizon (time or step count)");
    cmd->add_option("--seed", args.seed, "override the scenario seed")
        ->each([&args](const std::string&) { args.seed_set = true; });
    cmd->add_flag("--serial", args.serial, "disable the parallel kernels");
}

ordered_json row_json(const Eigen::RowVectorXd& v) {
    ordered_json out = ordered_json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

ordered_json matrix_json(const Matrix& m) {
    ordered_json rows = ordered_json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        ordered_json row = ordered_json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(i, c));
        rows.push_back(row);
    }
    return rows;
}

ordered_json synthesis_json(const ScenarioSynthesis& synthesis) {
    ordered_json j;
    j["epsilon"] = synthesis.controller.epsilon;
    j["p"] = matrix_json(synthesis.controller.p);
    j["k"] = row_json(synthesis.controller.k);
    j["gains_used"] = row_json(synthesis.gains_used);
    j["riccati_residual"] = synthesis.controller.residual;
    j["closed_loop_margin"] = synthesis.closed_loop_margin;
    j["lambda_min_real"] = synthesis.spectrum.lambda_min_real;
    j["gershgorin_margin"] = synthesis.spectrum.gershgorin_margin;
    if (synthesis.uniform_weight > 0.0) j["uniform_weight"] = synthesis.uniform_weight;
    if (synthesis.estimator) {
        ordered_json est;
        est["epsilon"] = synthesis.estimator->epsilon;
        ordered_json ke = ordered_json::array();
        for (Eigen::Index i = 0; i < synthesis.estimator->k.size(); ++i)
            ke.push_back(synthesis.estimator->k(i));
        est["k"] = ke;
        est["margin"] = synthesis.estimator_margin;
        j["estimator"] = est;
    }
    return j;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "containment-control toolkit: gain synthesis, closed-loop simulation, certification"};
    app.require_subcommand(1);

    CommonArgs synth_args, run_args, sweep_args, verify_args;
    int sweep_runs = 8;

    auto* synth_cmd = app.add_subcommand("synth", "synthesize and certify gains for a scenario");
    add_common(synth_cmd, synth_args);

    auto* run_cmd = app.add_subcommand("run", "simulate a scenario and report certifications");
    add_common(run_cmd, run_args);

    auto* sweep_cmd = app.add_subcommand(
        "sweep", "independent seeded repetitions; noisy scenarios also get ensemble statistics");
    add_common(sweep_cmd, sweep_args);
    sweep_cmd->add_option("--runs", sweep_runs, "number of repetitions")->check(CLI::PositiveNumber);

    auto* verify_cmd = app.add_subcommand("verify", "topology and spectrum certification only");
    add_common(verify_cmd, verify_args);

    auto* list_cmd = app.add_subcommand("list-scenarios", "print the built-in scenario names");

    CLI11_PARSE(app, argc, argv);

    try {
        if (list_cmd->parsed()) {
            for (const auto& scenario : builtin_scenarios())
                std::cout << scenario.name << "  [" << to_string(scenario.controller) << "]\n";
            return 0;
        }

        if (synth_cmd->parsed()) {
            Scenario scenario = resolve_scenario(synth_args);
            if (synth_args.gains == "synthesized") scenario.explicit_gains.reset();
            const auto synthesis = synthesize(scenario);
            std::cout << synthesis_json(synthesis).dump(2) << "\n";
            return synthesis.closed_loop_margin > 0.0 ? 0 : 1;
        }

        if (verify_cmd->parsed()) {
            const Scenario scenario = resolve_scenario(verify_args);
            const auto reachability = check_leader_reachability(scenario.topology);
            ordered_json j;
            j["all_followers_reachable"] = reachability.all_reachable;
            ordered_json unreachable = ordered_json::array();
            for (int agent : reachability.unreachable_followers) unreachable.push_back(agent + 1);
            j["unreachable_followers"] = unreachable;
            if (reachability.all_reachable) {
                const auto cert = certify_topology(build_laplacian(scenario.topology));
                j["lambda_min_real"] = cert.spectrum.lambda_min_real;
                j["gershgorin_margin"] = cert.spectrum.gershgorin_margin;
                j["hull_weights"] = matrix_json(cert.hull_weights);
            }
            std::cout << j.dump(2) << "\n";
            return reachability.all_reachable ? 0 : 1;
        }

        if (run_cmd->parsed()) {
            const Scenario scenario = resolve_scenario(run_args);
            RunOptions options;
            options.output_dir = run_args.out_dir;
            options.mode = run_args.serial ? ExecMode::Serial : ExecMode::Parallel;
            options.force_synthesized_gains = run_args.gains == "synthesized";
            const RunReport report = run(scenario, options);
            std::cout << report_to_json(report) << "\n";
            return report.all_checks_pass() ? 0 : 1;
        }

        if (sweep_cmd->parsed()) {
            const Scenario scenario = resolve_scenario(sweep_args);
            RunOptions options;
            options.output_dir = sweep_args.out_dir;
            options.mode = sweep_args.serial ? ExecMode::Serial : ExecMode::Parallel;
            options.force_synthesized_gains = sweep_args.gains == "synthesized";

            const auto reports = sweep(scenario, sweep_runs, options);
            bool all_pass = true;
            ordered_json j = ordered_json::array();
            for (const auto& report : reports) {
                all_pass = all_pass && report.all_checks_pass();
                j.push_back({{"seed", report.seed},
                             {"initial_error", report.initial_error},
                             {"final_error", report.final_error},
                             {"ratio", report.error_ratio},
                             {"all_checks_pass", report.all_checks_pass()}});
            }
            std::cout << j.dump(2) << "\n";

            const bool noisy = scenario.controller == ControllerFamily::DiscreteNoisy ||
                               scenario.controller == ControllerFamily::RobotApplication;
            if (noisy && sweep_runs >= 2) {
                Scenario mc_scenario = scenario;
                if (options.force_synthesized_gains) mc_scenario.explicit_gains.reset();
                const auto synthesis = synthesize(mc_scenario);
                const auto ensemble =
                    run_monte_carlo(mc_scenario, synthesis.gains_used, sweep_runs, options.mode);
                const std::string ensemble_json = monte_carlo_report_to_json(ensemble);
                if (!sweep_args.out_dir.empty()) {
                    std::filesystem::create_directories(sweep_args.out_dir);
                    std::ofstream out(std::filesystem::path(sweep_args.out_dir) /
                                      (scenario.name + "-ensemble.json"));
                    out << ensemble_json << "\n";
                } else {
                    std::cout << ensemble_json << "\n";
                }
            }
            return all_pass ? 0 : 1;
        }
    } catch (const std::exception& error) {
        std::cerr << "error: " << error.what() << "\n";
        return 2;
    }
    return 0;
}
