#include "containment/harness.hpp"

#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

namespace containment {

using ordered_json = nlohmann::ordered_json;

ScenarioSynthesis synthesize(const Scenario& scenario) {
    scenario.validate();
    const auto blocks = build_laplacian(scenario.topology);
    const auto cert = certify_topology(blocks);

    ScenarioSynthesis result;
    result.spectrum = cert.spectrum;
    result.hull_weights = cert.hull_weights;

    const int lm = scenario.lifted_order();
    const bool discrete = is_discrete(scenario.controller);
    const CompanionPlant plant =
        CompanionPlant::make(lm, discrete ? Domain::Discrete : Domain::Continuous);

    Matrix coupling;  // the matrix whose spectrum drives the per-block certification
    if (!discrete) {
        const double epsilon = epsilon_continuous(cert.spectrum);
        result.controller = continuous_gain(care_solve(plant), epsilon, plant);
        coupling = blocks.l2;
    } else if (scenario.controller == ControllerFamily::DiscretePInUniform) {
        const auto [mu, worst] = uniform_weight_search(cert.spectrum.l2_eigenvalues);
        result.uniform_weight = mu;
        const double epsilon = 0.5 * (worst + 1.0);
        result.controller = discrete_gain(modified_dare_solve(plant, epsilon), epsilon, plant);
        coupling = mu * blocks.l2;
    } else {
        const double epsilon = epsilon_discrete(cert.spectrum);
        result.controller = discrete_gain(modified_dare_solve(plant, epsilon), epsilon, plant);
        const Vector follower_degrees = blocks.in_degrees.tail(scenario.topology.num_followers);
        coupling = Matrix((follower_degrees.array() + 1.0).inverse().matrix().asDiagonal()) * blocks.l2;
    }

    result.gains_used = scenario.explicit_gains ? *scenario.explicit_gains : result.controller.k;
    result.closed_loop_margin = verify_closed_loop(coupling, plant, result.gains_used);
    result.controller.margin = verify_closed_loop(coupling, plant, result.controller.k);
    result.controller.certified = result.controller.margin > 0.0;

    if (scenario.controller == ControllerFamily::ContinuousEstimator ||
        scenario.controller == ControllerFamily::DiscreteEstimator) {
        if (!discrete) {
            result.estimator =
                estimator_gain_continuous(scenario.follower_order, epsilon_continuous(cert.spectrum));
            result.estimator_margin =
                verify_estimator_loop(cert.spectrum.l2_eigenvalues, *result.estimator);
        } else {
            result.estimator =
                estimator_gain_discrete(scenario.follower_order, epsilon_discrete(cert.spectrum));
            result.estimator_margin =
                verify_estimator_loop(cert.spectrum.normalized_eigenvalues, *result.estimator);
        }
    }
    return result;
}

namespace {

ContainmentTrace dispatch(const Scenario& scenario, const ScenarioSynthesis& synthesis,
                          const Eigen::RowVectorXd& gains, ExecMode mode) {
    switch (scenario.controller) {
        case ControllerFamily::ContinuousPIn:
            return run_pin_single_integrator(scenario, gains, mode);
        case ControllerFamily::ContinuousHighOrder:
            return run_high_order_full_info(scenario, gains, mode);
        case ControllerFamily::ContinuousEstimator:
            return run_high_order_estimator(scenario, gains, *synthesis.estimator, mode);
        case ControllerFamily::DiscretePIn:
            return run_discrete_pin(scenario, gains, DiscreteWeighting::Normalized, 0.0, mode);
        case ControllerFamily::DiscretePInUniform:
            return run_discrete_pin(scenario, gains, DiscreteWeighting::Uniform,
                                    synthesis.uniform_weight, mode);
        case ControllerFamily::DiscreteNoisy:
            return run_discrete_pin_noisy(scenario, gains, mode);
        case ControllerFamily::DiscreteHighOrder:
            return run_discrete_high_order(scenario, gains, InformationMode::Full, nullptr, mode);
        case ControllerFamily::DiscreteEstimator:
            return run_discrete_high_order(scenario, gains, InformationMode::Estimator,
                                           &*synthesis.estimator, mode);
        case ControllerFamily::RobotApplication:
            return run_robot_application(scenario, gains, mode);
    }
    throw std::logic_error("unhandled controller family");
}

ordered_json matrix_to_json(const Matrix& m) {
    ordered_json rows = ordered_json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        ordered_json row = ordered_json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(row);
    }
    return rows;
}

ordered_json row_to_json(const Eigen::RowVectorXd& v) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) row.push_back(v(i));
    return row;
}

}  // namespace

std::string report_to_json(const RunReport& report) {
    ordered_json j;
    j["schema_version"] = 1;
    j["scenario"] = report.scenario_name;
    j["controller"] = report.controller;
    j["seed"] = report.seed;

    ordered_json synth;
    synth["epsilon"] = report.synthesis.controller.epsilon;
    synth["p"] = matrix_to_json(report.synthesis.controller.p);
    synth["synthesized_gains"] = row_to_json(report.synthesis.controller.k);
    synth["gains_used"] = row_to_json(report.synthesis.gains_used);
    synth["riccati_residual"] = report.synthesis.controller.residual;
    synth["closed_loop_margin"] = report.synthesis.closed_loop_margin;
    if (report.synthesis.uniform_weight > 0.0)
        synth["uniform_weight"] = report.synthesis.uniform_weight;
    if (report.synthesis.estimator) {
        ordered_json est;
        est["epsilon"] = report.synthesis.estimator->epsilon;
        est["p"] = matrix_to_json(report.synthesis.estimator->p);
        ordered_json k = ordered_json::array();
        for (Eigen::Index i = 0; i < report.synthesis.estimator->k.size(); ++i)
            k.push_back(report.synthesis.estimator->k(i));
        est["k"] = k;
        est["margin"] = report.synthesis.estimator_margin;
        synth["estimator"] = est;
    }
    j["synthesis"] = synth;

    j["spectrum"] = {{"lambda_min_real", report.synthesis.spectrum.lambda_min_real},
                     {"gershgorin_margin", report.synthesis.spectrum.gershgorin_margin}};

    j["containment"] = {{"initial_error", report.initial_error},
                        {"final_error", report.final_error},
                        {"ratio", report.error_ratio},
                        {"decay_rate", report.decay.rate},
                        {"decay_amplitude", report.decay.amplitude}};
    j["estimator_error_final"] = report.final_estimator_error;

    j["checks"] = {{"closed_loop_certified", report.closed_loop_certified},
                   {"containment_achieved", report.containment_achieved},
                   {"decay_negative", report.decay_negative},
                   {"estimator_converged", report.estimator_converged}};
    if (!report.trace_path.empty()) j["trace_csv"] = report.trace_path;
    return j.dump(2);
}

RunReport run(const Scenario& scenario, const RunOptions& options, ContainmentTrace& trace_out) {
    Scenario effective = scenario;
    if (options.force_synthesized_gains) effective.explicit_gains.reset();

    RunReport report;
    report.scenario_name = effective.name;
    report.controller = to_string(effective.controller);
    report.seed = effective.seed;
    report.synthesis = synthesize(effective);

    trace_out = dispatch(effective, report.synthesis, report.synthesis.gains_used, options.mode);

    report.initial_error = trace_out.initial_error();
    report.final_error = trace_out.final_error();
    report.error_ratio =
        report.initial_error > 0.0 ? report.final_error / report.initial_error : 0.0;
    report.decay = fit_containment_decay(trace_out);
    report.closed_loop_certified = report.synthesis.closed_loop_margin > 0.0;

    const bool noisy = effective.controller == ControllerFamily::DiscreteNoisy ||
                       effective.controller == ControllerFamily::RobotApplication;
    if (noisy) {
        // the noise floor defeats ratio and log-slope checks; certify on the
        // tail average instead
        const size_t tail = std::min<size_t>(20, trace_out.samples.size());
        double tail_mean = 0.0;
        for (size_t i = trace_out.samples.size() - tail; i < trace_out.samples.size(); ++i)
            tail_mean += trace_out.samples[i].containment_error;
        tail_mean /= static_cast<double>(tail);
        report.containment_achieved =
            report.initial_error == 0.0 || tail_mean < 0.05 * report.initial_error;
        report.decay_negative = true;
    } else {
        report.containment_achieved = report.initial_error == 0.0 || report.error_ratio < 1e-2;
        report.decay_negative = report.initial_error == 0.0 || report.decay.rate > 1e-3;
    }
    if (trace_out.has_estimator) {
        report.final_estimator_error = trace_out.samples.back().estimator_error_norm;
        report.estimator_converged = report.final_estimator_error < 1e-6;
    }

    if (!options.output_dir.empty()) {
        std::filesystem::create_directories(options.output_dir);
        const auto base = std::filesystem::path(options.output_dir) /
                          (effective.name + "-seed" + std::to_string(effective.seed));
        report.trace_path = base.string() + ".csv";
        write_trace_csv(trace_out, report.trace_path);
        report.report_path = base.string() + ".json";
        std::ofstream out(report.report_path);
        out << report_to_json(report) << "\n";
    }
    return report;
}

RunReport run(const Scenario& scenario, const RunOptions& options) {
    ContainmentTrace trace;
    return run(scenario, options, trace);
}

std::vector<RunReport> sweep(const Scenario& scenario, int num_runs, const RunOptions& options) {
    if (num_runs < 1) throw std::invalid_argument("sweep needs at least one run");
    std::vector<RunReport> reports(static_cast<size_t>(num_runs));

    auto run_one = [&](int r) {
        Scenario variant = scenario;
        variant.seed = mix_seed(scenario.seed, static_cast<std::uint64_t>(r));
        variant.noise.seed = variant.seed;
        RunOptions per_run = options;
        per_run.mode = ExecMode::Serial;  // runs are the parallel grain
        reports[static_cast<size_t>(r)] = run(variant, per_run);
    };

    if (options.mode == ExecMode::Parallel) {
#pragma omp parallel for schedule(dynamic)
        for (int r = 0; r < num_runs; ++r) run_one(r);
    } else {
        for (int r = 0; r < num_runs; ++r) run_one(r);
    }
    return reports;
}

std::string monte_carlo_report_to_json(const MonteCarloReport& report) {
    ordered_json j;
    j["schema_version"] = 1;
    j["num_runs"] = report.num_runs;
    j["steps"] = report.steps;
    j["mean_hull_distance"] = report.mean_hull_distance;
    j["second_moment"] = report.second_moment;
    j["final_mean_point_distance"] = report.final_mean_point_distance;
    j["final_standard_error"] = report.final_standard_error;
    return j.dump(2);
}

}  // namespace containment
