#pragma once

#include <optional>
#include <string>

#include "containment/scenario.hpp"
#include "containment/sim_continuous.hpp"
#include "containment/sim_discrete.hpp"
#include "containment/synthesis.hpp"
#include "containment/trace.hpp"

namespace containment {

// Everything the gain pipeline produced for one scenario: the Riccati
// solution and synthesized row gain, the gain the run actually uses
// (explicit gains win when the scenario carries them), and the certification
// margins on the scenario's own topology.
struct ScenarioSynthesis {
    SpectrumReport spectrum;
    Matrix hull_weights;
    GainSynthesis controller;             // synthesized from the Riccati solution
    Eigen::RowVectorXd gains_used;        // explicit or synthesized
    double closed_loop_margin = 0.0;      // with gains_used
    double uniform_weight = 0.0;          // uniform-weight family only
    std::optional<EstimatorGainSynthesis> estimator;
    double estimator_margin = 0.0;
};

ScenarioSynthesis synthesize(const Scenario& scenario);

struct RunOptions {
    std::string output_dir;  // empty: nothing written
    ExecMode mode = ExecMode::Parallel;
    bool force_synthesized_gains = false;
};

struct RunReport {
    std::string scenario_name;
    std::string controller;
    std::uint64_t seed = 0;
    ScenarioSynthesis synthesis;
    double initial_error = 0.0;
    double final_error = 0.0;
    double error_ratio = 0.0;
    DecayFit decay;
    double final_estimator_error = 0.0;
    bool closed_loop_certified = false;
    bool containment_achieved = false;  // final error under 1% of the initial error
    bool decay_negative = false;        // fitted log-slope below -1e-3
    bool estimator_converged = true;    // vacuously true without an estimator
    std::string trace_path;
    std::string report_path;

    bool all_checks_pass() const {
        return closed_loop_certified && containment_achieved && decay_negative &&
               estimator_converged;
    }
};

std::string report_to_json(const RunReport& report);

/// Dispatches the scenario to its simulator, computes the report, and (when
/// an output directory is set) writes the CSV trace and JSON report.
RunReport run(const Scenario& scenario, const RunOptions& options = {});
RunReport run(const Scenario& scenario, const RunOptions& options, ContainmentTrace& trace_out);

/// Independent repetitions with per-run seeds derived from the scenario seed.
/// Deterministic regardless of execution mode; parallel mode fans runs out
/// over OpenMP threads.
std::vector<RunReport> sweep(const Scenario& scenario, int num_runs,
                             const RunOptions& options = {});

std::string monte_carlo_report_to_json(const MonteCarloReport& report);

}  // namespace containment
