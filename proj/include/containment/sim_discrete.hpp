#pragma once

#include "containment/scenario.hpp"
#include "containment/synthesis.hpp"
#include "containment/trace.hpp"

namespace containment {

enum class DiscreteWeighting { Normalized, Uniform };
enum class InformationMode { Full, Estimator };

/// Single-integrator followers under the normalized (1/(1+d_i)) or uniform-μ
/// recursion. Exact integer-step update; disturbances and (for the noisy
/// entry points) measurement noise enter the same recursion.
ContainmentTrace run_discrete_pin(const Scenario& scenario, const Eigen::RowVectorXd& gains,
                                  DiscreteWeighting weighting, double uniform_weight = 0.0,
                                  ExecMode mode = ExecMode::Parallel);

/// Noisy single run: every measured relative state is corrupted per the
/// scenario's noise model before it enters the proportional term and the
/// running sums.
ContainmentTrace run_discrete_pin_noisy(const Scenario& scenario, const Eigen::RowVectorXd& gains,
                                        ExecMode mode = ExecMode::Parallel);

/// Order-m followers, full-information or estimator-based derivative terms.
ContainmentTrace run_discrete_high_order(const Scenario& scenario, const Eigen::RowVectorXd& gains,
                                         InformationMode info,
                                         const EstimatorGainSynthesis* estimator = nullptr,
                                         ExecMode mode = ExecMode::Parallel);

/// Differential-drive command recovery: the planar control of the linearized
/// center point maps to (v, omega) by rotation through the heading and the
/// wheel offset.
std::pair<double, double> recover_wheel_commands(const Vector& control, double heading,
                                                 double wheel_offset);

/// Inverse transform (the linearized control a given (v, omega) produces).
Vector wheel_commands_to_control(double v, double omega, double heading, double wheel_offset);

/// Full noisy robot pipeline: noisy recursion on the linearized center
/// points, heading integration under zero-order hold, per-step (v, omega)
/// recovery recorded in the trace.
ContainmentTrace run_robot_application(const Scenario& scenario, const Eigen::RowVectorXd& gains,
                                       ExecMode mode = ExecMode::Parallel);

// ============================================================================
// Monte-Carlo ensemble over independent noise realizations. Per-run streams
// are keyed by (seed, run index), so the parallel and serial paths produce
// identical reports; the parallel path fans runs out over OpenMP threads.
// ============================================================================
struct MonteCarloReport {
    int num_runs = 0;
    int steps = 0;
    std::vector<double> mean_hull_distance;    // per step, averaged over followers and runs
    std::vector<double> second_moment;         // per step, E[dist^2] averaged over followers
    std::vector<double> final_mean_point_distance;  // per follower: dist of the run-mean position
    std::vector<double> final_standard_error;       // per follower: SE of that mean position
};

MonteCarloReport run_monte_carlo(const Scenario& scenario, const Eigen::RowVectorXd& gains,
                                 int num_runs, ExecMode mode = ExecMode::Parallel);

MonteCarloReport run_monte_carlo_serial(const Scenario& scenario, const Eigen::RowVectorXd& gains,
                                        int num_runs);
MonteCarloReport run_monte_carlo_parallel(const Scenario& scenario, const Eigen::RowVectorXd& gains,
                                          int num_runs);

/// Exact forward-difference levels 0..levels-1 of every agent at k = 0 under
/// the normalized full-information recursion; the counterpart of the
/// continuous derivative-level construction, used to seed lifted-state checks.
std::vector<std::vector<Vector>> initial_difference_levels(const Scenario& scenario,
                                                           const Eigen::RowVectorXd& gains,
                                                           int levels);

}  // namespace containment
