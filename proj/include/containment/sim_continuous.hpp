#pragma once

#include "containment/scenario.hpp"
#include "containment/synthesis.hpp"
#include "containment/trace.hpp"

namespace containment {

// Fixed-step RK4 integration of the continuous closed loops. Leaders are
// never integrated: their positions and derivatives come straight from the
// trajectory polynomials at every stage time, so they carry no drift.

/// Single-integrator followers under the proportional-plus-iterated-integral
/// law (follower_order must be 1; polynomial disturbances supported).
ContainmentTrace run_pin_single_integrator(const Scenario& scenario,
                                           const Eigen::RowVectorXd& gains,
                                           ExecMode mode = ExecMode::Parallel);

/// Order-m followers with exact relative derivatives taken from the state
/// chains (and analytically from the leaders).
ContainmentTrace run_high_order_full_info(const Scenario& scenario,
                                          const Eigen::RowVectorXd& gains,
                                          ExecMode mode = ExecMode::Parallel);

/// Estimator-based variant: derivative terms come from exchanged estimator
/// states, the estimators integrate jointly with the plants.
ContainmentTrace run_high_order_estimator(const Scenario& scenario,
                                          const Eigen::RowVectorXd& gains,
                                          const EstimatorGainSynthesis& estimator,
                                          ExecMode mode = ExecMode::Parallel);

// The same closed loop written on the shifted stacked state (follower chains
// plus the hull-weight combination of the leader chains), integrated as one
// linear ODE. Serves as the cross-validation route for the agent-level runs.
struct LiftedTrace {
    std::vector<double> times;
    std::vector<double> state_norms;  // ||shifted stacked state||
    ContainmentTrace trace;           // positions reconstructed per sample
};

LiftedTrace run_lifted_closed_loop(const Scenario& scenario, const Eigen::RowVectorXd& gains,
                                   ExecMode mode = ExecMode::Parallel);

/// Exact derivative levels 0..levels-1 of every agent at t = 0, extending the
/// follower chains through the closed-loop recursion (control input
/// derivatives feed the levels at and above the follower order). Used to set
/// up the lifted initial state.
std::vector<std::vector<Vector>> initial_derivative_levels(const Scenario& scenario,
                                                           const Eigen::RowVectorXd& gains,
                                                           int levels);

}  // namespace containment
