#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "containment/signals.hpp"
#include "containment/topology.hpp"

namespace containment {

enum class ControllerFamily {
    ContinuousPIn,
    ContinuousHighOrder,
    ContinuousEstimator,
    DiscretePIn,
    DiscretePInUniform,
    DiscreteNoisy,
    DiscreteHighOrder,
    DiscreteEstimator,
    RobotApplication,
};

std::string to_string(ControllerFamily family);
ControllerFamily controller_from_string(const std::string& name);
bool is_discrete(ControllerFamily family);

// ============================================================================
// Full experiment description. Everything a run needs is here, so identical
// scenarios (including seed) always reproduce identical traces.
// ============================================================================
struct Scenario {
    std::string name;
    DirectedTopology topology;
    std::vector<VectorPolynomial> leader_polynomials;  // one per leader
    int follower_order = 1;    // m
    int trajectory_order = 0;  // n
    ControllerFamily controller = ControllerFamily::ContinuousPIn;

    std::vector<VectorPolynomial> disturbances;  // empty, or one per follower (m = 1 only)
    NoiseModel noise;                            // empty unless a noisy controller runs

    /// Row gain (κ_{l_m-1}, ..., κ_0); unset means synthesize from the topology.
    std::optional<Eigen::RowVectorXd> explicit_gains;

    double dt = 1e-3;          // continuous integration step
    double output_interval = 0.05;  // continuous trace cadence
    double horizon = 60.0;     // end time, or step count in the discrete domain
    std::uint64_t seed = 1;

    /// Initial follower chains: N entries of m stacked R^p vectors
    /// (position, then derivatives/differences). Integral accumulators always
    /// start at zero.
    std::vector<std::vector<Vector>> initial_followers;

    /// Estimator start: explicit stacked states win, otherwise the exact true
    /// chain when requested, otherwise zero.
    std::vector<Vector> initial_estimates;
    bool estimator_exact_init = false;

    double wheel_offset = 0.1;             // robot runs: wheel-axis offset of the linearization point
    std::vector<double> initial_headings;  // robot runs: per follower, radians

    bool allow_unreachable = false;

    int dimension() const;
    int lifted_order() const;  // l_m = max(m, n+1)
    int discrete_steps() const { return static_cast<int>(horizon + 0.5); }

    /// Structural validation; throws std::invalid_argument with the offending
    /// field named. Reachability is validated separately at run time so the
    /// override flag can apply.
    void validate() const;
};

Scenario load_scenario(const std::string& path);
Scenario parse_scenario_json(const std::string& text);
std::string save_scenario_json(const Scenario& scenario);
void save_scenario(const Scenario& scenario, const std::string& path);

/// Scenarios shipped with the toolkit, including the two derived from the
/// published tables.
std::vector<Scenario> builtin_scenarios();
Scenario builtin_scenario(const std::string& name);

/// Waypoint table behind the robot scenario: times 0,30,...,150 and the three
/// master tracks. Exposed for the interpolation checks.
void robot_waypoints(std::vector<double>& times, std::vector<std::vector<Vector>>& tracks);

/// Printed degree-5 coefficients for the three master tracks, a_0 first
/// (x, y per coefficient), as published.
std::vector<std::vector<Vector>> robot_published_coefficients();

}  // namespace containment
