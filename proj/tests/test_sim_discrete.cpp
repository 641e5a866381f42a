#include <doctest.h>

#include <cmath>
#include <random>

#include "containment/harness.hpp"
#include "containment/sim_discrete.hpp"
#include "test_helpers.hpp"

using namespace containment;

namespace {

Vector vec2(double x, double y) {
    Vector v(2);
    v << x, y;
    return v;
}

Scenario scalar_discrete_scenario() {
    Scenario s;
    s.name = "scalar-halving";
    s.topology.num_leaders = 1;
    s.topology.num_followers = 1;
    s.topology.adjacency = Matrix::Zero(2, 2);
    s.topology.adjacency(1, 0) = 1.0;
    VectorPolynomial leader = VectorPolynomial::zero(1);
    leader.coefficients[0] = Vector::Ones(1) * 3.0;
    s.leader_polynomials = {leader};
    s.follower_order = 1;
    s.trajectory_order = 0;
    s.controller = ControllerFamily::DiscretePIn;
    Eigen::RowVectorXd k(1);
    k << 1.0;  // the scalar Riccati gain
    s.explicit_gains = k;
    s.horizon = 24.0;
    Vector x0(1);
    x0 << 11.0;
    s.initial_followers = {{x0}};
    return s;
}

bool traces_identical(const ContainmentTrace& a, const ContainmentTrace& b) {
    if (a.samples.size() != b.samples.size()) return false;
    for (size_t i = 0; i < a.samples.size(); ++i)
        for (size_t f = 0; f < a.samples[i].follower_positions.size(); ++f)
            if ((a.samples[i].follower_positions[f] - b.samples[i].follower_positions[f]).norm() !=
                0.0)
                return false;
    return true;
}

}  // namespace

TEST_CASE("normalized scalar recursion contracts by one half per step") {
    const Scenario s = scalar_discrete_scenario();
    const auto trace =
        run_discrete_pin(s, *s.explicit_gains, DiscreteWeighting::Normalized, 0.0, ExecMode::Serial);
    // x[k+1] = x + (xL - x)/2, so the gap to the leader halves each step
    for (size_t i = 0; i < trace.samples.size(); ++i) {
        const double expected = 3.0 + 8.0 * std::pow(0.5, static_cast<double>(i));
        CHECK(trace.samples[i].follower_positions[0](0) == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("followers on the hull with empty accumulators stay put") {
    Scenario s;
    s.name = "discrete-equilibrium";
    s.topology.num_leaders = 2;
    s.topology.num_followers = 1;
    s.topology.adjacency = Matrix::Zero(3, 3);
    s.topology.adjacency(2, 0) = 1.0;
    s.topology.adjacency(2, 1) = 1.0;
    VectorPolynomial left = VectorPolynomial::zero(2), right = VectorPolynomial::zero(2);
    right.coefficients[0] = vec2(6, 0);
    s.leader_polynomials = {left, right};
    s.follower_order = 1;
    s.trajectory_order = 2;
    s.controller = ControllerFamily::DiscretePIn;
    s.horizon = 40.0;
    s.initial_followers = {{vec2(3, 0)}};

    const auto synthesis = synthesize(s);
    const auto trace = run_discrete_pin(s, synthesis.gains_used, DiscreteWeighting::Normalized,
                                        0.0, ExecMode::Serial);
    for (const auto& sample : trace.samples) {
        CHECK((sample.follower_positions[0] - vec2(3, 0)).norm() == 0.0);
        CHECK(sample.containment_error < 1e-9);
    }
}

TEST_CASE("zero-intensity noise reproduces the plain recursion bit for bit") {
    Scenario s = builtin_scenario("discrete-noisy-example");
    s.horizon = 60.0;
    const auto synthesis = synthesize(s);

    Scenario silent = s;
    for (auto& rho : silent.noise.intensities) rho.setZero();
    const auto noisy_path = run_discrete_pin_noisy(silent, synthesis.gains_used, ExecMode::Serial);

    Scenario plain = s;
    plain.controller = ControllerFamily::DiscretePIn;
    plain.noise = NoiseModel{};
    const auto plain_path = run_discrete_pin(plain, synthesis.gains_used,
                                             DiscreteWeighting::Normalized, 0.0, ExecMode::Serial);
    CHECK(traces_identical(noisy_path, plain_path));
}

TEST_CASE("order-one high-order runs equal the single-integrator recursion") {
    Scenario s = builtin_scenario("discrete-pin-example");
    s.horizon = 80.0;
    const auto synthesis = synthesize(s);
    const auto pin = run_discrete_pin(s, synthesis.gains_used, DiscreteWeighting::Normalized, 0.0,
                                      ExecMode::Serial);
    Scenario high = s;
    high.controller = ControllerFamily::DiscreteHighOrder;
    const auto general =
        run_discrete_high_order(high, synthesis.gains_used, InformationMode::Full, nullptr,
                                ExecMode::Serial);
    CHECK(traces_identical(pin, general));
}

TEST_CASE("discrete estimator matches full information under exact initialization") {
    Scenario s = builtin_scenario("discrete-estimator-example");
    s.horizon = 60.0;
    s.estimator_exact_init = true;
    const auto synthesis = synthesize(s);
    const auto est = run_discrete_high_order(s, synthesis.gains_used, InformationMode::Estimator,
                                             &*synthesis.estimator, ExecMode::Serial);
    Scenario full = s;
    full.controller = ControllerFamily::DiscreteHighOrder;
    const auto reference = run_discrete_high_order(full, synthesis.gains_used,
                                                   InformationMode::Full, nullptr, ExecMode::Serial);
    for (size_t i = 0; i < est.samples.size(); ++i) {
        CHECK(est.samples[i].estimator_error_norm < 1e-12);
        for (size_t f = 0; f < 3; ++f)
            CHECK((est.samples[i].follower_positions[f] -
                   reference.samples[i].follower_positions[f])
                      .norm() < 1e-12);
    }
}

TEST_CASE("discrete estimator error decays geometrically from a cold start") {
    Scenario s = builtin_scenario("discrete-estimator-example");
    s.horizon = 220.0;
    const auto synthesis = synthesize(s);
    const auto trace = run_discrete_high_order(s, synthesis.gains_used, InformationMode::Estimator,
                                               &*synthesis.estimator, ExecMode::Serial);
    CHECK(trace.samples.front().estimator_error_norm > 1.0);
    CHECK(trace.samples.back().estimator_error_norm < 1e-6);
    const auto fit = fit_estimator_decay(trace);
    CHECK(fit.rate > 0.0);  // log-linear slope is negative
    CHECK(trace.final_error() < 1e-2 * trace.initial_error());
}

TEST_CASE("full-information runs satisfy the stacked shifted recursion") {
    Scenario s = builtin_scenario("discrete-highorder-example");
    s.horizon = 50.0;
    const auto synthesis = synthesize(s);
    const auto trace = run_discrete_high_order(s, synthesis.gains_used, InformationMode::Full,
                                               nullptr, ExecMode::Serial);

    const auto blocks = build_laplacian(s.topology);
    const auto cert = certify_topology(blocks);
    const int lm = s.lifted_order();
    const int p = s.dimension();
    const int followers = s.topology.num_followers;

    const auto plant = CompanionPlant::make(lm, Domain::Discrete);
    const Vector degrees = blocks.in_degrees.tail(followers);
    const Matrix normalized =
        Matrix((degrees.array() + 1.0).inverse().matrix().asDiagonal()) * blocks.l2;
    const Matrix chain_block =
        kron(Matrix::Identity(followers, followers), plant.a_hat) -
        kron(normalized, Matrix(plant.b * synthesis.gains_used));
    const Matrix recursion = kron(chain_block, Matrix(Matrix::Identity(p, p)));
    const Matrix weight_lift = kron(cert.hull_weights, Matrix::Identity(lm * p, lm * p));

    const auto levels = initial_difference_levels(s, synthesis.gains_used, lm);
    Vector xi_leaders(3 * lm * p), shifted(followers * lm * p);
    for (int j = 0; j < 3; ++j)
        for (int d = 0; d < lm; ++d)
            xi_leaders.segment(j * lm * p + d * p, p) = levels[static_cast<size_t>(d)][static_cast<size_t>(j)];
    for (int i = 0; i < followers; ++i)
        for (int d = 0; d < lm; ++d)
            shifted.segment(i * lm * p + d * p, p) =
                levels[static_cast<size_t>(d)][static_cast<size_t>(3 + i)];
    shifted -= weight_lift * xi_leaders;

    std::vector<std::vector<VectorPolynomial>> leader_chains;
    for (const auto& poly : s.leader_polynomials) {
        std::vector<VectorPolynomial> diffs;
        for (int d = 0; d < lm; ++d) diffs.push_back(poly_forward_difference(poly, d));
        leader_chains.push_back(std::move(diffs));
    }

    double worst = 0.0;
    for (long k = 0; k < 50; ++k) {
        Vector xi_l(3 * lm * p);
        for (int j = 0; j < 3; ++j)
            for (int d = 0; d < lm; ++d)
                xi_l.segment(j * lm * p + d * p, p) =
                    poly_eval(leader_chains[static_cast<size_t>(j)][static_cast<size_t>(d)],
                              static_cast<double>(k));
        const Vector xi_f = shifted + weight_lift * xi_l;
        for (int i = 0; i < followers; ++i)
            worst = std::max(
                worst, (xi_f.segment(i * lm * p, p) -
                        trace.samples[static_cast<size_t>(k)].follower_positions[static_cast<size_t>(i)])
                           .norm());
        shifted = recursion * shifted;
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("disturbance order at the trajectory order defeats the recursion") {
    Scenario s = builtin_scenario("discrete-pin-example");
    const auto synthesis = synthesize(s);

    VectorPolynomial below;  // degree n-1 = 2
    below.dimension = 2;
    below.coefficients = {vec2(0.5, -0.2), vec2(0.1, 0.1), vec2(0.02, -0.01)};
    s.disturbances = {below, below, below};
    const auto converged = run_discrete_pin(s, synthesis.gains_used, DiscreteWeighting::Normalized,
                                            0.0, ExecMode::Serial);
    CHECK(converged.final_error() < 1e-2 * converged.initial_error());

    VectorPolynomial at_order = below;  // degree n = 3
    at_order.coefficients.push_back(vec2(0.05, 0.05));
    s.disturbances = {at_order, at_order, at_order};
    const auto stuck = run_discrete_pin(s, synthesis.gains_used, DiscreteWeighting::Normalized,
                                        0.0, ExecMode::Serial);
    CHECK(stuck.final_error() > 0.1 * stuck.initial_error());
}

TEST_CASE("uniform weighting certifies and converges") {
    Scenario s = builtin_scenario("discrete-uniform-example");
    s.horizon = 150.0;
    const auto synthesis = synthesize(s);
    CHECK(synthesis.uniform_weight > 0.0);
    CHECK(synthesis.uniform_weight < 1.0);
    CHECK(synthesis.closed_loop_margin > 0.0);
    const auto trace = run_discrete_pin(s, synthesis.gains_used, DiscreteWeighting::Uniform,
                                        synthesis.uniform_weight, ExecMode::Serial);
    CHECK(trace.final_error() < 1e-2 * trace.initial_error());
}

TEST_CASE("wheel command recovery") {
    SUBCASE("heading zero drives straight") {
        const auto [v, omega] = recover_wheel_commands(vec2(1, 0), 0.0, 0.1);
        CHECK(v == doctest::Approx(1.0));
        CHECK(omega == doctest::Approx(0.0));
    }
    SUBCASE("rotated frame still drives straight") {
        const auto [v, omega] = recover_wheel_commands(vec2(0, 1), M_PI / 2.0, 0.1);
        CHECK(v == doctest::Approx(1.0));
        CHECK(omega == doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("round trip is the identity") {
        std::mt19937 rng(3);
        std::uniform_real_distribution<double> angle(-M_PI, M_PI);
        std::uniform_real_distribution<double> comp(-5.0, 5.0);
        for (int trial = 0; trial < 200; ++trial) {
            const double theta = angle(rng);
            const Vector u = vec2(comp(rng), comp(rng));
            const auto [v, omega] = recover_wheel_commands(u, theta, 0.1);
            const Vector back = wheel_commands_to_control(v, omega, theta, 0.1);
            CHECK((back - u).norm() < 1e-12);
        }
    }
}

TEST_CASE("robot pipeline starts at the published waypoints and records commands") {
    Scenario s = builtin_scenario("paper-robot-application");
    s.horizon = 20.0;
    const auto trace = run_robot_application(s, *s.explicit_gains, ExecMode::Serial);

    CHECK((trace.samples[0].leader_positions[0] - vec2(0, 25)).norm() < 1e-9);
    CHECK((trace.samples[0].leader_positions[1] - vec2(20, -5)).norm() < 1e-9);
    CHECK((trace.samples[0].leader_positions[2] - vec2(-10, -20)).norm() < 1e-9);

    CHECK(trace.has_wheel_commands);
    CHECK(trace.samples[0].wheel_commands.size() == 3);

    const auto again = run_robot_application(s, *s.explicit_gains, ExecMode::Serial);
    CHECK(traces_identical(trace, again));
}

TEST_CASE("monte carlo reports are identical in serial and parallel") {
    Scenario s = builtin_scenario("discrete-noisy-example");
    s.horizon = 40.0;
    const auto synthesis = synthesize(s);
    const auto serial = run_monte_carlo_serial(s, synthesis.gains_used, 16);
    const auto parallel = run_monte_carlo_parallel(s, synthesis.gains_used, 16);

    REQUIRE(serial.mean_hull_distance.size() == parallel.mean_hull_distance.size());
    for (size_t k = 0; k < serial.mean_hull_distance.size(); ++k) {
        CHECK(serial.mean_hull_distance[k] == parallel.mean_hull_distance[k]);
        CHECK(serial.second_moment[k] == parallel.second_moment[k]);
    }
    for (size_t f = 0; f < serial.final_mean_point_distance.size(); ++f) {
        CHECK(serial.final_mean_point_distance[f] == parallel.final_mean_point_distance[f]);
        CHECK(serial.final_standard_error[f] == parallel.final_standard_error[f]);
    }

    CHECK_THROWS_AS(run_monte_carlo(s, synthesis.gains_used, 1), std::invalid_argument);
}
