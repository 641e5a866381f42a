#include "containment/scenario.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace containment {

using ordered_json = nlohmann::ordered_json;

std::string to_string(ControllerFamily family) {
    switch (family) {
        case ControllerFamily::ContinuousPIn: return "continuous-PIn";
        case ControllerFamily::ContinuousHighOrder: return "continuous-highorder";
        case ControllerFamily::ContinuousEstimator: return "continuous-estimator";
        case ControllerFamily::DiscretePIn: return "discrete-PIn";
        case ControllerFamily::DiscretePInUniform: return "discrete-PIn-uniform";
        case ControllerFamily::DiscreteNoisy: return "discrete-noisy";
        case ControllerFamily::DiscreteHighOrder: return "discrete-highorder";
        case ControllerFamily::DiscreteEstimator: return "discrete-estimator";
        case ControllerFamily::RobotApplication: return "robot-application";
    }
    throw std::logic_error("unknown controller family");
}

ControllerFamily controller_from_string(const std::string& name) {
    for (auto family :
         {ControllerFamily::ContinuousPIn, ControllerFamily::ContinuousHighOrder,
          ControllerFamily::ContinuousEstimator, ControllerFamily::DiscretePIn,
          ControllerFamily::DiscretePInUniform, ControllerFamily::DiscreteNoisy,
          ControllerFamily::DiscreteHighOrder, ControllerFamily::DiscreteEstimator,
          ControllerFamily::RobotApplication}) {
        if (to_string(family) == name) return family;
    }
    throw std::invalid_argument("unknown controller family: " + name);
}

bool is_discrete(ControllerFamily family) {
    switch (family) {
        case ControllerFamily::ContinuousPIn:
        case ControllerFamily::ContinuousHighOrder:
        case ControllerFamily::ContinuousEstimator: return false;
        default: return true;
    }
}

int Scenario::dimension() const {
    return leader_polynomials.empty() ? 0 : leader_polynomials.front().dimension;
}

int Scenario::lifted_order() const { return std::max(follower_order, trajectory_order + 1); }

namespace {

bool requires_single_integrator(ControllerFamily family) {
    switch (family) {
        case ControllerFamily::ContinuousPIn:
        case ControllerFamily::DiscretePIn:
        case ControllerFamily::DiscretePInUniform:
        case ControllerFamily::DiscreteNoisy:
        case ControllerFamily::RobotApplication: return true;
        default: return false;
    }
}

bool allows_noise(ControllerFamily family) {
    return family == ControllerFamily::DiscreteNoisy || family == ControllerFamily::RobotApplication;
}

}  // namespace

void Scenario::validate() const {
    topology.validate();
    const int m_leaders = topology.num_leaders;
    const int n_followers = topology.num_followers;

    if (static_cast<int>(leader_polynomials.size()) != m_leaders)
        throw std::invalid_argument("scenario needs one trajectory polynomial per leader");
    const int p = dimension();
    for (const auto& poly : leader_polynomials) {
        poly.validate();
        if (poly.dimension != p)
            throw std::invalid_argument("leader polynomials must share one dimension");
        if (poly.degree() > trajectory_order)
            throw std::invalid_argument("leader polynomial degree exceeds trajectory_order");
    }

    if (follower_order < 1) throw std::invalid_argument("follower_order must be >= 1");
    if (trajectory_order < 0) throw std::invalid_argument("trajectory_order must be >= 0");
    if (requires_single_integrator(controller) && follower_order != 1)
        throw std::invalid_argument(to_string(controller) + " requires follower_order = 1");

    if (!disturbances.empty()) {
        if (follower_order != 1)
            throw std::invalid_argument("polynomial disturbances apply to single-integrator followers only");
        if (static_cast<int>(disturbances.size()) != n_followers)
            throw std::invalid_argument("disturbances must list one polynomial per follower");
        for (const auto& poly : disturbances) {
            poly.validate();
            if (poly.dimension != p) throw std::invalid_argument("disturbance dimension mismatch");
        }
    }

    if (!noise.empty() && !allows_noise(controller))
        throw std::invalid_argument("measurement noise applies only to the noisy discrete controllers");
    for (const auto& rho : noise.intensities) {
        if (rho.rows() != p || rho.cols() != p)
            throw std::invalid_argument("noise intensity must be a p x p diagonal matrix");
        if ((rho.diagonal().array() < 0.0).any() || !rho.allFinite())
            throw std::invalid_argument("noise intensities must be finite and nonnegative");
    }

    if (explicit_gains && explicit_gains->size() != lifted_order())
        throw std::invalid_argument("explicit gain list must have length max(m, n+1)");

    if (is_discrete(controller)) {
        if (discrete_steps() < 1) throw std::invalid_argument("horizon must cover at least one step");
    } else {
        if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
        if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
        if (!(output_interval > 0.0)) throw std::invalid_argument("output_interval must be positive");
    }

    if (static_cast<int>(initial_followers.size()) != n_followers)
        throw std::invalid_argument("initial_followers must list one chain per follower");
    for (size_t i = 0; i < initial_followers.size(); ++i) {
        if (static_cast<int>(initial_followers[i].size()) != follower_order) {
            std::ostringstream msg;
            msg << "follower " << i + 1 << " initial chain must have " << follower_order
                << " entries";
            throw std::invalid_argument(msg.str());
        }
        for (const auto& v : initial_followers[i])
            if (v.size() != p) throw std::invalid_argument("initial follower state dimension mismatch");
    }

    if (!initial_estimates.empty()) {
        if (static_cast<int>(initial_estimates.size()) != n_followers)
            throw std::invalid_argument("initial_estimates must list one state per follower");
        for (const auto& z : initial_estimates)
            if (z.size() != follower_order * p)
                throw std::invalid_argument("initial estimator state must have m*p entries");
    }

    if (controller == ControllerFamily::RobotApplication) {
        if (p != 2) throw std::invalid_argument("the robot pipeline runs in the plane (p = 2)");
        if (!(wheel_offset > 0.0)) throw std::invalid_argument("wheel_offset must be positive");
        if (!initial_headings.empty() && static_cast<int>(initial_headings.size()) != n_followers)
            throw std::invalid_argument("initial_headings must list one angle per follower");
    }
}

// ----------------------------------------------------------------------------
// JSON serialization
// ----------------------------------------------------------------------------

namespace {

ordered_json polynomial_to_json(const VectorPolynomial& poly) {
    ordered_json coeffs = ordered_json::array();
    for (const auto& c : poly.coefficients) {
        ordered_json row = ordered_json::array();
        for (Eigen::Index i = 0; i < c.size(); ++i) row.push_back(c(i));
        coeffs.push_back(row);
    }
    return ordered_json{{"coeffs", coeffs}};
}

VectorPolynomial polynomial_from_json(const ordered_json& node) {
    if (!node.contains("coeffs") || !node["coeffs"].is_array() || node["coeffs"].empty())
        throw std::invalid_argument("polynomial needs a nonempty coeffs array");
    VectorPolynomial poly;
    for (const auto& row : node["coeffs"]) {
        Vector c(row.size());
        for (size_t i = 0; i < row.size(); ++i) c(static_cast<Eigen::Index>(i)) = row[i].get<double>();
        poly.coefficients.push_back(c);
    }
    poly.dimension = static_cast<int>(poly.coefficients.front().size());
    poly.validate();
    return poly;
}

}  // namespace

std::string save_scenario_json(const Scenario& scenario) {
    ordered_json j;
    j["schema_version"] = 1;
    j["name"] = scenario.name;

    ordered_json edges = ordered_json::array();
    const int total = scenario.topology.num_agents();
    for (int to = 0; to < total; ++to)
        for (int from = 0; from < total; ++from)
            if (scenario.topology.adjacency(to, from) != 0.0)
                edges.push_back({from + 1, to + 1, scenario.topology.adjacency(to, from)});
    j["topology"] = {{"leaders", scenario.topology.num_leaders},
                     {"followers", scenario.topology.num_followers},
                     {"edges", edges}};

    ordered_json leaders = ordered_json::array();
    for (const auto& poly : scenario.leader_polynomials) leaders.push_back(polynomial_to_json(poly));
    j["leaders"] = leaders;

    j["follower_order"] = scenario.follower_order;
    j["trajectory_order"] = scenario.trajectory_order;
    j["controller"] = to_string(scenario.controller);

    if (!scenario.disturbances.empty()) {
        ordered_json d = ordered_json::array();
        for (const auto& poly : scenario.disturbances) d.push_back(polynomial_to_json(poly));
        j["disturbances"] = d;
    }

    if (!scenario.noise.empty()) {
        ordered_json noise_edges = ordered_json::array();
        for (size_t e = 0; e < scenario.noise.edges.size(); ++e) {
            ordered_json rho = ordered_json::array();
            for (Eigen::Index i = 0; i < scenario.noise.intensities[e].rows(); ++i)
                rho.push_back(scenario.noise.intensities[e](i, i));
            noise_edges.push_back({{"edge",
                                    {scenario.noise.edges[e].first + 1, scenario.noise.edges[e].second + 1}},
                                   {"rho", rho}});
        }
        j["noise"] = {{"seed", scenario.noise.seed}, {"edges", noise_edges}};
    }

    if (scenario.explicit_gains) {
        ordered_json gains = ordered_json::array();
        for (Eigen::Index i = 0; i < scenario.explicit_gains->size(); ++i)
            gains.push_back((*scenario.explicit_gains)(i));
        j["gains"] = gains;
    } else {
        j["gains"] = "synthesized";
    }

    if (!is_discrete(scenario.controller)) {
        j["dt"] = scenario.dt;
        j["output_interval"] = scenario.output_interval;
    }
    j["horizon"] = scenario.horizon;
    j["seed"] = scenario.seed;

    ordered_json followers = ordered_json::array();
    for (const auto& chain : scenario.initial_followers) {
        ordered_json levels = ordered_json::array();
        for (const auto& v : chain) {
            ordered_json row = ordered_json::array();
            for (Eigen::Index i = 0; i < v.size(); ++i) row.push_back(v(i));
            levels.push_back(row);
        }
        followers.push_back({{"chain", levels}});
    }
    j["initial_followers"] = followers;

    if (!scenario.initial_estimates.empty()) {
        ordered_json est = ordered_json::array();
        for (const auto& z : scenario.initial_estimates) {
            ordered_json row = ordered_json::array();
            for (Eigen::Index i = 0; i < z.size(); ++i) row.push_back(z(i));
            est.push_back(row);
        }
        j["estimator_init"] = est;
    } else if (scenario.estimator_exact_init) {
        j["estimator_init"] = "true-state";
    }

    if (scenario.controller == ControllerFamily::RobotApplication) {
        j["wheel_offset"] = scenario.wheel_offset;
        if (!scenario.initial_headings.empty()) j["initial_headings"] = scenario.initial_headings;
    }
    if (scenario.allow_unreachable) j["allow_unreachable"] = true;

    return j.dump(2);
}

void save_scenario(const Scenario& scenario, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open scenario output file: " + path);
    out << save_scenario_json(scenario) << "\n";
}

Scenario parse_scenario_json(const std::string& text) {
    ordered_json j = ordered_json::parse(text);
    Scenario scenario;
    scenario.name = j.value("name", "unnamed");

    const auto& topo = j.at("topology");
    scenario.topology.num_leaders = topo.at("leaders").get<int>();
    scenario.topology.num_followers = topo.at("followers").get<int>();
    const int total = scenario.topology.num_agents();
    scenario.topology.adjacency = Matrix::Zero(total, total);
    size_t edge_index = 0;
    for (const auto& edge : topo.value("edges", ordered_json::array())) {
        ++edge_index;
        if (!edge.is_array() || edge.size() != 3) {
            std::ostringstream msg;
            msg << "edge " << edge_index << " must be [from, to, weight]";
            throw std::invalid_argument(msg.str());
        }
        const int from = edge[0].get<int>();
        const int to = edge[1].get<int>();
        const double weight = edge[2].get<double>();
        if (from < 1 || from > total || to < 1 || to > total) {
            std::ostringstream msg;
            msg << "edge " << edge_index << " [" << from << ", " << to << ", " << weight
                << "] references an agent outside 1.." << total;
            throw std::invalid_argument(msg.str());
        }
        scenario.topology.adjacency(to - 1, from - 1) = weight;
    }

    for (const auto& node : j.at("leaders")) scenario.leader_polynomials.push_back(polynomial_from_json(node));

    scenario.follower_order = j.value("follower_order", 1);
    scenario.trajectory_order = j.value("trajectory_order", 0);
    scenario.controller = controller_from_string(j.at("controller").get<std::string>());

    for (const auto& node : j.value("disturbances", ordered_json::array()))
        scenario.disturbances.push_back(polynomial_from_json(node));

    if (j.contains("noise")) {
        const auto& noise = j["noise"];
        scenario.noise.seed = noise.value("seed", scenario.seed);
        const int p = scenario.leader_polynomials.front().dimension;
        if (noise.contains("default_rho")) {
            Vector rho(p);
            for (int c = 0; c < p; ++c) rho(c) = noise["default_rho"][static_cast<size_t>(c)].get<double>();
            for (int to = 0; to < total; ++to)
                for (int from = 0; from < total; ++from)
                    if (scenario.topology.adjacency(to, from) != 0.0) {
                        scenario.noise.edges.emplace_back(from, to);
                        scenario.noise.intensities.push_back(Matrix(rho.asDiagonal()));
                    }
        }
        for (const auto& node : noise.value("edges", ordered_json::array())) {
            const int from = node.at("edge")[0].get<int>() - 1;
            const int to = node.at("edge")[1].get<int>() - 1;
            Vector rho(p);
            for (int c = 0; c < p; ++c) rho(c) = node.at("rho")[static_cast<size_t>(c)].get<double>();
            scenario.noise.edges.emplace_back(from, to);
            scenario.noise.intensities.push_back(Matrix(rho.asDiagonal()));
        }
    }

    if (j.contains("gains") && j["gains"].is_array()) {
        Eigen::RowVectorXd gains(j["gains"].size());
        for (size_t i = 0; i < j["gains"].size(); ++i)
            gains(static_cast<Eigen::Index>(i)) = j["gains"][i].get<double>();
        scenario.explicit_gains = gains;
    }

    scenario.dt = j.value("dt", 1e-3);
    scenario.output_interval = j.value("output_interval", 0.05);
    scenario.horizon = j.value("horizon", 60.0);
    scenario.seed = j.value("seed", std::uint64_t{1});

    for (const auto& node : j.value("initial_followers", ordered_json::array())) {
        std::vector<Vector> chain;
        for (const auto& row : node.at("chain")) {
            Vector v(row.size());
            for (size_t i = 0; i < row.size(); ++i) v(static_cast<Eigen::Index>(i)) = row[i].get<double>();
            chain.push_back(v);
        }
        scenario.initial_followers.push_back(std::move(chain));
    }

    if (j.contains("estimator_init")) {
        if (j["estimator_init"].is_string()) {
            scenario.estimator_exact_init = j["estimator_init"].get<std::string>() == "true-state";
        } else {
            for (const auto& row : j["estimator_init"]) {
                Vector z(row.size());
                for (size_t i = 0; i < row.size(); ++i) z(static_cast<Eigen::Index>(i)) = row[i].get<double>();
                scenario.initial_estimates.push_back(z);
            }
        }
    }

    scenario.wheel_offset = j.value("wheel_offset", 0.1);
    for (const auto& node : j.value("initial_headings", ordered_json::array()))
        scenario.initial_headings.push_back(node.get<double>());
    scenario.allow_unreachable = j.value("allow_unreachable", false);

    scenario.validate();
    return scenario;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scenario file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_scenario_json(buffer.str());
}

// ----------------------------------------------------------------------------
// Built-in scenarios
// ----------------------------------------------------------------------------

namespace {

DirectedTopology ring_topology(int leaders, int followers) {
    // every follower hears one leader, followers pass messages around a cycle
    DirectedTopology topology;
    topology.num_leaders = leaders;
    topology.num_followers = followers;
    const int total = leaders + followers;
    topology.adjacency = Matrix::Zero(total, total);
    for (int i = 0; i < followers; ++i) {
        topology.adjacency(leaders + i, i % leaders) = 1.0;  // leader -> follower
        topology.adjacency(leaders + (i + 1) % followers, leaders + i) = 1.0;
    }
    return topology;
}

DirectedTopology star_topology(int leaders, int followers) {
    // each follower hears exactly one leader; its limit point is that hull
    // vertex, which keeps boundary effects visible in the noisy statistics
    DirectedTopology topology;
    topology.num_leaders = leaders;
    topology.num_followers = followers;
    const int total = leaders + followers;
    topology.adjacency = Matrix::Zero(total, total);
    for (int i = 0; i < followers; ++i) topology.adjacency(leaders + i, i % leaders) = 1.0;
    return topology;
}

VectorPolynomial make_poly(std::initializer_list<std::pair<double, double>> coeffs) {
    VectorPolynomial poly;
    poly.dimension = 2;
    for (const auto& [x, y] : coeffs) {
        Vector c(2);
        c << x, y;
        poly.coefficients.push_back(c);
    }
    return poly;
}

std::vector<Vector> chain_at_rest(double x, double y, int order) {
    std::vector<Vector> chain;
    Vector pos(2);
    pos << x, y;
    chain.push_back(pos);
    for (int i = 1; i < order; ++i) chain.push_back(Vector::Zero(2));
    return chain;
}

// Published cubic trajectories of the eight-agent continuous example.
std::vector<VectorPolynomial> published_cubic_leaders() {
    return {
        make_poly({{0.0, 0.0}, {0.23, 3.43}, {0.0095, -0.75}, {0.0, 0.0005}}),
        make_poly({{2.0, 5.0}, {0.3, 3.43}, {0.0095, -0.075}, {0.0, 0.0005}}),
        make_poly({{-5.0, 10.0}, {0.2, 3.43}, {0.01, -0.075}, {0.0, 0.0005}}),
        make_poly({{-10.0, 0.0}, {0.2, 3.43}, {0.01, -0.075}, {0.0, 0.0005}}),
    };
}

std::vector<VectorPolynomial> cubic_test_leaders() {
    return {
        make_poly({{0.0, 10.0}, {0.4, 0.2}, {0.01, -0.005}, {1e-4, 2e-4}}),
        make_poly({{10.0, -5.0}, {0.5, 0.25}, {0.012, -0.004}, {1e-4, 2e-4}}),
        make_poly({{-10.0, -5.0}, {0.45, 0.18}, {0.008, -0.006}, {1e-4, 2e-4}}),
    };
}

Eigen::RowVectorXd row_gains(std::initializer_list<double> values) {
    Eigen::RowVectorXd k(static_cast<Eigen::Index>(values.size()));
    Eigen::Index i = 0;
    for (double v : values) k(i++) = v;
    return k;
}

}  // namespace

void robot_waypoints(std::vector<double>& times, std::vector<std::vector<Vector>>& tracks) {
    times = {0.0, 30.0, 60.0, 90.0, 120.0, 150.0};
    auto point = [](double x, double y) {
        Vector v(2);
        v << x, y;
        return v;
    };
    tracks = {
        {point(0, 25), point(110, 8), point(200, 50), point(300, 120), point(405, 155), point(475, 150)},
        {point(20, -5), point(130, -15), point(230, 35), point(335, 100), point(440, 130), point(510, 130)},
        {point(-10, -20), point(100, -35), point(210, 0), point(315, 70), point(410, 110), point(480, 110)},
    };
}

std::vector<std::vector<Vector>> robot_published_coefficients() {
    auto point = [](double x, double y) {
        Vector v(2);
        v << x, y;
        return v;
    };
    return {
        {point(0, 25), point(4.625, -1.028), point(-4.560e-2, -0.7963e-2), point(5.092e-4, 10.77e-4),
         point(1.800e-6, -10.91e-6), point(0, 3.086e-8)},
        {point(20.00, -5.000), point(4.100, -1.392), point(-1.944e-2, 2.801e-2), point(1.698e-4, 4.167e-4),
         point(0, -6.430e-6), point(-0.3429e-8, 2.058e-8)},
        {point(-10.00, -20.00), point(3.544, -0.3833), point(0.7407e-2, -3.796e-2),
         point(-1.389e-4, 15.05e-4), point(1.029e-6, -1.337e-6), point(-0.3429e-8, 3.601e-8)},
    };
}

std::vector<Scenario> builtin_scenarios() {
    std::vector<Scenario> all;

    {
        Scenario s;
        s.name = "paper-continuous-example";
        s.topology = ring_topology(4, 4);
        s.leader_polynomials = published_cubic_leaders();
        s.follower_order = 3;
        s.trajectory_order = 3;
        s.controller = ControllerFamily::ContinuousHighOrder;
        s.explicit_gains = row_gains({2.0, 6.1554, 8.4721, 6.1554});
        s.dt = 1e-3;
        s.output_interval = 0.05;
        s.horizon = 60.0;
        s.initial_followers = {chain_at_rest(5, -5, 3), chain_at_rest(12, 8, 3),
                               chain_at_rest(-16, 6, 3), chain_at_rest(-4, -12, 3)};
        all.push_back(std::move(s));
    }

    {
        Scenario s = all.front();
        s.name = "paper-continuous-estimator";
        s.controller = ControllerFamily::ContinuousEstimator;
        all.push_back(std::move(s));
    }

    {
        Scenario s;
        s.name = "continuous-pin-example";
        s.topology = ring_topology(4, 4);
        s.leader_polynomials = published_cubic_leaders();
        s.follower_order = 1;
        s.trajectory_order = 3;
        s.controller = ControllerFamily::ContinuousPIn;
        s.dt = 1e-3;
        s.output_interval = 0.05;
        s.horizon = 60.0;
        s.disturbances = {make_poly({{0.5, -0.3}, {0.2, 0.1}, {0.05, -0.02}}),
                          make_poly({{-0.4, 0.2}, {0.1, -0.15}, {0.03, 0.04}}),
                          make_poly({{0.3, 0.3}, {-0.1, 0.2}, {0.02, 0.02}}),
                          make_poly({{-0.2, -0.5}, {0.15, 0.1}, {-0.04, 0.03}})};
        s.initial_followers = {chain_at_rest(5, -5, 1), chain_at_rest(12, 8, 1),
                               chain_at_rest(-16, 6, 1), chain_at_rest(-4, -12, 1)};
        all.push_back(std::move(s));
    }

    {
        Scenario s;
        s.name = "discrete-pin-example";
        s.topology = ring_topology(3, 3);
        s.leader_polynomials = cubic_test_leaders();
        s.follower_order = 1;
        s.trajectory_order = 3;
        s.controller = ControllerFamily::DiscretePIn;
        s.horizon = 200.0;
        s.initial_followers = {chain_at_rest(20, 20, 1), chain_at_rest(-25, 10, 1),
                               chain_at_rest(5, -30, 1)};
        all.push_back(std::move(s));
    }

    {
        Scenario s = all.back();
        s.name = "discrete-uniform-example";
        s.controller = ControllerFamily::DiscretePInUniform;
        all.push_back(std::move(s));
    }

    {
        Scenario s;
        s.name = "discrete-noisy-example";
        s.topology = star_topology(3, 3);
        // each follower tracks a hull vertex and launches there, and the
        // leaders crawl: the run measures the stationary noise floor at the
        // boundary rather than the integral-windup transient
        s.leader_polynomials = cubic_test_leaders();
        for (auto& poly : s.leader_polynomials)
            for (size_t j = 1; j < poly.coefficients.size(); ++j) poly.coefficients[j] *= 0.2;
        s.follower_order = 1;
        s.trajectory_order = 3;
        s.controller = ControllerFamily::DiscreteNoisy;
        s.horizon = 200.0;
        s.seed = 1;
        s.initial_followers = {chain_at_rest(0, 10, 1), chain_at_rest(10, -5, 1),
                               chain_at_rest(-10, -5, 1)};
        s.noise.seed = 1;
        const int total = s.topology.num_agents();
        for (int to = 0; to < total; ++to)
            for (int from = 0; from < total; ++from)
                if (s.topology.adjacency(to, from) != 0.0) {
                    s.noise.edges.emplace_back(from, to);
                    s.noise.intensities.push_back(0.1 * Matrix::Identity(2, 2));
                }
        all.push_back(std::move(s));
    }

    {
        Scenario s;
        s.name = "discrete-highorder-example";
        s.topology = ring_topology(3, 3);
        s.leader_polynomials = cubic_test_leaders();
        s.follower_order = 3;
        s.trajectory_order = 3;
        s.controller = ControllerFamily::DiscreteHighOrder;
        s.horizon = 200.0;
        s.initial_followers = {chain_at_rest(20, 20, 3), chain_at_rest(-25, 10, 3),
                               chain_at_rest(5, -30, 3)};
        all.push_back(std::move(s));
    }

    {
        Scenario s = all.back();
        s.name = "discrete-estimator-example";
        s.controller = ControllerFamily::DiscreteEstimator;
        all.push_back(std::move(s));
    }

    {
        Scenario s;
        s.name = "paper-robot-application";
        s.topology = ring_topology(3, 3);
        std::vector<double> times;
        std::vector<std::vector<Vector>> tracks;
        robot_waypoints(times, tracks);
        for (const auto& track : tracks)
            s.leader_polynomials.push_back(interpolate_waypoints(times, track).polynomial);
        s.follower_order = 1;
        s.trajectory_order = 5;
        s.controller = ControllerFamily::RobotApplication;
        s.explicit_gains = row_gains({1.826e-5, 5.660e-4, 0.0085, 0.0786, 0.4769, 1.806});
        s.horizon = 150.0;
        s.seed = 7;
        s.initial_followers = {chain_at_rest(35, 10, 1), chain_at_rest(-25, 5, 1),
                               chain_at_rest(10, -35, 1)};
        s.disturbances.assign(
            3, make_poly({{1.0, 1.0}, {0.2, 0.2}, {-0.01, -0.01}, {0.001, 0.001}}));
        s.noise.seed = 7;
        const int total = s.topology.num_agents();
        for (int to = 0; to < total; ++to)
            for (int from = 0; from < total; ++from)
                if (s.topology.adjacency(to, from) != 0.0) {
                    s.noise.edges.emplace_back(from, to);
                    s.noise.intensities.push_back(0.1 * Matrix::Identity(2, 2));
                }
        s.wheel_offset = 0.1;
        s.initial_headings = {0.0, 0.0, 0.0};
        all.push_back(std::move(s));
    }

    return all;
}

Scenario builtin_scenario(const std::string& name) {
    for (auto& s : builtin_scenarios())
        if (s.name == name) return s;
    throw std::invalid_argument("unknown built-in scenario: " + name);
}

}  // namespace containment
