#include "containment/sim_continuous.hpp"

#include <cmath>

namespace containment {

namespace {

void require_runnable(const Scenario& scenario) {
    scenario.validate();
    if (!scenario.allow_unreachable) {
        const auto report = check_leader_reachability(scenario.topology);
        if (!report.all_reachable)
            throw std::runtime_error("some follower is unreachable from the leader set");
    }
}

// Flat state layout per follower: [chain m*p][accumulators (lm-m)*p][estimator m*p].
struct Layout {
    int m = 0, p = 0, lm = 0, followers = 0;
    bool with_estimator = false;

    int acc_count() const { return lm - m; }
    int per_follower() const { return (m + acc_count() + (with_estimator ? m : 0)) * p; }
    int total() const { return followers * per_follower(); }
    int chain(int i, int level) const { return i * per_follower() + level * p; }
    int acc(int i, int depth) const { return i * per_follower() + (m + depth) * p; }
    int estimator(int i, int level) const { return i * per_follower() + (acc_count() + m + level) * p; }
};

class ClosedLoop {
  public:
    ClosedLoop(const Scenario& scenario, const Eigen::RowVectorXd& gains,
               const EstimatorGainSynthesis* estimator)
        : scenario_(scenario), estimator_(estimator) {
        layout_.m = scenario.follower_order;
        layout_.p = scenario.dimension();
        layout_.lm = scenario.lifted_order();
        layout_.followers = scenario.topology.num_followers;
        layout_.with_estimator = estimator != nullptr;

        kappa_.resize(static_cast<size_t>(layout_.lm));
        for (int l = 0; l < layout_.lm; ++l) kappa_[static_cast<size_t>(l)] = gains(layout_.lm - 1 - l);

        const int max_deriv = layout_.m;  // leader derivative levels 0..m-1, plus m for estimator truth
        for (const auto& poly : scenario.leader_polynomials) {
            std::vector<VectorPolynomial> derivs;
            for (int d = 0; d <= max_deriv; ++d) derivs.push_back(poly_derivative(poly, d));
            leader_derivatives_.push_back(std::move(derivs));
        }
    }

    const Layout& layout() const { return layout_; }

    Vector initial_state() const {
        Vector state = Vector::Zero(layout_.total());
        for (int i = 0; i < layout_.followers; ++i) {
            for (int level = 0; level < layout_.m; ++level)
                state.segment(layout_.chain(i, level), layout_.p) =
                    scenario_.initial_followers[static_cast<size_t>(i)][static_cast<size_t>(level)];
            if (layout_.with_estimator) {
                if (!scenario_.initial_estimates.empty()) {
                    for (int level = 0; level < layout_.m; ++level)
                        state.segment(layout_.estimator(i, level), layout_.p) =
                            scenario_.initial_estimates[static_cast<size_t>(i)].segment(
                                level * layout_.p, layout_.p);
                } else if (scenario_.estimator_exact_init) {
                    for (int level = 0; level < layout_.m; ++level)
                        state.segment(layout_.estimator(i, level), layout_.p) =
                            state.segment(layout_.chain(i, level), layout_.p);
                }
            }
        }
        return state;
    }

    Vector leader_level(int leader, int level, double t) const {
        return poly_eval(leader_derivatives_[static_cast<size_t>(leader)][static_cast<size_t>(level)], t);
    }

    void derivative(double t, const Vector& state, Vector& dstate) const {
        const int m_agents = scenario_.topology.num_leaders;
        const int p = layout_.p;
        const auto& adjacency = scenario_.topology.adjacency;

        std::vector<Vector> leader_pos(static_cast<size_t>(m_agents));
        for (int j = 0; j < m_agents; ++j) leader_pos[static_cast<size_t>(j)] = leader_level(j, 0, t);

        dstate.setZero();
        for (int i = 0; i < layout_.followers; ++i) {
            const int agent = m_agents + i;
            const Vector pos_i = state.segment(layout_.chain(i, 0), p);

            Vector weighted_error = Vector::Zero(p);
            for (int j = 0; j < m_agents; ++j)
                weighted_error += adjacency(agent, j) * (leader_pos[static_cast<size_t>(j)] - pos_i);
            for (int j = 0; j < layout_.followers; ++j)
                weighted_error +=
                    adjacency(agent, m_agents + j) * (state.segment(layout_.chain(j, 0), p) - pos_i);

            Vector control = kappa_[static_cast<size_t>(layout_.m - 1)] * weighted_error;
            for (int l = layout_.m; l < layout_.lm; ++l)
                control += kappa_[static_cast<size_t>(l)] *
                           state.segment(layout_.acc(i, l - layout_.m), p);
            for (int l = 0; l <= layout_.m - 2; ++l) {
                const int order = layout_.m - l - 1;  // derivative order of this term
                Vector term = Vector::Zero(p);
                if (layout_.with_estimator) {
                    const Vector est_i = state.segment(layout_.estimator(i, order), p);
                    for (int j = 0; j < m_agents; ++j)
                        term += adjacency(agent, j) * (leader_level(j, order, t) - est_i);
                    for (int j = 0; j < layout_.followers; ++j)
                        term += adjacency(agent, m_agents + j) *
                                (state.segment(layout_.estimator(j, order), p) - est_i);
                } else {
                    const Vector deriv_i = state.segment(layout_.chain(i, order), p);
                    for (int j = 0; j < m_agents; ++j)
                        term += adjacency(agent, j) * (leader_level(j, order, t) - deriv_i);
                    for (int j = 0; j < layout_.followers; ++j)
                        term += adjacency(agent, m_agents + j) *
                                (state.segment(layout_.chain(j, order), p) - deriv_i);
                }
                control += kappa_[static_cast<size_t>(l)] * term;
            }

            for (int level = 0; level + 1 < layout_.m; ++level)
                dstate.segment(layout_.chain(i, level), p) = state.segment(layout_.chain(i, level + 1), p);
            Vector top = control;
            if (layout_.m == 1 && !scenario_.disturbances.empty())
                top += poly_eval(scenario_.disturbances[static_cast<size_t>(i)], t);
            dstate.segment(layout_.chain(i, layout_.m - 1), p) = top;

            if (layout_.acc_count() > 0) {
                dstate.segment(layout_.acc(i, 0), p) = weighted_error;
                for (int depth = 1; depth < layout_.acc_count(); ++depth)
                    dstate.segment(layout_.acc(i, depth), p) = state.segment(layout_.acc(i, depth - 1), p);
            }

            if (layout_.with_estimator) {
                const Vector measured_i = state.segment(layout_.estimator(i, 0), p);
                Vector innovation = Vector::Zero(p);
                for (int j = 0; j < m_agents; ++j)
                    innovation += adjacency(agent, j) *
                                  ((leader_pos[static_cast<size_t>(j)] - measured_i) -
                                   (leader_pos[static_cast<size_t>(j)] - pos_i));
                for (int j = 0; j < layout_.followers; ++j)
                    innovation += adjacency(agent, m_agents + j) *
                                  ((state.segment(layout_.estimator(j, 0), p) - measured_i) -
                                   (state.segment(layout_.chain(j, 0), p) - pos_i));
                for (int level = 0; level < layout_.m; ++level) {
                    Vector dz = Vector::Zero(p);
                    if (level + 1 < layout_.m)
                        dz = state.segment(layout_.estimator(i, level + 1), p);
                    else
                        dz = control;
                    dz += estimator_->k(level) * innovation;
                    dstate.segment(layout_.estimator(i, level), p) = dz;
                }
            }
        }
    }

    double estimator_error_norm(const Vector& state) const {
        if (!layout_.with_estimator) return 0.0;
        double acc = 0.0;
        for (int i = 0; i < layout_.followers; ++i)
            for (int level = 0; level < layout_.m; ++level)
                acc += (state.segment(layout_.estimator(i, level), layout_.p) -
                        state.segment(layout_.chain(i, level), layout_.p))
                           .squaredNorm();
        return std::sqrt(acc);
    }

    TraceSample sample_at(double t, const Vector& state) const {
        TraceSample sample;
        sample.time = t;
        for (int j = 0; j < scenario_.topology.num_leaders; ++j)
            sample.leader_positions.push_back(leader_level(j, 0, t));
        for (int i = 0; i < layout_.followers; ++i)
            sample.follower_positions.push_back(state.segment(layout_.chain(i, 0), layout_.p));
        sample.estimator_error_norm = estimator_error_norm(state);
        return sample;
    }

  private:
    const Scenario& scenario_;
    const EstimatorGainSynthesis* estimator_;
    Layout layout_;
    std::vector<double> kappa_;  // kappa_[l] multiplies the D^{m-l-1} term
    std::vector<std::vector<VectorPolynomial>> leader_derivatives_;
};

ContainmentTrace integrate(const Scenario& scenario, const ClosedLoop& loop, ExecMode mode) {
    const double dt = scenario.dt;
    const auto steps = static_cast<long>(std::llround(scenario.horizon / dt));
    const long record_every = std::max<long>(1, std::lround(scenario.output_interval / dt));

    Vector state = loop.initial_state();
    Vector k1(state.size()), k2(state.size()), k3(state.size()), k4(state.size());
    Vector scratch(state.size());

    ContainmentTrace trace;
    trace.num_leaders = scenario.topology.num_leaders;
    trace.num_followers = scenario.topology.num_followers;
    trace.dimension = scenario.dimension();
    trace.has_estimator = loop.layout().with_estimator;
    trace.samples.reserve(static_cast<size_t>(steps / record_every + 2));

    for (long step = 0; step <= steps; ++step) {
        const double t = step * dt;
        if (step % record_every == 0 || step == steps)
            trace.samples.push_back(loop.sample_at(t, state));
        if (step == steps) break;

        loop.derivative(t, state, k1);
        scratch = state + 0.5 * dt * k1;
        loop.derivative(t + 0.5 * dt, scratch, k2);
        scratch = state + 0.5 * dt * k2;
        loop.derivative(t + 0.5 * dt, scratch, k3);
        scratch = state + dt * k3;
        loop.derivative(t + dt, scratch, k4);
        state += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }

    annotate_hull_distances(trace, mode);
    return trace;
}

}  // namespace

ContainmentTrace run_pin_single_integrator(const Scenario& scenario,
                                           const Eigen::RowVectorXd& gains, ExecMode mode) {
    require_runnable(scenario);
    if (scenario.follower_order != 1)
        throw std::invalid_argument("single-integrator run needs follower_order = 1");
    ClosedLoop loop(scenario, gains, nullptr);
    return integrate(scenario, loop, mode);
}

ContainmentTrace run_high_order_full_info(const Scenario& scenario,
                                          const Eigen::RowVectorXd& gains, ExecMode mode) {
    require_runnable(scenario);
    if (!scenario.disturbances.empty())
        throw std::invalid_argument("high-order runs take no disturbance");
    ClosedLoop loop(scenario, gains, nullptr);
    return integrate(scenario, loop, mode);
}

ContainmentTrace run_high_order_estimator(const Scenario& scenario,
                                          const Eigen::RowVectorXd& gains,
                                          const EstimatorGainSynthesis& estimator, ExecMode mode) {
    require_runnable(scenario);
    if (!scenario.disturbances.empty())
        throw std::invalid_argument("high-order runs take no disturbance");
    if (estimator.mode != Domain::Continuous)
        throw std::invalid_argument("continuous run needs a continuous estimator gain");
    if (static_cast<int>(estimator.k.size()) != scenario.follower_order)
        throw std::invalid_argument("estimator gain length must match follower_order");
    ClosedLoop loop(scenario, gains, &estimator);
    return integrate(scenario, loop, mode);
}

std::vector<std::vector<Vector>> initial_derivative_levels(const Scenario& scenario,
                                                           const Eigen::RowVectorXd& gains,
                                                           int levels) {
    const int m_agents = scenario.topology.num_leaders;
    const int n_followers = scenario.topology.num_followers;
    const int p = scenario.dimension();
    const int m = scenario.follower_order;
    const int lm = scenario.lifted_order();
    const auto& adjacency = scenario.topology.adjacency;

    std::vector<double> kappa(static_cast<size_t>(lm));
    for (int l = 0; l < lm; ++l) kappa[static_cast<size_t>(l)] = gains(lm - 1 - l);

    // levels[j][agent]: exact j-th derivative at t = 0
    std::vector<std::vector<Vector>> x(static_cast<size_t>(levels));
    for (int j = 0; j < levels; ++j) {
        x[static_cast<size_t>(j)].assign(static_cast<size_t>(m_agents + n_followers), Vector::Zero(p));
        for (int leader = 0; leader < m_agents; ++leader)
            x[static_cast<size_t>(j)][static_cast<size_t>(leader)] =
                poly_eval(poly_derivative(scenario.leader_polynomials[static_cast<size_t>(leader)], j), 0.0);
        for (int i = 0; i < n_followers; ++i) {
            const int agent = m_agents + i;
            if (j < m) {
                x[static_cast<size_t>(j)][static_cast<size_t>(agent)] =
                    scenario.initial_followers[static_cast<size_t>(i)][static_cast<size_t>(j)];
                continue;
            }
            // D^j x = D^{j-m} u (+ disturbance derivatives when m = 1); the
            // control derivative needs weighted-error levels strictly below j,
            // so filling levels in increasing order keeps this well-founded.
            const int s = j - m;
            Vector value = Vector::Zero(p);
            for (int l = 0; l < lm; ++l) {
                const int order = s + m - l - 1;
                if (order < 0) continue;  // integral accumulators start at zero
                Vector weighted = Vector::Zero(p);
                for (int other = 0; other < m_agents + n_followers; ++other)
                    weighted += adjacency(agent, other) *
                                (x[static_cast<size_t>(order)][static_cast<size_t>(other)] -
                                 x[static_cast<size_t>(order)][static_cast<size_t>(agent)]);
                value += kappa[static_cast<size_t>(l)] * weighted;
            }
            if (m == 1 && !scenario.disturbances.empty())
                value += poly_eval(
                    poly_derivative(scenario.disturbances[static_cast<size_t>(i)], s), 0.0);
            x[static_cast<size_t>(j)][static_cast<size_t>(agent)] = value;
        }
    }
    return x;
}

LiftedTrace run_lifted_closed_loop(const Scenario& scenario, const Eigen::RowVectorXd& gains,
                                   ExecMode mode) {
    require_runnable(scenario);
    const int m_agents = scenario.topology.num_leaders;
    const int n_followers = scenario.topology.num_followers;
    const int p = scenario.dimension();
    const int lm = scenario.lifted_order();

    const auto blocks = build_laplacian(scenario.topology);
    const auto cert = certify_topology(blocks);

    const CompanionPlant plant = CompanionPlant::make(lm, Domain::Continuous);
    const Matrix chain_block = kron(Matrix::Identity(n_followers, n_followers), plant.a) -
                               kron(blocks.l2, Matrix(plant.b * gains));
    const Matrix closed = kron(chain_block, Matrix(Matrix::Identity(p, p)));

    const auto levels = initial_derivative_levels(scenario, gains, lm);
    auto stack_agent = [&](int agent) {
        Vector xi(lm * p);
        for (int j = 0; j < lm; ++j)
            xi.segment(j * p, p) = levels[static_cast<size_t>(j)][static_cast<size_t>(agent)];
        return xi;
    };

    const Matrix weight_lift = kron(cert.hull_weights, Matrix::Identity(lm * p, lm * p));

    Vector xi_leaders(m_agents * lm * p);
    for (int j = 0; j < m_agents; ++j) xi_leaders.segment(j * lm * p, lm * p) = stack_agent(j);
    Vector shifted(n_followers * lm * p);
    for (int i = 0; i < n_followers; ++i)
        shifted.segment(i * lm * p, lm * p) = stack_agent(m_agents + i);
    shifted -= weight_lift * xi_leaders;

    const double dt = scenario.dt;
    const auto steps = static_cast<long>(std::llround(scenario.horizon / dt));
    const long record_every = std::max<long>(1, std::lround(scenario.output_interval / dt));

    std::vector<std::vector<VectorPolynomial>> leader_chains;
    for (const auto& poly : scenario.leader_polynomials) {
        std::vector<VectorPolynomial> derivs;
        for (int d = 0; d < lm; ++d) derivs.push_back(poly_derivative(poly, d));
        leader_chains.push_back(std::move(derivs));
    }

    LiftedTrace lifted;
    lifted.trace.num_leaders = m_agents;
    lifted.trace.num_followers = n_followers;
    lifted.trace.dimension = p;

    Vector k1(shifted.size()), k2(shifted.size()), k3(shifted.size()), k4(shifted.size());
    for (long step = 0; step <= steps; ++step) {
        const double t = step * dt;
        if (step % record_every == 0 || step == steps) {
            Vector xi_l(m_agents * lm * p);
            for (int j = 0; j < m_agents; ++j)
                for (int d = 0; d < lm; ++d)
                    xi_l.segment(j * lm * p + d * p, p) =
                        poly_eval(leader_chains[static_cast<size_t>(j)][static_cast<size_t>(d)], t);
            const Vector xi_f = shifted + weight_lift * xi_l;

            TraceSample sample;
            sample.time = t;
            for (int j = 0; j < m_agents; ++j)
                sample.leader_positions.push_back(xi_l.segment(j * lm * p, p));
            for (int i = 0; i < n_followers; ++i)
                sample.follower_positions.push_back(xi_f.segment(i * lm * p, p));
            lifted.trace.samples.push_back(std::move(sample));
            lifted.times.push_back(t);
            lifted.state_norms.push_back(shifted.norm());
        }
        if (step == steps) break;

        k1 = closed * shifted;
        k2 = closed * (shifted + 0.5 * dt * k1);
        k3 = closed * (shifted + 0.5 * dt * k2);
        k4 = closed * (shifted + dt * k3);
        shifted += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }

    annotate_hull_distances(lifted.trace, mode);
    return lifted;
}

}  // namespace containment
