#include "containment/sim_discrete.hpp"

#include <cmath>

#include "containment/geometry.hpp"

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

struct StepOptions {
    DiscreteWeighting weighting = DiscreteWeighting::Normalized;
    double uniform_weight = 0.0;
    bool with_noise = false;
    bool with_estimator = false;
    bool robot = false;
};

// Exact recursion on chains of forward differences plus running-sum
// accumulators. All reads happen against the step-k state; writes land in the
// staged copies, so the update is simultaneous across agents.
class DiscreteLoop {
  public:
    DiscreteLoop(const Scenario& scenario, const Eigen::RowVectorXd& gains,
                 const EstimatorGainSynthesis* estimator, StepOptions options)
        : scenario_(scenario), estimator_(estimator), options_(options) {
        m_ = scenario.follower_order;
        p_ = scenario.dimension();
        lm_ = scenario.lifted_order();
        followers_ = scenario.topology.num_followers;
        leaders_ = scenario.topology.num_leaders;

        kappa_.resize(static_cast<size_t>(lm_));
        for (int l = 0; l < lm_; ++l) kappa_[static_cast<size_t>(l)] = gains(lm_ - 1 - l);

        for (const auto& poly : scenario.leader_polynomials) {
            std::vector<VectorPolynomial> diffs;
            for (int d = 0; d < std::max(m_ + 1, 1); ++d)
                diffs.push_back(poly_forward_difference(poly, d));
            leader_differences_.push_back(std::move(diffs));
        }

        const Vector degrees = scenario.topology.adjacency.rowwise().sum();
        weights_.resize(static_cast<size_t>(followers_));
        for (int i = 0; i < followers_; ++i) {
            weights_[static_cast<size_t>(i)] = options.weighting == DiscreteWeighting::Normalized
                                                   ? 1.0 / (1.0 + degrees(leaders_ + i))
                                                   : options.uniform_weight;
        }

        chain_.assign(static_cast<size_t>(followers_), {});
        acc_.assign(static_cast<size_t>(followers_), {});
        est_.assign(static_cast<size_t>(followers_), {});
        for (int i = 0; i < followers_; ++i) {
            chain_[static_cast<size_t>(i)] = scenario.initial_followers[static_cast<size_t>(i)];
            acc_[static_cast<size_t>(i)].assign(static_cast<size_t>(lm_ - m_), Vector::Zero(p_));
            if (options.with_estimator) {
                auto& z = est_[static_cast<size_t>(i)];
                z.assign(static_cast<size_t>(m_), Vector::Zero(p_));
                if (!scenario.initial_estimates.empty()) {
                    for (int level = 0; level < m_; ++level)
                        z[static_cast<size_t>(level)] =
                            scenario.initial_estimates[static_cast<size_t>(i)].segment(level * p_, p_);
                } else if (scenario.estimator_exact_init) {
                    z = chain_[static_cast<size_t>(i)];
                }
            }
        }
        if (options.robot) {
            headings_ = scenario.initial_headings;
            if (headings_.empty()) headings_.assign(static_cast<size_t>(followers_), 0.0);
        }
    }

    Vector leader_level(int leader, int order, long k) const {
        return poly_eval(leader_differences_[static_cast<size_t>(leader)][static_cast<size_t>(order)],
                         static_cast<double>(k));
    }

    TraceSample sample_at(long k) const {
        TraceSample sample;
        sample.time = static_cast<double>(k);
        for (int j = 0; j < leaders_; ++j) sample.leader_positions.push_back(leader_level(j, 0, k));
        for (int i = 0; i < followers_; ++i)
            sample.follower_positions.push_back(chain_[static_cast<size_t>(i)][0]);
        if (options_.with_estimator) {
            double acc = 0.0;
            for (int i = 0; i < followers_; ++i)
                for (int level = 0; level < m_; ++level)
                    acc += (est_[static_cast<size_t>(i)][static_cast<size_t>(level)] -
                            chain_[static_cast<size_t>(i)][static_cast<size_t>(level)])
                               .squaredNorm();
            sample.estimator_error_norm = std::sqrt(acc);
        }
        return sample;
    }

    void step(long k, TraceSample* command_sink) {
        const auto& adjacency = scenario_.topology.adjacency;

        std::vector<Vector> leader_pos(static_cast<size_t>(leaders_));
        for (int j = 0; j < leaders_; ++j) leader_pos[static_cast<size_t>(j)] = leader_level(j, 0, k);

        std::vector<Vector> weighted_error(static_cast<size_t>(followers_), Vector::Zero(p_));
        std::vector<Vector> control(static_cast<size_t>(followers_), Vector::Zero(p_));
        std::vector<Vector> innovation(static_cast<size_t>(followers_), Vector::Zero(p_));

        for (int i = 0; i < followers_; ++i) {
            const int agent = leaders_ + i;
            const Vector& pos_i = chain_[static_cast<size_t>(i)][0];

            Vector w0 = Vector::Zero(p_);
            for (int j = 0; j < leaders_ + followers_; ++j) {
                const double a = adjacency(agent, j);
                if (a == 0.0) continue;
                const Vector& pos_j =
                    j < leaders_ ? leader_pos[static_cast<size_t>(j)] : chain_[static_cast<size_t>(j - leaders_)][0];
                Vector measured = pos_j - pos_i;
                if (options_.with_noise && !scenario_.noise.empty())
                    measured += sample_noise(scenario_.noise, j, agent, p_, static_cast<std::uint64_t>(k));
                w0 += a * measured;
            }
            weighted_error[static_cast<size_t>(i)] = w0;

            Vector u = kappa_[static_cast<size_t>(m_ - 1)] * w0;
            for (int l = m_; l < lm_; ++l)
                u += kappa_[static_cast<size_t>(l)] * acc_[static_cast<size_t>(i)][static_cast<size_t>(l - m_)];
            for (int l = 0; l <= m_ - 2; ++l) {
                const int order = m_ - l - 1;
                Vector term = Vector::Zero(p_);
                for (int j = 0; j < leaders_ + followers_; ++j) {
                    const double a = adjacency(agent, j);
                    if (a == 0.0) continue;
                    Vector level_j, level_i;
                    if (options_.with_estimator) {
                        level_j = j < leaders_
                                      ? leader_level(j, order, k)
                                      : est_[static_cast<size_t>(j - leaders_)][static_cast<size_t>(order)];
                        level_i = est_[static_cast<size_t>(i)][static_cast<size_t>(order)];
                    } else {
                        level_j = j < leaders_
                                      ? leader_level(j, order, k)
                                      : chain_[static_cast<size_t>(j - leaders_)][static_cast<size_t>(order)];
                        level_i = chain_[static_cast<size_t>(i)][static_cast<size_t>(order)];
                    }
                    term += a * (level_j - level_i);
                }
                u += kappa_[static_cast<size_t>(l)] * term;
            }
            u *= weights_[static_cast<size_t>(i)];
            control[static_cast<size_t>(i)] = u;

            if (options_.with_estimator) {
                Vector innov = Vector::Zero(p_);
                const Vector& measured_i = est_[static_cast<size_t>(i)][0];
                for (int j = 0; j < leaders_ + followers_; ++j) {
                    const double a = adjacency(agent, j);
                    if (a == 0.0) continue;
                    const Vector& pos_j = j < leaders_ ? leader_pos[static_cast<size_t>(j)]
                                                       : chain_[static_cast<size_t>(j - leaders_)][0];
                    const Vector& est_j =
                        j < leaders_ ? leader_pos[static_cast<size_t>(j)] : est_[static_cast<size_t>(j - leaders_)][0];
                    innov += a * ((est_j - measured_i) - (pos_j - pos_i));
                }
                innovation[static_cast<size_t>(i)] = weights_[static_cast<size_t>(i)] * innov;
            }

            if (options_.robot && command_sink) {
                const auto vw = recover_wheel_commands(u, headings_[static_cast<size_t>(i)],
                                                       scenario_.wheel_offset);
                command_sink->wheel_commands.push_back(vw);
            }
        }

        // simultaneous update
        for (int i = 0; i < followers_; ++i) {
            auto& chain = chain_[static_cast<size_t>(i)];
            Vector top_increment = control[static_cast<size_t>(i)];
            if (m_ == 1 && !scenario_.disturbances.empty())
                top_increment += poly_eval(scenario_.disturbances[static_cast<size_t>(i)],
                                           static_cast<double>(k));
            for (int level = 0; level + 1 < m_; ++level) chain[static_cast<size_t>(level)] += chain[static_cast<size_t>(level + 1)];
            chain[static_cast<size_t>(m_ - 1)] += top_increment;

            auto& acc = acc_[static_cast<size_t>(i)];
            for (int depth = static_cast<int>(acc.size()) - 1; depth >= 0; --depth)
                acc[static_cast<size_t>(depth)] +=
                    depth == 0 ? weighted_error[static_cast<size_t>(i)] : acc[static_cast<size_t>(depth - 1)];

            if (options_.with_estimator) {
                auto& z = est_[static_cast<size_t>(i)];
                std::vector<Vector> next(z.size());
                for (int level = 0; level < m_; ++level) {
                    Vector dz = level + 1 < m_ ? z[static_cast<size_t>(level + 1)]
                                               : control[static_cast<size_t>(i)];
                    dz += estimator_->k(level) * innovation[static_cast<size_t>(i)];
                    next[static_cast<size_t>(level)] = z[static_cast<size_t>(level)] + dz;
                }
                z = std::move(next);
            }

            if (options_.robot) {
                const auto& vw = command_sink->wheel_commands[static_cast<size_t>(i)];
                double heading = headings_[static_cast<size_t>(i)] + vw.second;  // T = 1 hold
                heading = std::remainder(heading, 2.0 * M_PI);
                if (heading <= -M_PI) heading += 2.0 * M_PI;
                headings_[static_cast<size_t>(i)] = heading;
            }
        }
    }

  private:
    const Scenario& scenario_;
    const EstimatorGainSynthesis* estimator_;
    StepOptions options_;
    int m_ = 0, p_ = 0, lm_ = 0, followers_ = 0, leaders_ = 0;
    std::vector<double> kappa_;
    std::vector<double> weights_;
    std::vector<std::vector<VectorPolynomial>> leader_differences_;
    std::vector<std::vector<Vector>> chain_;
    std::vector<std::vector<Vector>> acc_;
    std::vector<std::vector<Vector>> est_;
    std::vector<double> headings_;
};

ContainmentTrace run_loop(const Scenario& scenario, const Eigen::RowVectorXd& gains,
                          const EstimatorGainSynthesis* estimator, StepOptions options,
                          ExecMode mode) {
    DiscreteLoop loop(scenario, gains, estimator, options);
    const int steps = scenario.discrete_steps();

    ContainmentTrace trace;
    trace.num_leaders = scenario.topology.num_leaders;
    trace.num_followers = scenario.topology.num_followers;
    trace.dimension = scenario.dimension();
    trace.has_estimator = options.with_estimator;
    trace.has_wheel_commands = options.robot;
    trace.samples.reserve(static_cast<size_t>(steps) + 1);

    for (long k = 0; k < steps; ++k) {
        trace.samples.push_back(loop.sample_at(k));
        loop.step(k, &trace.samples.back());
    }
    trace.samples.push_back(loop.sample_at(steps));

    annotate_hull_distances(trace, mode);
    return trace;
}

}  // namespace

ContainmentTrace run_discrete_pin(const Scenario& scenario, const Eigen::RowVectorXd& gains,
                                  DiscreteWeighting weighting, double uniform_weight,
                                  ExecMode mode) {
    require_runnable(scenario);
    if (scenario.follower_order != 1)
        throw std::invalid_argument("single-integrator run needs follower_order = 1");
    if (weighting == DiscreteWeighting::Uniform &&
        !(uniform_weight > 0.0 && uniform_weight < 1.0))
        throw std::invalid_argument("uniform weight must lie in (0, 1)");
    StepOptions options;
    options.weighting = weighting;
    options.uniform_weight = uniform_weight;
    return run_loop(scenario, gains, nullptr, options, mode);
}

ContainmentTrace run_discrete_pin_noisy(const Scenario& scenario, const Eigen::RowVectorXd& gains,
                                        ExecMode mode) {
    require_runnable(scenario);
    if (scenario.follower_order != 1)
        throw std::invalid_argument("single-integrator run needs follower_order = 1");
    StepOptions options;
    options.with_noise = true;
    return run_loop(scenario, gains, nullptr, options, mode);
}

ContainmentTrace run_discrete_high_order(const Scenario& scenario, const Eigen::RowVectorXd& gains,
                                         InformationMode info,
                                         const EstimatorGainSynthesis* estimator, ExecMode mode) {
    require_runnable(scenario);
    StepOptions options;
    options.with_estimator = info == InformationMode::Estimator;
    if (options.with_estimator) {
        if (estimator == nullptr)
            throw std::invalid_argument("estimator mode needs an estimator gain");
        if (estimator->mode != Domain::Discrete)
            throw std::invalid_argument("discrete run needs a discrete estimator gain");
        if (static_cast<int>(estimator->k.size()) != scenario.follower_order)
            throw std::invalid_argument("estimator gain length must match follower_order");
    }
    return run_loop(scenario, gains, estimator, options, mode);
}

std::pair<double, double> recover_wheel_commands(const Vector& control, double heading,
                                                 double wheel_offset) {
    if (!(wheel_offset > 0.0)) throw std::invalid_argument("wheel offset must be positive");
    const double c = std::cos(heading), s = std::sin(heading);
    const double v = c * control(0) + s * control(1);
    const double omega = (-s * control(0) + c * control(1)) / wheel_offset;
    return {v, omega};
}

Vector wheel_commands_to_control(double v, double omega, double heading, double wheel_offset) {
    Vector u(2);
    const double c = std::cos(heading), s = std::sin(heading);
    u << v * c - wheel_offset * omega * s, v * s + wheel_offset * omega * c;
    return u;
}

ContainmentTrace run_robot_application(const Scenario& scenario, const Eigen::RowVectorXd& gains,
                                       ExecMode mode) {
    require_runnable(scenario);
    if (scenario.controller != ControllerFamily::RobotApplication)
        throw std::invalid_argument("run_robot_application needs the robot controller family");
    StepOptions options;
    options.with_noise = true;
    options.robot = true;
    return run_loop(scenario, gains, nullptr, options, mode);
}

// ----------------------------------------------------------------------------
// Monte Carlo
// ----------------------------------------------------------------------------

namespace {

struct RunOutcome {
    std::vector<std::vector<double>> hull_distances;  // [step][follower]
    std::vector<Vector> final_positions;              // [follower]
};

RunOutcome single_noisy_run(const Scenario& scenario, const Eigen::RowVectorXd& gains,
                            std::uint64_t run_index) {
    Scenario run_scenario = scenario;
    run_scenario.noise = scenario.noise.for_run(run_index);
    const ContainmentTrace trace =
        scenario.controller == ControllerFamily::RobotApplication
            ? run_robot_application(run_scenario, gains, ExecMode::Serial)
            : run_discrete_pin_noisy(run_scenario, gains, ExecMode::Serial);

    RunOutcome outcome;
    outcome.hull_distances.reserve(trace.samples.size());
    for (const auto& sample : trace.samples) outcome.hull_distances.push_back(sample.hull_distances);
    outcome.final_positions = trace.samples.back().follower_positions;
    return outcome;
}

MonteCarloReport reduce_outcomes(const Scenario& scenario, std::vector<RunOutcome>& outcomes) {
    MonteCarloReport report;
    report.num_runs = static_cast<int>(outcomes.size());
    report.steps = scenario.discrete_steps();
    const int followers = scenario.topology.num_followers;
    const int p = scenario.dimension();
    const size_t samples = outcomes.front().hull_distances.size();

    report.mean_hull_distance.assign(samples, 0.0);
    report.second_moment.assign(samples, 0.0);
    for (const auto& outcome : outcomes) {
        for (size_t k = 0; k < samples; ++k) {
            for (int i = 0; i < followers; ++i) {
                const double d = outcome.hull_distances[k][static_cast<size_t>(i)];
                report.mean_hull_distance[k] += d;
                report.second_moment[k] += d * d;
            }
        }
    }
    const double scale = 1.0 / (static_cast<double>(report.num_runs) * followers);
    for (size_t k = 0; k < samples; ++k) {
        report.mean_hull_distance[k] *= scale;
        report.second_moment[k] *= scale;
    }

    // hull distance of the run-averaged final position, per follower, with the
    // standard error of that mean position for the convergence-in-mean check
    std::vector<Vector> leaders_at_end;
    for (const auto& poly : scenario.leader_polynomials)
        leaders_at_end.push_back(
            poly_eval(poly, static_cast<double>(scenario.discrete_steps())));

    for (int i = 0; i < followers; ++i) {
        Vector mean = Vector::Zero(p);
        for (const auto& outcome : outcomes) mean += outcome.final_positions[static_cast<size_t>(i)];
        mean /= static_cast<double>(report.num_runs);

        double variance_sum = 0.0;
        for (const auto& outcome : outcomes)
            variance_sum += (outcome.final_positions[static_cast<size_t>(i)] - mean).squaredNorm();
        const double se =
            std::sqrt(variance_sum / (static_cast<double>(report.num_runs) *
                                      std::max(1, report.num_runs - 1)));

        report.final_mean_point_distance.push_back(hull_distance(mean, leaders_at_end).distance);
        report.final_standard_error.push_back(se);
    }
    return report;
}

}  // namespace

MonteCarloReport run_monte_carlo_serial(const Scenario& scenario, const Eigen::RowVectorXd& gains,
                                        int num_runs) {
    if (num_runs < 2) throw std::invalid_argument("ensemble statistics need at least two runs");
    require_runnable(scenario);
    std::vector<RunOutcome> outcomes(static_cast<size_t>(num_runs));
    for (int r = 0; r < num_runs; ++r)
        outcomes[static_cast<size_t>(r)] = single_noisy_run(scenario, gains, static_cast<std::uint64_t>(r));
    return reduce_outcomes(scenario, outcomes);
}

MonteCarloReport run_monte_carlo_parallel(const Scenario& scenario, const Eigen::RowVectorXd& gains,
                                          int num_runs) {
    if (num_runs < 2) throw std::invalid_argument("ensemble statistics need at least two runs");
    require_runnable(scenario);
    std::vector<RunOutcome> outcomes(static_cast<size_t>(num_runs));
#pragma omp parallel for schedule(dynamic)
    for (int r = 0; r < num_runs; ++r)
        outcomes[static_cast<size_t>(r)] = single_noisy_run(scenario, gains, static_cast<std::uint64_t>(r));
    return reduce_outcomes(scenario, outcomes);
}

MonteCarloReport run_monte_carlo(const Scenario& scenario, const Eigen::RowVectorXd& gains,
                                 int num_runs, ExecMode mode) {
    return mode == ExecMode::Serial ? run_monte_carlo_serial(scenario, gains, num_runs)
                                    : run_monte_carlo_parallel(scenario, gains, num_runs);
}

std::vector<std::vector<Vector>> initial_difference_levels(const Scenario& scenario,
                                                           const Eigen::RowVectorXd& gains,
                                                           int levels) {
    const int m_agents = scenario.topology.num_leaders;
    const int n_followers = scenario.topology.num_followers;
    const int p = scenario.dimension();
    const int m = scenario.follower_order;
    const int lm = scenario.lifted_order();
    const auto& adjacency = scenario.topology.adjacency;
    const Vector degrees = scenario.topology.adjacency.rowwise().sum();

    std::vector<double> kappa(static_cast<size_t>(lm));
    for (int l = 0; l < lm; ++l) kappa[static_cast<size_t>(l)] = gains(lm - 1 - l);

    std::vector<std::vector<Vector>> x(static_cast<size_t>(levels));
    for (int j = 0; j < levels; ++j) {
        x[static_cast<size_t>(j)].assign(static_cast<size_t>(m_agents + n_followers), Vector::Zero(p));
        for (int leader = 0; leader < m_agents; ++leader)
            x[static_cast<size_t>(j)][static_cast<size_t>(leader)] = poly_eval(
                poly_forward_difference(scenario.leader_polynomials[static_cast<size_t>(leader)], j), 0.0);
        for (int i = 0; i < n_followers; ++i) {
            const int agent = m_agents + i;
            if (j < m) {
                x[static_cast<size_t>(j)][static_cast<size_t>(agent)] =
                    scenario.initial_followers[static_cast<size_t>(i)][static_cast<size_t>(j)];
                continue;
            }
            const int s = j - m;
            Vector value = Vector::Zero(p);
            for (int l = 0; l < lm; ++l) {
                const int order = s + m - l - 1;
                if (order < 0) continue;  // running sums start empty
                Vector weighted = Vector::Zero(p);
                for (int other = 0; other < m_agents + n_followers; ++other)
                    weighted += adjacency(agent, other) *
                                (x[static_cast<size_t>(order)][static_cast<size_t>(other)] -
                                 x[static_cast<size_t>(order)][static_cast<size_t>(agent)]);
                value += kappa[static_cast<size_t>(l)] * weighted;
            }
            value /= 1.0 + degrees(agent);
            if (m == 1 && !scenario.disturbances.empty())
                value += poly_eval(
                    poly_forward_difference(scenario.disturbances[static_cast<size_t>(i)], s), 0.0);
            x[static_cast<size_t>(j)][static_cast<size_t>(agent)] = value;
        }
    }
    return x;
}

}  // namespace containment

