#include "containment/synthesis.hpp"

#include <cmath>

#include "containment/signals.hpp"

namespace containment {

CompanionPlant CompanionPlant::make(int order, Domain mode) {
    if (order < 1) throw SynthesisError("plant order must be positive");
    CompanionPlant plant;
    plant.order = order;
    plant.mode = mode;
    plant.a = Matrix::Zero(order, order);
    for (int i = 0; i + 1 < order; ++i) plant.a(i, i + 1) = 1.0;
    plant.a_hat = Matrix::Identity(order, order) + plant.a;
    plant.b = Vector::Zero(order);
    plant.b(order - 1) = 1.0;
    return plant;
}

namespace {

double care_residual(const Matrix& a, const Vector& b, const Matrix& p) {
    const Matrix pb = p * b;
    return (a.transpose() * p + p * a + Matrix::Identity(a.rows(), a.cols()) - pb * pb.transpose())
        .norm();
}

// Solve Acl' X + X Acl = -Q through the q^2 x q^2 vectorized system.
Matrix solve_lyapunov(const Matrix& a_cl, const Matrix& q) {
    const Eigen::Index n = a_cl.rows();
    const Matrix eye = Matrix::Identity(n, n);
    Matrix system = kron(eye, a_cl.transpose()) + kron(a_cl.transpose(), eye);
    Vector rhs = Eigen::Map<const Vector>(q.data(), n * n);
    Vector solution = system.fullPivLu().solve(-rhs);
    Matrix x = Eigen::Map<const Matrix>(solution.data(), n, n);
    return 0.5 * (x + x.transpose());  // symmetrize against roundoff
}

}  // namespace

Matrix care_solve(const CompanionPlant& plant) {
    if (plant.mode != Domain::Continuous)
        throw SynthesisError("care_solve expects a continuous-mode plant");
    const int q = plant.order;
    const Matrix eye = Matrix::Identity(q, q);

    // all poles at -1: closed-loop characteristic polynomial (s + 1)^q
    Eigen::RowVectorXd gain(q);
    for (int j = 0; j < q; ++j) gain(j) = binomial_coefficient(q, j);

    Matrix p = Matrix::Zero(q, q);
    double best_residual = std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < 60; ++iter) {
        const Matrix a_cl = plant.a - plant.b * gain;
        p = solve_lyapunov(a_cl, eye + gain.transpose() * gain);
        const Eigen::RowVectorXd next_gain = (plant.b.transpose() * p);
        const double step = (next_gain - gain).norm();
        gain = next_gain;
        best_residual = care_residual(plant.a, plant.b, p);
        if (step < 1e-14 * std::max(1.0, gain.norm())) break;
    }
    if (!(best_residual < 1e-8))
        throw SynthesisError("continuous Riccati iteration failed to converge");
    if (min_eigenvalue_symmetric(p) <= 0.0)
        throw SynthesisError("continuous Riccati solution is not positive definite");
    return p;
}

double epsilon_continuous(const SpectrumReport& spectrum) {
    if (spectrum.lambda_min_real <= 0.0)
        throw SynthesisError("coupling spectrum must lie in the open right half-plane");
    const double sigma_min = 0.99 * spectrum.lambda_min_real;
    return 0.5 * std::max(1.0, 1.0 / sigma_min);
}

GainSynthesis continuous_gain(const Matrix& p, double epsilon, const CompanionPlant& plant) {
    GainSynthesis synthesis;
    synthesis.p = p;
    synthesis.epsilon = epsilon;
    synthesis.k = epsilon * (plant.b.transpose() * p);
    synthesis.residual = care_residual(plant.a, plant.b, p);
    return synthesis;
}

Matrix modified_dare_solve(const CompanionPlant& plant, double epsilon) {
    if (plant.mode != Domain::Discrete)
        throw SynthesisError("modified_dare_solve expects a discrete-mode plant");
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw SynthesisError("discrete Riccati needs epsilon in (0, 1)");
    const int q = plant.order;
    const Matrix eye = Matrix::Identity(q, q);
    const double shrink = 1.0 - epsilon * epsilon;

    Matrix p = eye;
    for (int iter = 0; iter < 100000; ++iter) {
        const Vector pb = p * plant.b;
        const double btpb = plant.b.dot(pb);
        if (!(btpb > 0.0)) throw SynthesisError("B'PB lost positivity during iteration");
        const Matrix apa = plant.a_hat.transpose() * p * plant.a_hat;
        const Vector apb = plant.a_hat.transpose() * pb;
        Matrix next = apa - (shrink / btpb) * (apb * apb.transpose()) + eye;
        next = 0.5 * (next + next.transpose());
        const double change = (next - p).norm();
        p = next;
        if (change < 1e-10) return p;
    }
    throw SynthesisError("discrete Riccati fixed point failed to converge");
}

GainSynthesis discrete_gain(const Matrix& p, double epsilon, const CompanionPlant& plant) {
    const double btpb = plant.b.dot(p * plant.b);
    if (!(btpb > 0.0)) throw SynthesisError("B'PB must be positive");
    GainSynthesis synthesis;
    synthesis.p = p;
    synthesis.epsilon = epsilon;
    synthesis.k = (plant.b.transpose() * p * plant.a_hat) / btpb;
    // strict-inequality margin of the solved recursion: min eig of P - RHS(P)
    const Vector pb = p * plant.b;
    const Vector apb = plant.a_hat.transpose() * pb;
    const Matrix rhs = plant.a_hat.transpose() * p * plant.a_hat -
                       ((1.0 - epsilon * epsilon) / btpb) * (apb * apb.transpose());
    synthesis.residual = min_eigenvalue_symmetric(p - rhs);
    return synthesis;
}

double epsilon_discrete(const SpectrumReport& spectrum) {
    double max_dist = 0.0;
    for (const auto& ev : spectrum.normalized_eigenvalues)
        max_dist = std::max(max_dist, std::abs(std::complex<double>(1.0, 0.0) - ev));
    if (!(max_dist < 1.0))
        throw SynthesisError("normalized spectrum leaves no admissible epsilon interval");
    return 0.5 * (max_dist + 1.0);
}

std::pair<double, double> uniform_weight_search(
    const std::vector<std::complex<double>>& l2_eigenvalues) {
    double best_mu = 0.0;
    double best_value = std::numeric_limits<double>::infinity();
    for (int step = 1; step < 1000; ++step) {
        const double mu = step / 1000.0;
        double worst = 0.0;
        for (const auto& ev : l2_eigenvalues)
            worst = std::max(worst, std::abs(std::complex<double>(1.0, 0.0) - mu * ev));
        if (worst < best_value) {
            best_value = worst;
            best_mu = mu;
        }
    }
    if (!(best_value < 1.0))
        throw SynthesisError("no uniform weight stabilizes the normalized spectrum");
    return {best_mu, best_value};
}

EstimatorGainSynthesis estimator_gain_continuous(int order, double epsilon) {
    // The estimator Riccati Ebar P + P Ebar' + I - P G'G P = 0 maps onto the
    // controller equation under index reversal, so reuse care_solve and flip.
    const CompanionPlant plant = CompanionPlant::make(order, Domain::Continuous);
    const Matrix flip = reversal(order);
    const Matrix p = flip * care_solve(plant) * flip;

    EstimatorGainSynthesis estimator;
    estimator.mode = Domain::Continuous;
    estimator.p = p;
    estimator.epsilon = epsilon;
    estimator.k = epsilon * p.col(0);

    Eigen::RowVectorXd g = Eigen::RowVectorXd::Zero(order);
    g(0) = 1.0;
    estimator.residual = (plant.a * p + p * plant.a.transpose() +
                          Matrix::Identity(order, order) - p * g.transpose() * g * p)
                             .norm();
    if (!(estimator.residual < 1e-8))
        throw SynthesisError("continuous estimator Riccati residual check failed");
    return estimator;
}

EstimatorGainSynthesis estimator_gain_discrete(int order, double epsilon) {
    const CompanionPlant plant = CompanionPlant::make(order, Domain::Discrete);
    const Matrix flip = reversal(order);
    const Matrix p = flip * modified_dare_solve(plant, epsilon) * flip;

    EstimatorGainSynthesis estimator;
    estimator.mode = Domain::Discrete;
    estimator.p = p;
    estimator.epsilon = epsilon;

    Eigen::RowVectorXd g = Eigen::RowVectorXd::Zero(order);
    g(0) = 1.0;
    const Matrix& e_tilde = plant.a_hat;  // I + upper shift
    const double gpg = p(0, 0);
    if (!(gpg > 0.0)) throw SynthesisError("GPG' must be positive");
    estimator.k = e_tilde * p.col(0) / gpg;

    // re-certify on the estimator side: P - [EPE' - (1-eps^2) EPG'(GPG')^-1 GPE'] = I
    const Vector epg = e_tilde * p.col(0);
    const Matrix rhs = e_tilde * p * e_tilde.transpose() -
                       ((1.0 - epsilon * epsilon) / gpg) * (epg * epg.transpose());
    estimator.residual = min_eigenvalue_symmetric(p - rhs);
    if (!(estimator.residual > 0.0))
        throw SynthesisError("discrete estimator Riccati inequality check failed");
    return estimator;
}

double verify_closed_loop(const Matrix& coupling, const CompanionPlant& plant,
                          const Eigen::RowVectorXd& k) {
    const Eigen::Index n = coupling.rows();
    const Matrix base = plant.mode == Domain::Continuous ? plant.a : plant.a_hat;
    const Matrix closed = kron(Matrix::Identity(n, n), base) - kron(coupling, Matrix(plant.b * k));
    const auto eigs = eigenvalues(closed);
    if (plant.mode == Domain::Continuous) return -max_real_part(eigs);
    return 1.0 - spectral_radius(eigs);
}

double verify_closed_loop_blockwise(const std::vector<std::complex<double>>& coupling_eigenvalues,
                                    const CompanionPlant& plant, const Eigen::RowVectorXd& k) {
    const Matrix base = plant.mode == Domain::Continuous ? plant.a : plant.a_hat;
    const Matrix bk = plant.b * k;
    double margin = std::numeric_limits<double>::infinity();
    for (const auto& lambda : coupling_eigenvalues) {
        ComplexMatrix block = base.cast<std::complex<double>>() - lambda * bk.cast<std::complex<double>>();
        const auto eigs = eigenvalues(block);
        const double block_margin =
            plant.mode == Domain::Continuous ? -max_real_part(eigs) : 1.0 - spectral_radius(eigs);
        margin = std::min(margin, block_margin);
    }
    return margin;
}

double verify_estimator_loop(const std::vector<std::complex<double>>& coupling_eigenvalues,
                             const EstimatorGainSynthesis& estimator) {
    const int m = static_cast<int>(estimator.k.size());
    Matrix e_bar = Matrix::Zero(m, m);
    for (int i = 0; i + 1 < m; ++i) e_bar(i, i + 1) = 1.0;
    const Matrix base =
        estimator.mode == Domain::Continuous ? e_bar : Matrix(Matrix::Identity(m, m) + e_bar);
    Eigen::RowVectorXd g = Eigen::RowVectorXd::Zero(m);
    g(0) = 1.0;
    const Matrix keg = estimator.k * g;
    double margin = std::numeric_limits<double>::infinity();
    for (const auto& lambda : coupling_eigenvalues) {
        ComplexMatrix block = base.cast<std::complex<double>>() - lambda * keg.cast<std::complex<double>>();
        const auto eigs = eigenvalues(block);
        const double block_margin = estimator.mode == Domain::Continuous
                                        ? -max_real_part(eigs)
                                        : 1.0 - spectral_radius(eigs);
        margin = std::min(margin, block_margin);
    }
    return margin;
}

}  // namespace containment
