#include <doctest.h>

#include <cmath>
#include <random>

#include "containment/synthesis.hpp"
#include "test_helpers.hpp"

using namespace containment;
using containment::testing::random_reachable_topology;

namespace {

double care_residual(const CompanionPlant& plant, const Matrix& p) {
    const Vector pb = p * plant.b;
    return (plant.a.transpose() * p + p * plant.a +
            Matrix::Identity(plant.order, plant.order) - pb * pb.transpose())
        .norm();
}

SpectrumReport fake_spectrum(double lambda_min) {
    SpectrumReport s;
    s.lambda_min_real = lambda_min;
    s.l2_eigenvalues = {{lambda_min, 0.0}};
    return s;
}

}  // namespace

TEST_CASE("companion plants have the shift structure") {
    const auto cont = CompanionPlant::make(2, Domain::Continuous);
    CHECK(cont.a(0, 1) == 1.0);
    CHECK(cont.a(0, 0) == 0.0);
    CHECK(cont.a(1, 0) == 0.0);
    CHECK(cont.b(0) == 0.0);
    CHECK(cont.b(1) == 1.0);

    const auto disc = CompanionPlant::make(1, Domain::Discrete);
    CHECK(disc.a_hat(0, 0) == 1.0);
    CHECK(disc.b(0) == 1.0);

    const auto big = CompanionPlant::make(4, Domain::Continuous);
    CHECK(big.a.rows() == 4);
    CHECK((big.a * big.a * big.a * big.a).norm() == 0.0);  // nilpotent
}

TEST_CASE("continuous Riccati solutions") {
    SUBCASE("scalar plant gives P = 1") {
        const auto plant = CompanionPlant::make(1, Domain::Continuous);
        CHECK(care_solve(plant)(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("second order has the closed form") {
        const auto plant = CompanionPlant::make(2, Domain::Continuous);
        const Matrix p = care_solve(plant);
        CHECK(std::abs(p(0, 0) - std::sqrt(3.0)) < 1e-9);
        CHECK(std::abs(p(0, 1) - 1.0) < 1e-9);
        CHECK(std::abs(p(1, 0) - 1.0) < 1e-9);
        CHECK(std::abs(p(1, 1) - std::sqrt(3.0)) < 1e-9);
    }
    SUBCASE("residual and definiteness up to order eight") {
        for (int q = 1; q <= 8; ++q) {
            const auto plant = CompanionPlant::make(q, Domain::Continuous);
            const Matrix p = care_solve(plant);
            CHECK(care_residual(plant, p) < 1e-8);
            CHECK((p - p.transpose()).norm() < 1e-10);
            CHECK(min_eigenvalue_symmetric(p) > 0.0);
        }
    }
}

TEST_CASE("epsilon selection in the continuous domain") {
    CHECK(epsilon_continuous(fake_spectrum(2.0)) == doctest::Approx(0.5));
    CHECK(epsilon_continuous(fake_spectrum(0.5)) == doctest::Approx(0.5 / 0.495).epsilon(1e-9));
    CHECK_THROWS_AS(epsilon_continuous(fake_spectrum(0.0)), SynthesisError);
    CHECK_THROWS_AS(epsilon_continuous(fake_spectrum(-1.0)), SynthesisError);
}

TEST_CASE("continuous gains scale linearly and match the published values") {
    const auto plant2 = CompanionPlant::make(2, Domain::Continuous);
    const Matrix p2 = care_solve(plant2);
    const auto unit = continuous_gain(p2, 1.0, plant2);
    CHECK(unit.k(0) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(unit.k(1) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-9));

    const auto doubled = continuous_gain(p2, 2.0, plant2);
    CHECK((doubled.k - 2.0 * unit.k).norm() < 1e-12);

    const auto plant4 = CompanionPlant::make(4, Domain::Continuous);
    const auto paper = continuous_gain(care_solve(plant4), 2.0, plant4);
    CHECK(std::abs(paper.k(0) - 2.0) < 1e-3);
    CHECK(std::abs(paper.k(1) - 6.1554) < 1e-3);
    CHECK(std::abs(paper.k(2) - 8.4721) < 1e-3);
    CHECK(std::abs(paper.k(3) - 6.1554) < 1e-3);
}

TEST_CASE("discrete Riccati fixed point") {
    SUBCASE("scalar fixed point is 1/(1-eps^2)") {
        const auto plant = CompanionPlant::make(1, Domain::Discrete);
        CHECK(modified_dare_solve(plant, 0.5)(0, 0) == doctest::Approx(4.0 / 3.0).epsilon(1e-9));
        CHECK(modified_dare_solve(plant, 0.9)(0, 0) ==
              doctest::Approx(1.0 / (1.0 - 0.81)).epsilon(1e-8));
    }
    SUBCASE("strict inequality margin at the fixed point") {
        const auto plant = CompanionPlant::make(2, Domain::Discrete);
        const Matrix p = modified_dare_solve(plant, 0.9);
        const auto synthesis = discrete_gain(p, 0.9, plant);
        CHECK(synthesis.residual >= 0.5);
        CHECK(min_eigenvalue_symmetric(p) > 0.0);
    }
    SUBCASE("iterates grow monotonically in the semidefinite order") {
        const auto plant = CompanionPlant::make(3, Domain::Discrete);
        const double eps = 0.8;
        Matrix p = Matrix::Identity(3, 3);
        for (int iter = 0; iter < 30; ++iter) {
            const Vector pb = p * plant.b;
            const double btpb = plant.b.dot(pb);
            const Vector apb = plant.a_hat.transpose() * pb;
            Matrix next = plant.a_hat.transpose() * p * plant.a_hat -
                          ((1.0 - eps * eps) / btpb) * (apb * apb.transpose()) +
                          Matrix::Identity(3, 3);
            next = 0.5 * (next + next.transpose());
            CHECK(min_eigenvalue_symmetric(next - p) > -1e-12);
            p = next;
        }
    }
    SUBCASE("epsilon outside the open unit interval is rejected") {
        const auto plant = CompanionPlant::make(2, Domain::Discrete);
        CHECK_THROWS_AS(modified_dare_solve(plant, 0.0), SynthesisError);
        CHECK_THROWS_AS(modified_dare_solve(plant, 1.0), SynthesisError);
    }
}

TEST_CASE("discrete gains") {
    SUBCASE("scalar gain cancels to one for any epsilon") {
        const auto plant = CompanionPlant::make(1, Domain::Discrete);
        for (double eps : {0.3, 0.5, 0.9})
            CHECK(discrete_gain(modified_dare_solve(plant, eps), eps, plant).k(0) ==
                  doctest::Approx(1.0).epsilon(1e-9));
    }
    SUBCASE("the closed loop is contracting across the admissible disk") {
        const auto plant = CompanionPlant::make(2, Domain::Discrete);
        const double eps = 0.9;
        const auto synthesis = discrete_gain(modified_dare_solve(plant, eps), eps, plant);
        std::vector<std::complex<double>> ring;
        for (int angle = 0; angle < 12; ++angle) {
            const double theta = angle * 2.0 * M_PI / 12;
            ring.push_back(std::complex<double>(1.0, 0.0) +
                           0.99 * eps * std::complex<double>(std::cos(theta), std::sin(theta)));
        }
        CHECK(verify_closed_loop_blockwise(ring, plant, synthesis.k) > 0.0);
    }
    SUBCASE("uniform weight search stabilizes the raw coupling spectrum") {
        std::vector<std::complex<double>> eigs{{1.0, 0.0}, {2.5, 0.866}, {2.5, -0.866}};
        const auto [mu, worst] = uniform_weight_search(eigs);
        CHECK(mu > 0.0);
        CHECK(mu < 1.0);
        CHECK(worst < 1.0);

        const auto plant = CompanionPlant::make(3, Domain::Discrete);
        const double eps = 0.5 * (worst + 1.0);
        const auto synthesis = discrete_gain(modified_dare_solve(plant, eps), eps, plant);
        std::vector<std::complex<double>> scaled;
        for (const auto& ev : eigs) scaled.push_back(mu * ev);
        CHECK(verify_closed_loop_blockwise(scaled, plant, synthesis.k) > 0.0);
    }
}

TEST_CASE("estimator gains by duality") {
    SUBCASE("scalar continuous estimator") {
        const auto est = estimator_gain_continuous(1, 0.7);
        CHECK(est.p(0, 0) == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(est.k(0) == doctest::Approx(0.7).epsilon(1e-9));
    }
    SUBCASE("second-order continuous estimator matches the flipped solution") {
        const auto est = estimator_gain_continuous(2, 1.0);
        CHECK(est.p(0, 0) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-9));
        CHECK(est.k(0) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-9));
        CHECK(est.k(1) == doctest::Approx(1.0).epsilon(1e-9));
    }
    SUBCASE("observer loop is stable over certified coupling spectra") {
        std::mt19937 rng(51);
        for (int trial = 0; trial < 10; ++trial) {
            const auto topology = random_reachable_topology(rng);
            const auto cert = certify_topology(build_laplacian(topology));
            const auto est = estimator_gain_continuous(3, epsilon_continuous(cert.spectrum));
            CHECK(verify_estimator_loop(cert.spectrum.l2_eigenvalues, est) > 0.0);
        }
    }
    SUBCASE("scalar discrete estimator cancels to gain one") {
        const auto est = estimator_gain_discrete(1, 0.6);
        CHECK(est.k(0) == doctest::Approx(1.0).epsilon(1e-9));
    }
    SUBCASE("discrete estimator satisfies the transposed recursion directly") {
        for (int m : {2, 3, 4}) {
            const double eps = 0.85;
            const auto est = estimator_gain_discrete(m, eps);
            CHECK(est.residual >= 0.5);  // the +I offset survives the flip
            CHECK(min_eigenvalue_symmetric(est.p) > 0.0);

            // transpose duality: the flip of the controller solution solves it
            const auto plant = CompanionPlant::make(m, Domain::Discrete);
            const Matrix flip = reversal(m);
            const Matrix from_controller = flip * modified_dare_solve(plant, eps) * flip;
            CHECK((est.p - from_controller).norm() < 1e-9 * from_controller.norm());
        }
    }
    SUBCASE("discrete observer loop is contracting inside the epsilon disk") {
        const double eps = 0.9;
        const auto est = estimator_gain_discrete(2, eps);
        std::vector<std::complex<double>> ring;
        for (int angle = 0; angle < 12; ++angle) {
            const double theta = angle * 2.0 * M_PI / 12;
            ring.push_back(std::complex<double>(1.0, 0.0) +
                           0.99 * eps * std::complex<double>(std::cos(theta), std::sin(theta)));
        }
        CHECK(verify_estimator_loop(ring, est) > 0.0);
    }
}

TEST_CASE("closed-loop certification") {
    SUBCASE("scalar continuous margin equals the proportional gain") {
        const auto plant = CompanionPlant::make(1, Domain::Continuous);
        Matrix coupling(1, 1);
        coupling << 1.0;
        Eigen::RowVectorXd k(1);
        k << 0.37;
        CHECK(verify_closed_loop(coupling, plant, k) == doctest::Approx(0.37).epsilon(1e-9));
    }
    SUBCASE("blockwise certification agrees with the stacked spectrum") {
        std::mt19937 rng(61);
        for (int trial = 0; trial < 10; ++trial) {
            const auto topology = random_reachable_topology(rng);
            const auto blocks = build_laplacian(topology);
            const auto cert = certify_topology(blocks);

            const auto plant = CompanionPlant::make(3, Domain::Continuous);
            const auto gain = continuous_gain(care_solve(plant),
                                              epsilon_continuous(cert.spectrum), plant);
            const double kron_margin = verify_closed_loop(blocks.l2, plant, gain.k);
            const double block_margin =
                verify_closed_loop_blockwise(cert.spectrum.l2_eigenvalues, plant, gain.k);
            CHECK(kron_margin == doctest::Approx(block_margin).epsilon(1e-7));
            CHECK(kron_margin > 0.0);
        }
    }
    SUBCASE("gain entries are recoverable from the Riccati solution alone") {
        const auto cont = CompanionPlant::make(4, Domain::Continuous);
        const Matrix pc = care_solve(cont);
        const auto gc = continuous_gain(pc, 1.7, cont);
        CHECK((gc.k - 1.7 * pc.row(3)).norm() < 1e-12);

        const auto disc = CompanionPlant::make(3, Domain::Discrete);
        const Matrix pd = modified_dare_solve(disc, 0.8);
        const auto gd = discrete_gain(pd, 0.8, disc);
        const double last = (pd(2, 1) + pd(2, 2)) / pd(2, 2);
        CHECK(gd.k(2) == doctest::Approx(last).epsilon(1e-10));
    }
}
