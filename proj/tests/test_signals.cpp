#include <doctest.h>

#include <cmath>
#include <random>

#include "containment/scenario.hpp"
#include "containment/signals.hpp"
#include "test_helpers.hpp"

using namespace containment;
using containment::testing::naive_poly_eval;
using containment::testing::random_polynomial;

TEST_CASE("polynomial evaluation basics") {
    VectorPolynomial zero = VectorPolynomial::zero(2);
    CHECK(poly_eval(zero, 3.7).norm() == 0.0);

    // first published cubic trajectory starts at the origin
    const auto cont = builtin_scenario("paper-continuous-example");
    CHECK(poly_eval(cont.leader_polynomials[0], 0.0).norm() == 0.0);

    std::mt19937 rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        const auto poly = random_polynomial(rng, 3, 5, 2.0);
        const double t = std::uniform_real_distribution<double>(-3.0, 3.0)(rng);
        const Vector horner = poly_eval(poly, t);
        const Vector naive = naive_poly_eval(poly, t);
        CHECK((horner - naive).norm() <= 1e-12 * std::max(1.0, naive.norm()));
    }
}

TEST_CASE("derivatives annihilate and invert exactly") {
    std::mt19937 rng(5);
    const auto poly = random_polynomial(rng, 2, 4);
    CHECK(poly_derivative(poly, 5).degree() == 0);
    CHECK(poly_eval(poly_derivative(poly, 5), 1.3).norm() == 0.0);

    // derivative of the exact antiderivative returns the polynomial
    VectorPolynomial anti;
    anti.dimension = poly.dimension;
    anti.coefficients.push_back(Vector::Zero(poly.dimension));
    for (size_t j = 0; j < poly.coefficients.size(); ++j)
        anti.coefficients.push_back(poly.coefficients[j] / static_cast<double>(j + 1));
    const auto back = poly_derivative(anti, 1);
    REQUIRE(back.coefficients.size() == poly.coefficients.size());
    for (size_t j = 0; j < poly.coefficients.size(); ++j)
        CHECK((back.coefficients[j] - poly.coefficients[j]).norm() < 1e-15);
}

TEST_CASE("forward differences of k^2") {
    VectorPolynomial square;
    square.dimension = 1;
    square.coefficients = {Vector::Zero(1), Vector::Zero(1), Vector::Ones(1)};

    const auto first = poly_forward_difference(square, 1);  // 2k + 1
    CHECK(poly_eval(first, 0.0)(0) == doctest::Approx(1.0));
    CHECK(poly_eval(first, 4.0)(0) == doctest::Approx(9.0));

    const auto second = poly_forward_difference(square, 2);
    CHECK(second.degree() == 0);
    CHECK(poly_eval(second, 11.0)(0) == doctest::Approx(2.0));
}

TEST_CASE("binomial difference formula") {
    SUBCASE("n = 1 telescopes") {
        CHECK(binomial_difference(std::vector<double>{3.0, 8.0}, 1) == doctest::Approx(5.0));
    }
    SUBCASE("n = 2 on squares is constant 2") {
        for (int k = 0; k < 5; ++k) {
            std::vector<double> window{static_cast<double>(k * k),
                                       static_cast<double>((k + 1) * (k + 1)),
                                       static_cast<double>((k + 2) * (k + 2))};
            CHECK(binomial_difference(window, 2) == doctest::Approx(2.0));
        }
    }
    SUBCASE("matches iterated differencing up to n = 8") {
        std::mt19937 rng(17);
        std::uniform_real_distribution<double> value(-5.0, 5.0);
        for (int n = 1; n <= 8; ++n) {
            std::vector<double> series(static_cast<size_t>(n + 1));
            for (auto& s : series) s = value(rng);

            std::vector<double> iterated = series;
            for (int level = 0; level < n; ++level)
                for (size_t i = 0; i + 1 < iterated.size(); ++i)
                    iterated[i] = iterated[i + 1] - iterated[i];

            CHECK(binomial_difference(series, n) ==
                  doctest::Approx(iterated[0]).epsilon(1e-12));
        }
    }
}

TEST_CASE("polynomial forward difference matches the sampled binomial formula") {
    std::mt19937 rng(19);
    for (int trial = 0; trial < 20; ++trial) {
        const auto poly = random_polynomial(rng, 2, 5);
        const int q = 1 + trial % 5;
        const auto diffed = poly_forward_difference(poly, q);
        for (int k = 0; k < 4; ++k) {
            std::vector<Vector> window;
            for (int i = 0; i <= q; ++i) window.push_back(poly_eval(poly, k + i));
            const Vector via_formula = binomial_difference(window, q);
            const Vector via_transform = poly_eval(diffed, k);
            CHECK((via_formula - via_transform).norm() <
                  1e-9 * std::max(1.0, via_formula.norm()));
        }
    }
}

TEST_CASE("difference of the running sum returns the series") {
    std::mt19937 rng(29);

    SUBCASE("integer-valued series: exact, no tolerance") {
        std::uniform_int_distribution<int> value(-1000, 1000);
        std::vector<double> series(64);
        for (auto& s : series) s = static_cast<double>(value(rng));
        std::vector<double> running(series.size() + 1, 0.0);
        for (size_t k = 0; k < series.size(); ++k) running[k + 1] = running[k] + series[k];
        for (size_t k = 0; k < series.size(); ++k)
            CHECK(running[k + 1] - running[k] == series[k]);
    }

    SUBCASE("real series: exact up to one rounding of the accumulator") {
        std::uniform_real_distribution<double> value(-2.0, 2.0);
        std::vector<double> series(64);
        for (auto& s : series) s = value(rng);
        std::vector<double> running(series.size() + 1, 0.0);
        for (size_t k = 0; k < series.size(); ++k) running[k + 1] = running[k] + series[k];
        for (size_t k = 0; k < series.size(); ++k)
            CHECK(std::abs(running[k + 1] - running[k] - series[k]) <=
                  std::numeric_limits<double>::epsilon() * std::abs(running[k + 1]));
    }
}

TEST_CASE("waypoint interpolation") {
    SUBCASE("two points give the line through them") {
        Vector a(1), b(1);
        a << 2.0;
        b << 6.0;
        const auto result = interpolate_waypoints({1.0, 3.0}, {a, b});
        CHECK(result.polynomial.coefficients[1](0) == doctest::Approx(2.0));
        CHECK(result.polynomial.coefficients[0](0) == doctest::Approx(0.0));
    }

    SUBCASE("published waypoints reproduce the printed linear coefficient") {
        std::vector<double> times;
        std::vector<std::vector<Vector>> tracks;
        robot_waypoints(times, tracks);
        const auto result = interpolate_waypoints(times, tracks[0]);
        CHECK(result.polynomial.coefficients[1](0) == doctest::Approx(4.625).epsilon(1e-4));
        CHECK(result.polynomial.coefficients[1](1) == doctest::Approx(-1.028).epsilon(1e-3));
    }

    SUBCASE("random degree-5 data reproduces its nodes") {
        std::mt19937 rng(31);
        std::uniform_real_distribution<double> value(-10.0, 10.0);
        std::vector<double> times{0, 1, 2.5, 4, 5.5, 7};
        std::vector<Vector> points;
        for (size_t i = 0; i < times.size(); ++i) {
            Vector v(2);
            v << value(rng), value(rng);
            points.push_back(v);
        }
        const auto result = interpolate_waypoints(times, points);
        for (size_t i = 0; i < times.size(); ++i) {
            const Vector at_node = poly_eval(result.polynomial, times[i]);
            CHECK((at_node - points[i]).norm() <= 1e-8 * std::max(1.0, points[i].norm()));
        }
    }

    SUBCASE("interpolating samples of a polynomial returns it") {
        std::mt19937 rng(37);
        const auto poly = random_polynomial(rng, 2, 4);
        std::vector<double> times{-2, -1, 0, 1, 2};
        std::vector<Vector> points;
        for (double t : times) points.push_back(poly_eval(poly, t));
        const auto result = interpolate_waypoints(times, points);
        for (double t : {-1.5, 0.3, 1.9})
            CHECK((poly_eval(result.polynomial, t) - poly_eval(poly, t)).norm() < 1e-8);
    }

    SUBCASE("duplicate times are rejected") {
        Vector v = Vector::Zero(1);
        CHECK_THROWS_AS(interpolate_waypoints({1.0, 1.0}, {v, v}), std::invalid_argument);
    }

    SUBCASE("conditioning flag tracks the estimate across grids") {
        Vector v = Vector::Zero(1);
        std::vector<double> wide{0, 200, 400, 600, 800, 1000, 1200, 1400};
        std::vector<Vector> points(wide.size(), v);
        const auto stiff = interpolate_waypoints(wide, points);
        CHECK(stiff.condition_estimate > 1e12);
        CHECK(stiff.condition_warning);

        const auto tame = interpolate_waypoints({0.0, 0.5, 1.0}, {v, v, v});
        CHECK(tame.condition_estimate < 1e12);
        CHECK_FALSE(tame.condition_warning);
    }
}

TEST_CASE("noise streams are deterministic, independent, and standard") {
    NoiseModel model;
    model.seed = 99;
    model.edges = {{0, 1}, {0, 2}};
    model.intensities = {Matrix::Identity(2, 2), Matrix::Identity(2, 2)};

    SUBCASE("zero intensity yields the zero vector") {
        NoiseModel silent = model;
        silent.intensities = {Matrix::Zero(2, 2), Matrix::Zero(2, 2)};
        for (int k = 0; k < 10; ++k) CHECK(sample_noise(silent, 0, 1, 2, k).norm() == 0.0);
    }

    SUBCASE("same key reproduces, different keys decorrelate") {
        const Vector a = sample_noise(model, 0, 1, 2, 5);
        const Vector b = sample_noise(model, 0, 1, 2, 5);
        CHECK((a - b).norm() == 0.0);
        CHECK((sample_noise(model, 0, 2, 2, 5) - a).norm() > 0.0);
        CHECK((sample_noise(model, 0, 1, 2, 6) - a).norm() > 0.0);
        CHECK((sample_noise(model.for_run(1), 0, 1, 2, 5) - a).norm() > 0.0);
    }

    SUBCASE("sample mean over 1e5 draws stays within the 5-sigma band") {
        const int draws = 100000;
        Vector mean = Vector::Zero(2);
        for (int k = 0; k < draws; ++k) mean += sample_noise(model, 0, 1, 2, k);
        mean /= draws;
        CHECK(std::abs(mean(0)) < 0.02);
        CHECK(std::abs(mean(1)) < 0.02);
    }
}

TEST_CASE("iterated differences of white noise keep zero mean") {
    // disjoint windows give independent draws of the differenced process
    const int draws = 20000;
    for (int level = 0; level <= 4; ++level) {
        double sum = 0.0, sum_sq = 0.0;
        for (int d = 0; d < draws; ++d) {
            std::vector<double> window;
            for (int i = 0; i <= level; ++i)
                window.push_back(standard_normal_sample(7, 1, static_cast<std::uint64_t>(d * (level + 1) + i), 0));
            const double value = binomial_difference(window, level);
            sum += value;
            sum_sq += value * value;
        }
        const double mean = sum / draws;
        const double std_dev = std::sqrt(sum_sq / draws - mean * mean);
        CHECK(std::abs(mean) < 4.0 * std_dev / std::sqrt(static_cast<double>(draws)));
    }
}

TEST_CASE("difference-stack correlation vanishes beyond lag n and stays bounded within") {
    const int n = 2;
    const int ensemble = 400000;  // disjoint windows, so every draw is independent
    const int spacing = 2 * n + 2;

    // E[(D^i eta)[k] (D^j eta)[k+m]] has the closed form
    // (-1)^(m+j-i) C(i+j, j+m); zero whenever m > i.
    auto expected = [&](int i, int j, int m) {
        if (m > i) return 0.0;
        const double c = binomial_coefficient(i + j, j + m);
        return ((m + j - i) % 2 == 0) ? c : -c;
    };

    for (int lag : {0, 1, n + 1}) {
        Matrix estimate = Matrix::Zero(n + 1, n + 1);
        for (int d = 0; d < ensemble; ++d) {
            const std::uint64_t base = static_cast<std::uint64_t>(d) * spacing;
            std::vector<double> samples(static_cast<size_t>(spacing));
            for (int i = 0; i < spacing; ++i)
                samples[static_cast<size_t>(i)] = standard_normal_sample(13, 2, base + i, 0);
            Vector nu_k(n + 1), nu_km(n + 1);
            for (int level = 0; level <= n; ++level) {
                std::vector<double> w0(samples.begin(), samples.begin() + level + 1);
                std::vector<double> wm(samples.begin() + lag, samples.begin() + lag + level + 1);
                nu_k(level) = binomial_difference(w0, level);
                nu_km(level) = binomial_difference(wm, level);
            }
            estimate += nu_k * nu_km.transpose();
        }
        estimate /= static_cast<double>(ensemble);

        if (lag >= n + 1) {
            CHECK(estimate.norm() < 0.1);
            // normalized cross-correlation of the stacked differences
            double max_corr = 0.0;
            for (int i = 0; i <= n; ++i)
                for (int j = 0; j <= n; ++j)
                    max_corr = std::max(max_corr,
                                        std::abs(estimate(i, j)) /
                                            std::sqrt(binomial_coefficient(2 * i, i) *
                                                      binomial_coefficient(2 * j, j)));
            CHECK(max_corr < 0.05);
        } else {
            for (int i = 0; i <= n; ++i)
                for (int j = 0; j <= n; ++j) {
                    // Var of the product is at most 3 C(2i,i) C(2j,j); six sigma
                    const double sigma_bound =
                        6.0 * std::sqrt(3.0 * binomial_coefficient(2 * i, i) *
                                        binomial_coefficient(2 * j, j) / ensemble);
                    CHECK(std::abs(estimate(i, j) - expected(i, j, lag)) < sigma_bound);
                }
        }
    }
}
