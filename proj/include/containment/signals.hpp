#pragma once

#include <cstdint>
#include <vector>

#include "containment/linalg.hpp"

namespace containment {

// ============================================================================
// Vector-valued polynomial a_0 + a_1 t + ... + a_n t^n with a_j in R^p.
// Used for leader trajectories, polynomial disturbances and waypoint
// interpolants, in both the continuous variable t and the integer step k.
// ============================================================================
struct VectorPolynomial {
    int dimension = 0;
    std::vector<Vector> coefficients;  // a_0 first, never empty

    static VectorPolynomial zero(int dim) {
        VectorPolynomial p;
        p.dimension = dim;
        p.coefficients.push_back(Vector::Zero(dim));
        return p;
    }

    int degree() const { return static_cast<int>(coefficients.size()) - 1; }
    void validate() const;
};

/// Horner evaluation.
Vector poly_eval(const VectorPolynomial& poly, double t);

/// Exact q-th derivative (coefficient transform). Degenerates to the zero
/// polynomial when q exceeds the degree.
VectorPolynomial poly_derivative(const VectorPolynomial& poly, int order = 1);

/// Exact q-th forward difference in the integer variable: (Δp)(k) = p(k+1) - p(k).
VectorPolynomial poly_forward_difference(const VectorPolynomial& poly, int order = 1);

/// n-th iterated forward difference of a sampled series expressed directly as
/// the alternating binomial sum sum_i (-1)^i C(n,i) x[k+n-i]. `window` must
/// hold x[k], x[k+1], ..., x[k+n].
double binomial_difference(const std::vector<double>& window, int n);
Vector binomial_difference(const std::vector<Vector>& window, int n);

double binomial_coefficient(int n, int k);

struct InterpolationResult {
    VectorPolynomial polynomial;
    double condition_estimate = 0.0;  // SVD condition number of the node Vandermonde
    bool condition_warning = false;   // set when the estimate exceeds 1e12
};

/// Unique degree-(count-1) interpolant through (times[i], points[i]), built by
/// Newton divided differences and expanded to monomial coefficients.
/// Throws std::invalid_argument on duplicate times or empty input.
InterpolationResult interpolate_waypoints(const std::vector<double>& times,
                                          const std::vector<Vector>& points);

// ============================================================================
// Seeded measurement-noise source. Sampling is a pure function of
// (seed, edge, step, component): a counter-based generator (splitmix64
// mixing + Box-Muller) gives reproducible, order-independent streams, and
// distinct edges get independent streams.
// ============================================================================
struct NoiseModel {
    std::uint64_t seed = 0;
    std::vector<Matrix> intensities;  // per directed edge, p x p diagonal
    std::vector<std::pair<int, int>> edges;  // (from, to) 0-based, parallel to intensities

    bool empty() const { return intensities.empty(); }

    /// Diagonal intensity for edge from -> to; zero matrix if the edge is not listed.
    Matrix intensity_for(int from, int to, int dim) const;

    /// Derives an independent stream for one Monte-Carlo run.
    NoiseModel for_run(std::uint64_t run_index) const;
};

/// One standard-normal draw keyed by (seed, stream, step, component).
double standard_normal_sample(std::uint64_t seed, std::uint64_t stream,
                              std::uint64_t step, std::uint64_t component);

/// rho * eta for the directed edge from -> to at step k; eta is a standard
/// white-noise vector.
Vector sample_noise(const NoiseModel& model, int from, int to, int dim, std::uint64_t k);

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

}  // namespace containment
