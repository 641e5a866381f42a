#include "containment/signals.hpp"

#include <cmath>
#include <stdexcept>

namespace containment {

void VectorPolynomial::validate() const {
    if (dimension < 1) throw std::invalid_argument("polynomial dimension must be positive");
    if (coefficients.empty()) throw std::invalid_argument("polynomial needs at least one coefficient");
    for (const auto& c : coefficients) {
        if (c.size() != dimension) throw std::invalid_argument("polynomial coefficient dimension mismatch");
        if (!c.allFinite()) throw std::invalid_argument("polynomial coefficient must be finite");
    }
}

Vector poly_eval(const VectorPolynomial& poly, double t) {
    Vector acc = poly.coefficients.back();
    for (auto it = poly.coefficients.rbegin() + 1; it != poly.coefficients.rend(); ++it)
        acc = *it + t * acc;
    return acc;
}

VectorPolynomial poly_derivative(const VectorPolynomial& poly, int order) {
    if (order < 0) throw std::invalid_argument("derivative order must be nonnegative");
    VectorPolynomial out = poly;
    for (int q = 0; q < order; ++q) {
        if (out.degree() == 0) return VectorPolynomial::zero(poly.dimension);
        std::vector<Vector> next;
        next.reserve(out.coefficients.size() - 1);
        for (size_t j = 1; j < out.coefficients.size(); ++j)
            next.push_back(static_cast<double>(j) * out.coefficients[j]);
        out.coefficients = std::move(next);
    }
    return out;
}

VectorPolynomial poly_forward_difference(const VectorPolynomial& poly, int order) {
    if (order < 0) throw std::invalid_argument("difference order must be nonnegative");
    VectorPolynomial out = poly;
    for (int q = 0; q < order; ++q) {
        const int deg = out.degree();
        if (deg == 0) return VectorPolynomial::zero(poly.dimension);
        // p(k+1) - p(k): coefficient of k^i picks up C(j, i) from each a_j (k+1)^j, j > i
        std::vector<Vector> next(static_cast<size_t>(deg), Vector::Zero(poly.dimension));
        for (int j = 1; j <= deg; ++j)
            for (int i = 0; i < j; ++i)
                next[static_cast<size_t>(i)] += binomial_coefficient(j, i) * out.coefficients[static_cast<size_t>(j)];
        out.coefficients = std::move(next);
    }
    return out;
}

double binomial_coefficient(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double value = 1.0;
    for (int i = 0; i < k; ++i) value = value * static_cast<double>(n - i) / static_cast<double>(i + 1);
    return std::round(value);
}

double binomial_difference(const std::vector<double>& window, int n) {
    if (static_cast<int>(window.size()) < n + 1)
        throw std::invalid_argument("binomial_difference needs n+1 samples");
    double acc = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double term = binomial_coefficient(n, i) * window[static_cast<size_t>(n - i)];
        acc += (i % 2 == 0) ? term : -term;
    }
    return acc;
}

Vector binomial_difference(const std::vector<Vector>& window, int n) {
    if (static_cast<int>(window.size()) < n + 1)
        throw std::invalid_argument("binomial_difference needs n+1 samples");
    Vector acc = Vector::Zero(window.front().size());
    for (int i = 0; i <= n; ++i) {
        const double c = binomial_coefficient(n, i);
        acc += ((i % 2 == 0) ? c : -c) * window[static_cast<size_t>(n - i)];
    }
    return acc;
}

InterpolationResult interpolate_waypoints(const std::vector<double>& times,
                                          const std::vector<Vector>& points) {
    const size_t count = times.size();
    if (count == 0 || points.size() != count)
        throw std::invalid_argument("interpolation needs matching, nonempty times and points");
    for (size_t i = 0; i < count; ++i)
        for (size_t j = i + 1; j < count; ++j)
            if (times[i] == times[j]) throw std::invalid_argument("interpolation times must be distinct");

    const int dim = static_cast<int>(points.front().size());

    // Divided-difference table, one column per level.
    std::vector<Vector> table = points;
    std::vector<Vector> newton_coeffs;
    newton_coeffs.push_back(table.front());
    for (size_t level = 1; level < count; ++level) {
        for (size_t i = 0; i + level < count; ++i)
            table[i] = (table[i + 1] - table[i]) / (times[i + level] - times[i]);
        table.resize(count - level);
        newton_coeffs.push_back(table.front());
    }

    // Expand sum_j c_j * prod_{i<j} (t - t_i) into the monomial basis.
    InterpolationResult result;
    result.polynomial.dimension = dim;
    result.polynomial.coefficients.assign(count, Vector::Zero(dim));
    std::vector<double> basis{1.0};  // monomial coefficients of the running product
    for (size_t j = 0; j < count; ++j) {
        for (size_t i = 0; i < basis.size(); ++i)
            result.polynomial.coefficients[i] += basis[i] * newton_coeffs[j];
        if (j + 1 < count) {
            basis.push_back(0.0);
            for (size_t i = basis.size() - 1; i > 0; --i)
                basis[i] = basis[i - 1] - times[j] * basis[i];
            basis[0] *= -times[j];
        }
    }

    Matrix vandermonde(count, count);
    for (size_t i = 0; i < count; ++i) {
        double power = 1.0;
        for (size_t j = 0; j < count; ++j) {
            vandermonde(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = power;
            power *= times[i];
        }
    }
    Eigen::JacobiSVD<Matrix> svd(vandermonde);
    const double smin = svd.singularValues().minCoeff();
    result.condition_estimate =
        smin > 0.0 ? svd.singularValues().maxCoeff() / smin : std::numeric_limits<double>::infinity();
    result.condition_warning = result.condition_estimate > 1e12;
    return result;
}

// ----------------------------------------------------------------------------
// Counter-based noise
// ----------------------------------------------------------------------------

namespace {

std::uint64_t splitmix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double to_unit_interval(std::uint64_t bits) {
    // (0,1): 53 mantissa bits offset by half a step so the value is never 0 or 1
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    return splitmix(splitmix(a) ^ splitmix(b ^ 0x517cc1b727220a95ULL));
}

double standard_normal_sample(std::uint64_t seed, std::uint64_t stream,
                              std::uint64_t step, std::uint64_t component) {
    std::uint64_t key = splitmix(seed);
    key = splitmix(key ^ stream);
    key = splitmix(key ^ step);
    key = splitmix(key ^ component);
    const double u1 = to_unit_interval(splitmix(key ^ 0xa5a5a5a5a5a5a5a5ULL));
    const double u2 = to_unit_interval(splitmix(key ^ 0x3c3c3c3c3c3c3c3cULL));
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

Matrix NoiseModel::intensity_for(int from, int to, int dim) const {
    for (size_t e = 0; e < edges.size(); ++e)
        if (edges[e].first == from && edges[e].second == to) return intensities[e];
    return Matrix::Zero(dim, dim);
}

NoiseModel NoiseModel::for_run(std::uint64_t run_index) const {
    NoiseModel derived = *this;
    derived.seed = mix_seed(seed, run_index + 1);
    return derived;
}

Vector sample_noise(const NoiseModel& model, int from, int to, int dim, std::uint64_t k) {
    const Matrix rho = model.intensity_for(from, to, dim);
    Vector out = Vector::Zero(dim);
    if (rho.isZero(0.0)) return out;
    // stable per-edge stream id; agent indices are 0-based and < 2^20 in practice
    const std::uint64_t stream =
        (static_cast<std::uint64_t>(from) << 20) | static_cast<std::uint64_t>(to);
    for (int c = 0; c < dim; ++c)
        out(c) = rho(c, c) * standard_normal_sample(model.seed, stream, k, static_cast<std::uint64_t>(c));
    return out;
}

}  // namespace containment
