#include "containment/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace containment {

namespace {

// Affine min-norm point over the active vertex set: minimize ||P v||^2 with
// sum(v) = 1, via the bordered Gram system. Falls back to an SVD solve when
// the active set is affinely dependent.
Vector affine_minimizer(const Matrix& gram, const std::vector<int>& active) {
    const int s = static_cast<int>(active.size());
    Matrix system = Matrix::Zero(s + 1, s + 1);
    for (int a = 0; a < s; ++a)
        for (int b = 0; b < s; ++b) system(a, b) = gram(active[a], active[b]);
    system.row(s).head(s).setOnes();
    system.col(s).head(s).setOnes();
    Vector rhs = Vector::Zero(s + 1);
    rhs(s) = 1.0;

    Eigen::FullPivLU<Matrix> lu(system);
    Vector solution;
    if (lu.isInvertible()) {
        solution = lu.solve(rhs);
    } else {
        solution = system.jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(rhs);
    }
    return solution.head(s);
}

}  // namespace

HullProjection hull_distance(const Vector& point, const std::vector<Vector>& leaders) {
    const int m = static_cast<int>(leaders.size());
    if (m < 1) throw std::invalid_argument("hull_distance needs at least one leader");

    const Eigen::Index dim = point.size();
    Matrix shifted(dim, m);  // columns p_i = leader_i - point
    for (int i = 0; i < m; ++i) {
        if (leaders[static_cast<size_t>(i)].size() != dim)
            throw std::invalid_argument("hull_distance dimension mismatch");
        shifted.col(i) = leaders[static_cast<size_t>(i)] - point;
    }

    HullProjection result;
    result.weights = Vector::Zero(m);
    if (m == 1) {
        result.weights(0) = 1.0;
        result.distance = shifted.col(0).norm();
        return result;
    }

    const Matrix gram = shifted.transpose() * shifted;
    const double scale = std::max(1.0, gram.diagonal().maxCoeff());
    const double tol = 1e-12 * scale;

    // Wolfe's method: grow a corral of vertices, keep the min-norm point of
    // its convex hull, stop when no vertex improves the first-order condition.
    int start = 0;
    gram.diagonal().minCoeff(&start);
    std::vector<int> active{start};
    Vector weights_active = Vector::Ones(1);

    const int max_outer = 16 * m * m + 64;
    for (int outer = 0; outer < max_outer; ++outer) {
        Vector y = Vector::Zero(dim);
        for (size_t a = 0; a < active.size(); ++a)
            y += weights_active(static_cast<Eigen::Index>(a)) * shifted.col(active[a]);
        const double yy = y.squaredNorm();

        int best = -1;
        double best_dot = std::numeric_limits<double>::infinity();
        for (int i = 0; i < m; ++i) {
            const double d = shifted.col(i).dot(y);
            if (d < best_dot) {
                best_dot = d;
                best = i;
            }
        }
        if (best_dot >= yy - tol) break;
        if (std::find(active.begin(), active.end(), best) != active.end()) break;

        active.push_back(best);
        Vector grown = Vector::Zero(static_cast<Eigen::Index>(active.size()));
        grown.head(weights_active.size()) = weights_active;
        weights_active = grown;

        // shrink back to a corral whose affine minimizer is feasible
        while (true) {
            Vector v = affine_minimizer(gram, active);
            if ((v.array() > 1e-14).all()) {
                weights_active = v;
                break;
            }
            double theta = 1.0;
            for (Eigen::Index a = 0; a < v.size(); ++a) {
                if (v(a) <= 1e-14 && weights_active(a) > v(a))
                    theta = std::min(theta, weights_active(a) / (weights_active(a) - v(a)));
            }
            weights_active = (1.0 - theta) * weights_active + theta * v;
            std::vector<int> kept;
            Vector kept_weights(weights_active.size());
            Eigen::Index count = 0;
            for (Eigen::Index a = 0; a < weights_active.size(); ++a) {
                if (weights_active(a) > 1e-14) {
                    kept.push_back(active[static_cast<size_t>(a)]);
                    kept_weights(count++) = weights_active(a);
                }
            }
            if (kept.empty()) {  // fully degenerate; keep the best single vertex
                kept.push_back(active.front());
                kept_weights(0) = 1.0;
                count = 1;
            }
            active = std::move(kept);
            weights_active = kept_weights.head(count).eval();
            if (active.size() == 1) {
                weights_active = Vector::Ones(1);
                break;
            }
        }
    }

    for (size_t a = 0; a < active.size(); ++a)
        result.weights(active[a]) = std::max(0.0, weights_active(static_cast<Eigen::Index>(a)));
    result.weights /= result.weights.sum();

    Vector y = shifted * result.weights;
    result.distance = y.norm();
    double min_directional = std::numeric_limits<double>::infinity();
    const double yy = y.squaredNorm();
    for (int i = 0; i < m; ++i)
        min_directional = std::min(min_directional, shifted.col(i).dot(y) - yy);
    result.certificate = min_directional / scale;
    return result;
}

double containment_error(const std::vector<Vector>& followers,
                         const std::vector<Vector>& leaders) {
    double total = 0.0;
    for (const auto& x : followers) total += hull_distance(x, leaders).distance;
    return total;
}

}  // namespace containment
