#pragma once

#include <vector>

#include "containment/linalg.hpp"

namespace containment {

// Projection of a point onto the convex hull of the leader positions,
// parameterized by simplex weights: distance = ||point - sum mu_i leader_i||.
struct HullProjection {
    double distance = 0.0;
    Vector weights;           // length M, entries >= 0, sum to 1
    double certificate = 0.0;  // min vertex directional derivative (>= -1e-8 at optimum)
};

/// Distance from `point` to the convex hull spanned by `leaders`, solved as a
/// min-norm-point problem over the simplex with Wolfe's algorithm. Exact for
/// small vertex counts; degenerate (collinear, coincident) leader sets need
/// no special casing.
HullProjection hull_distance(const Vector& point, const std::vector<Vector>& leaders);

/// Sum of hull distances over all follower positions.
double containment_error(const std::vector<Vector>& followers,
                         const std::vector<Vector>& leaders);

}  // namespace containment
