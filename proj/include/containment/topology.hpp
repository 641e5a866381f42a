#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

#include "containment/linalg.hpp"

namespace containment {

// ============================================================================
// Interaction graph over M leaders and N followers.
//
// Agents are indexed 0..M+N-1 with leaders first. adjacency(i, j) is the
// weight on the edge from agent j to agent i; leaders have no incoming
// edges, so their rows are identically zero.
// ============================================================================
struct DirectedTopology {
    int num_leaders = 0;
    int num_followers = 0;
    Matrix adjacency;  // (M+N) x (M+N), nonnegative, zero diagonal

    int num_agents() const { return num_leaders + num_followers; }

    /// Throws std::invalid_argument if any structural invariant is violated.
    void validate() const;
};

// Laplacian L = D - A partitioned by the leader/follower split: the leader
// rows vanish, the follower rows carry [L1 L2] with L1 coupling followers to
// leaders and L2 coupling followers among themselves.
struct LaplacianBlocks {
    Matrix laplacian;    // (M+N) x (M+N)
    Matrix l1;           // N x M
    Matrix l2;           // N x N
    Vector in_degrees;   // length M+N
};

struct ReachabilityReport {
    bool all_reachable = false;
    std::vector<int> unreachable_followers;  // 0-based agent indices
};

// Spectral facts about the follower coupling block that every gain
// certification relies on.
struct SpectrumReport {
    std::vector<std::complex<double>> l2_eigenvalues;
    double lambda_min_real = 0.0;                            // min Re eig(L2)
    std::vector<std::complex<double>> normalized_eigenvalues;  // eig((I+D)^-1 L2)
    double gershgorin_margin = 0.0;                          // 1 - max|1 - normalized eig|
};

// Spectrum plus the row-stochastic matrix -L2^-1 L1 whose rows give each
// follower's asymptotic convex-combination weights over the leaders.
struct TopologyCertificate {
    SpectrumReport spectrum;
    Matrix hull_weights;  // N x M, entries >= 0, rows sum to 1
};

struct CertificationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

LaplacianBlocks build_laplacian(const DirectedTopology& topology);

/// True iff every follower is reachable from the leader set along directed
/// edges. Breadth-first search from all leaders at once.
ReachabilityReport check_leader_reachability(const DirectedTopology& topology);

/// Certifies the spectral facts used by gain synthesis: all eigenvalues of L2
/// in the open right half-plane, -L2^-1 L1 entrywise nonnegative (tol 1e-10)
/// with unit row sums (tol 1e-9), and the normalized spectrum strictly inside
/// the unit disk centered at 1. Throws CertificationError on failure.
TopologyCertificate certify_topology(const LaplacianBlocks& blocks);

}  // namespace containment
