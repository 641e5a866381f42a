#include "containment/topology.hpp"

#include <cmath>
#include <deque>
#include <sstream>

namespace containment {

void DirectedTopology::validate() const {
    if (num_leaders < 1 || num_followers < 1)
        throw std::invalid_argument("topology needs at least one leader and one follower");
    const int n = num_agents();
    if (adjacency.rows() != n || adjacency.cols() != n)
        throw std::invalid_argument("adjacency must be (M+N) x (M+N)");
    for (int i = 0; i < n; ++i) {
        if (adjacency(i, i) != 0.0) {
            std::ostringstream msg;
            msg << "self-loop on agent " << i + 1;
            throw std::invalid_argument(msg.str());
        }
        for (int j = 0; j < n; ++j) {
            const double w = adjacency(i, j);
            if (!(w >= 0.0) || !std::isfinite(w)) {
                std::ostringstream msg;
                msg << "edge weight from agent " << j + 1 << " to agent " << i + 1
                    << " must be finite and nonnegative, got " << w;
                throw std::invalid_argument(msg.str());
            }
            if (i < num_leaders && w != 0.0) {
                std::ostringstream msg;
                msg << "leader " << i + 1 << " has an incoming edge from agent " << j + 1;
                throw std::invalid_argument(msg.str());
            }
        }
    }
}

LaplacianBlocks build_laplacian(const DirectedTopology& topology) {
    topology.validate();
    const int m = topology.num_leaders;
    const int n = topology.num_followers;

    LaplacianBlocks blocks;
    blocks.in_degrees = topology.adjacency.rowwise().sum();
    blocks.laplacian = Matrix(blocks.in_degrees.asDiagonal()) - topology.adjacency;
    blocks.l1 = blocks.laplacian.block(m, 0, n, m);
    blocks.l2 = blocks.laplacian.block(m, m, n, n);
    return blocks;
}

ReachabilityReport check_leader_reachability(const DirectedTopology& topology) {
    topology.validate();
    const int total = topology.num_agents();
    std::vector<bool> reached(static_cast<size_t>(total), false);
    std::deque<int> frontier;
    for (int i = 0; i < topology.num_leaders; ++i) {
        reached[static_cast<size_t>(i)] = true;
        frontier.push_back(i);
    }
    while (!frontier.empty()) {
        const int j = frontier.front();
        frontier.pop_front();
        // edge j -> i exists iff adjacency(i, j) > 0
        for (int i = 0; i < total; ++i) {
            if (!reached[static_cast<size_t>(i)] && topology.adjacency(i, j) > 0.0) {
                reached[static_cast<size_t>(i)] = true;
                frontier.push_back(i);
            }
        }
    }
    ReachabilityReport report;
    for (int i = topology.num_leaders; i < total; ++i)
        if (!reached[static_cast<size_t>(i)]) report.unreachable_followers.push_back(i);
    report.all_reachable = report.unreachable_followers.empty();
    return report;
}

TopologyCertificate certify_topology(const LaplacianBlocks& blocks) {
    const Eigen::Index n = blocks.l2.rows();
    const Eigen::Index m = blocks.l1.cols();

    TopologyCertificate cert;
    cert.spectrum.l2_eigenvalues = eigenvalues(blocks.l2);
    cert.spectrum.lambda_min_real = std::numeric_limits<double>::infinity();
    for (const auto& ev : cert.spectrum.l2_eigenvalues)
        cert.spectrum.lambda_min_real = std::min(cert.spectrum.lambda_min_real, ev.real());
    if (cert.spectrum.lambda_min_real <= 0.0)
        throw CertificationError("follower coupling block has an eigenvalue with nonpositive real part");

    Eigen::PartialPivLU<Matrix> lu(blocks.l2);
    cert.hull_weights = -lu.solve(blocks.l1);
    for (Eigen::Index i = 0; i < n; ++i) {
        double row_sum = 0.0;
        for (Eigen::Index j = 0; j < m; ++j) {
            if (cert.hull_weights(i, j) < -1e-10)
                throw CertificationError("hull weight matrix has a negative entry");
            row_sum += cert.hull_weights(i, j);
        }
        if (std::abs(row_sum - 1.0) > 1e-9)
            throw CertificationError("hull weight matrix row does not sum to 1");
    }

    Vector follower_degrees = blocks.in_degrees.tail(n);
    Matrix normalizer = (follower_degrees.array() + 1.0).inverse().matrix().asDiagonal();
    cert.spectrum.normalized_eigenvalues = eigenvalues(Matrix(normalizer * blocks.l2));
    double max_dist = 0.0;
    for (const auto& ev : cert.spectrum.normalized_eigenvalues)
        max_dist = std::max(max_dist, std::abs(std::complex<double>(1.0, 0.0) - ev));
    cert.spectrum.gershgorin_margin = 1.0 - max_dist;
    if (cert.spectrum.gershgorin_margin <= 0.0)
        throw CertificationError("normalized spectrum escapes the unit disk centered at 1");

    return cert;
}

}  // namespace containment
