#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace containment {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;

/// Kronecker product A ⊗ B.
inline Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

/// Anti-diagonal permutation (index reversal). J*A*J flips a matrix about both axes.
inline Matrix reversal(Eigen::Index n) {
    Matrix j = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        j(i, n - 1 - i) = 1.0;
    return j;
}

inline std::vector<std::complex<double>> eigenvalues(const Matrix& a) {
    Eigen::EigenSolver<Matrix> es(a, /*computeEigenvectors=*/false);
    std::vector<std::complex<double>> out(static_cast<size_t>(a.rows()));
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        out[static_cast<size_t>(i)] = es.eigenvalues()(i);
    return out;
}

inline std::vector<std::complex<double>> eigenvalues(const ComplexMatrix& a) {
    Eigen::ComplexEigenSolver<ComplexMatrix> es(a, /*computeEigenvectors=*/false);
    std::vector<std::complex<double>> out(static_cast<size_t>(a.rows()));
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        out[static_cast<size_t>(i)] = es.eigenvalues()(i);
    return out;
}

inline double max_real_part(const std::vector<std::complex<double>>& eigs) {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& e : eigs) m = std::max(m, e.real());
    return m;
}

inline double spectral_radius(const std::vector<std::complex<double>>& eigs) {
    double m = 0.0;
    for (const auto& e : eigs) m = std::max(m, std::abs(e));
    return m;
}

inline double min_eigenvalue_symmetric(const Matrix& a) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(a, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

}  // namespace containment
