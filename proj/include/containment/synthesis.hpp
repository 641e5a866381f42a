#pragma once

#include <complex>
#include <vector>

#include "containment/linalg.hpp"
#include "containment/topology.hpp"

namespace containment {

enum class Domain { Continuous, Discrete };

// ============================================================================
// Chain-of-integrators plant in companion form: A is the q x q upper shift,
// B the last unit vector. In the discrete domain the recursion matrix is
// A_hat = I + A.
// ============================================================================
struct CompanionPlant {
    int order = 0;
    Domain mode = Domain::Continuous;
    Matrix a;      // upper shift
    Matrix a_hat;  // I + a (discrete recursion matrix)
    Vector b;      // e_q

    static CompanionPlant make(int order, Domain mode);
};

// Riccati solution P with the scalar ε and the resulting row gain
// K = (κ_{q-1}, ..., κ_0).
struct GainSynthesis {
    Matrix p;
    double epsilon = 0.0;
    Eigen::RowVectorXd k;
    double residual = 0.0;  // Frobenius residual of the solved equation
    double margin = 0.0;    // closed-loop stability margin once certified
    bool certified = false;
};

struct EstimatorGainSynthesis {
    Matrix p;
    double epsilon = 0.0;
    Vector k;  // column gain, length m
    double residual = 0.0;
    Domain mode = Domain::Continuous;
};

struct SynthesisError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ----------------------------------------------------------------------------
// Continuous domain
// ----------------------------------------------------------------------------

/// Stabilizing solution of A'P + PA + I - PBB'P = 0 by Newton-Kleinman
/// iteration. The initial gain places every closed-loop pole at -1, which is
/// stabilizing by construction for the companion pair; each Newton step solves
/// a Lyapunov equation through its Kronecker-vectorized linear system.
/// Throws SynthesisError when the residual fails to reach 1e-8.
Matrix care_solve(const CompanionPlant& plant);

/// ε = 0.5 max{1, σ_min^-1} with σ_min = 0.99 λ_min, λ_min the smallest real
/// part over the follower coupling spectrum. Throws when λ_min <= 0.
double epsilon_continuous(const SpectrumReport& spectrum);

/// K = ε B'P (ε times the last row of P).
GainSynthesis continuous_gain(const Matrix& p, double epsilon, const CompanionPlant& plant);

// ----------------------------------------------------------------------------
// Discrete domain
// ----------------------------------------------------------------------------

/// Fixed point of P <- Ahat'P Ahat - (1-ε²) Ahat'PB (B'PB)^-1 B'P Ahat + I
/// started from P = I, iterated until the Frobenius change drops below 1e-10.
/// Requires ε in (0, 1); the +I offset makes the strict matrix inequality hold
/// with margin 1 at the fixed point. Throws on non-convergence.
Matrix modified_dare_solve(const CompanionPlant& plant, double epsilon);

/// K = (B'PB)^-1 B'P Ahat.
GainSynthesis discrete_gain(const Matrix& p, double epsilon, const CompanionPlant& plant);

/// Midpoint of the admissible interval (max|1 - λ̂_i|, 1) for the normalized
/// spectrum. Throws when the interval is empty.
double epsilon_discrete(const SpectrumReport& spectrum);

/// Uniform normalization constant: grid search over μ in (0,1) minimizing
/// max_i |1 - μ λ_i| over the raw coupling spectrum. Returns (μ, attained max).
std::pair<double, double> uniform_weight_search(const std::vector<std::complex<double>>& l2_eigenvalues);

// ----------------------------------------------------------------------------
// Estimators (dual Riccati solves)
// ----------------------------------------------------------------------------

/// K_e = ε P G' where P solves Ebar P + P Ebar' + I - P G'G P = 0 with
/// G = (1, 0, ..., 0). Solved through the index-reversal duality with
/// care_solve and certified against the estimator-side residual directly.
EstimatorGainSynthesis estimator_gain_continuous(int order, double epsilon);

/// K_e = Etilde P G' (G P G')^-1 with P the fixed point of the transposed
/// modified Riccati recursion (roles of B and G swapped), again obtained by
/// reversal duality and re-certified on the estimator side.
EstimatorGainSynthesis estimator_gain_discrete(int order, double epsilon);

// ----------------------------------------------------------------------------
// Closed-loop certification
// ----------------------------------------------------------------------------

/// Continuous: margin = -max Re spec(I_N⊗A - L2⊗BK)  (positive ⇒ certified).
/// Discrete:   margin = 1 - ρ(I_N⊗Ahat - L̂2⊗BK) with L̂2 the normalized
/// coupling block. Margins are reported, never thrown.
double verify_closed_loop(const Matrix& coupling, const CompanionPlant& plant,
                          const Eigen::RowVectorXd& k);

/// Same certification done one coupling eigenvalue at a time
/// (A - λ_i BK blockwise); agrees with the Kronecker form by Schur decomposition.
double verify_closed_loop_blockwise(const std::vector<std::complex<double>>& coupling_eigenvalues,
                                    const CompanionPlant& plant, const Eigen::RowVectorXd& k);

/// Observer-side margin for Ebar - λ_i K_e G (continuous) or
/// Etilde - λ̂_i K_e G (discrete).
double verify_estimator_loop(const std::vector<std::complex<double>>& coupling_eigenvalues,
                             const EstimatorGainSynthesis& estimator);

}  // namespace containment
