#pragma once

// Orthonormal block factorization of graph Laplacians and the transformed
// node-dynamics blocks built on top of it.
//
// For a Laplacian L on N nodes with orthonormal eigenbasis V whose first
// column is 1/√N, the scaled basis R = √N·V gives L = R·Λ·R⁻¹ with
//
//     R⁻¹ = | r11  R12 |      r11 = 1/N,  R12 = (1/N)·1ᵀ,
//           | R21  R22 |      R21 = V12ᵀ/√N,  R22 = V22ᵀ/√N.

#include "mpx/linalg.hpp"

#include <string>
#include <vector>

namespace mpx {

struct SpectralBlocks {
    Index n_nodes = 0;
    double r11 = 0.0;
    Matrix R12;  // 1 × (N−1)
    Matrix R21;  // (N−1) × 1
    Matrix R22;  // (N−1) × (N−1)
    Vector eigenvalues;  // ascending, eigenvalues(0) = 0
    Matrix basis;        // V, orthonormal, first column 1/√N

    /// R⁻¹ assembled from the four blocks.
    Matrix R_inv() const;

    /// R = | 1   N·R21ᵀ |
    ///     | 1   N·R22ᵀ |
    Matrix R() const;

    /// diag(λ₂ … λ_N).
    Matrix lambda_bar() const;
};

/// Throws Error(invalid_laplacian) unless L is square, symmetric, has zero
/// row sums and non-positive off-diagonal entries (relative tolerance tol).
/// Requires N ≥ 2.
///
/// The basis is built by deflation: a fixed Householder complement Q of 1
/// reduces L to QᵀLQ, whose eigenvectors W give V = [1/√N, Q·W]. Repeated
/// and zero eigenvalues need no special treatment and the result is
/// deterministic for a given input.
SpectralBlocks block_decompose(const Matrix& L, double tol = 1e-9);

struct PropertyResidual {
    std::string name;
    std::string identity;
    double residual = 0.0;
};

struct PropertyReport {
    std::vector<PropertyResidual> identities;
    /// ‖R·Λ·R⁻¹ − L‖_F; only set when the source Laplacian is supplied.
    double reassembly = 0.0;

    double max_residual() const;
    bool passes(double tol = 1e-9) const;
};

/// Evaluates each structural identity of the decomposition at state
/// dimension n_state. Norm bounds report the amount by which they are
/// exceeded (0 when satisfied).
PropertyReport verify_block_properties(const SpectralBlocks& b, Index n_state);

/// Same, with the reassembly residual against L.
PropertyReport verify_block_properties(const SpectralBlocks& b, Index n_state, const Matrix& L);

struct SimilarityTransform {
    Matrix T;  // orthogonal, (N−1) × (N−1)
    Matrix S;  // T·Λ̄₂·Tᵀ
};

/// R⁻¹·L2·R = blockdiag(0, S) with T = N·R22·(11ᵀ + I)·U22ᵀ, where U are the
/// blocks of L2 itself.
SimilarityTransform similarity_transform(const SpectralBlocks& b1, const Matrix& L2);

struct PsiBlocks {
    Matrix psi11;  // n × n
    Matrix psi12;  // n × n(N−1)
    Matrix psi21;  // n(N−1) × n
    Matrix psi22;  // n(N−1) × n(N−1)
    Matrix P1;     // [A₂−A₁ … A_N−A₁]
    Matrix P2;     // [A₂−A₁; … ; A_N−A₁]
    Matrix H;      // (11ᵀ⊗A₁) + blockdiag(A₂ … A_N)

    Matrix assembled() const;
};

/// Blocks of (R⁻¹⊗I)·blockdiag(A_k)·(R⊗I) in closed form.
PsiBlocks psi_blocks(const std::vector<Matrix>& A_list, const SpectralBlocks& b1);

}  // namespace mpx
