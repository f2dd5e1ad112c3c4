#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace mpx {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// A ⊗ B.
Matrix kron(const Matrix& a, const Matrix& b);

/// M ⊗ I_n, the lift of an N×N node-level matrix to stacked n-dimensional states.
Matrix lift(const Matrix& m, Index n);

/// blockdiag(blocks...), all blocks square.
Matrix block_diagonal(std::span<const Matrix> blocks);

/// M + Mᵀ.
Matrix symmetric_part(const Matrix& m);

/// Largest eigenvalue of a symmetric matrix.
double max_eigenvalue_symmetric(const Matrix& s);

/// Ascending eigenvalues of a symmetric matrix.
Vector eigenvalues_symmetric(const Matrix& s);

/// max Re λ(M).
double spectral_abscissa(const Matrix& m);

double spectral_norm(const Matrix& m);

double min_singular_value(const Matrix& m);

/// Largest absolute entry of a - b.
double max_abs_diff(const Matrix& a, const Matrix& b);

}  // namespace mpx
