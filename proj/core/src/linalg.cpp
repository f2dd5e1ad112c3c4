#include "mpx/linalg.hpp"

#include "mpx/errors.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <limits>

namespace mpx {

Matrix kron(const Matrix& a, const Matrix& b) {
    return Eigen::kroneckerProduct(a, b).eval();
}

Matrix lift(const Matrix& m, Index n) {
    return kron(m, Matrix::Identity(n, n));
}

Matrix block_diagonal(std::span<const Matrix> blocks) {
    Index total = 0;
    for (const auto& b : blocks) {
        if (b.rows() != b.cols()) {
            throw Error(ErrorCode::dimension_mismatch, "block_diagonal: blocks must be square");
        }
        total += b.rows();
    }
    Matrix out = Matrix::Zero(total, total);
    Index offset = 0;
    for (const auto& b : blocks) {
        out.block(offset, offset, b.rows(), b.cols()) = b;
        offset += b.rows();
    }
    return out;
}

Matrix symmetric_part(const Matrix& m) {
    return m + m.transpose();
}

double max_eigenvalue_symmetric(const Matrix& s) {
    if (s.size() == 0) {
        return -std::numeric_limits<double>::infinity();
    }
    Eigen::SelfAdjointEigenSolver<Matrix> solver(s, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().maxCoeff();
}

Vector eigenvalues_symmetric(const Matrix& s) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(s, Eigen::EigenvaluesOnly);
    return solver.eigenvalues();
}

double spectral_abscissa(const Matrix& m) {
    if (m.size() == 0) {
        return -std::numeric_limits<double>::infinity();
    }
    Eigen::EigenSolver<Matrix> solver(m, false);
    if (solver.info() != Eigen::Success) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    return solver.eigenvalues().real().maxCoeff();
}

double spectral_norm(const Matrix& m) {
    if (m.size() == 0) {
        return 0.0;
    }
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues()(0);
}

double min_singular_value(const Matrix& m) {
    if (m.size() == 0) {
        return 0.0;
    }
    Eigen::JacobiSVD<Matrix> svd(m);
    const auto& s = svd.singularValues();
    return s(s.size() - 1);
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw Error(ErrorCode::dimension_mismatch, "max_abs_diff: shape mismatch");
    }
    if (a.size() == 0) {
        return 0.0;
    }
    return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace mpx
