#include "mpx/spectral.hpp"

#include "mpx/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace mpx {

namespace {

/// Columns 2..N of the Householder reflector that maps e₁ onto 1/√N.
Matrix ones_complement(Index n) {
    const double s = 1.0 / std::sqrt(static_cast<double>(n));
    Vector u = Vector::Constant(n, -s);
    u(0) += 1.0;
    const double uu = u.squaredNorm();
    Matrix h = Matrix::Identity(n, n) - (2.0 / uu) * u * u.transpose();
    return h.rightCols(n - 1);
}

void require_laplacian(const Matrix& L, double tol) {
    if (L.rows() != L.cols()) {
        throw Error(ErrorCode::invalid_laplacian, "Laplacian must be square");
    }
    if (L.rows() < 2) {
        throw Error(ErrorCode::invalid_laplacian, "block decomposition needs at least two nodes");
    }
    if (!L.allFinite()) {
        throw Error(ErrorCode::invalid_laplacian, "Laplacian has non-finite entries");
    }
    const double scale = std::max(1.0, L.cwiseAbs().maxCoeff());
    if ((L - L.transpose()).cwiseAbs().maxCoeff() > tol * scale) {
        throw Error(ErrorCode::invalid_laplacian, "Laplacian is not symmetric");
    }
    if (L.rowwise().sum().cwiseAbs().maxCoeff() > tol * scale) {
        throw Error(ErrorCode::invalid_laplacian, "Laplacian rows do not sum to zero");
    }
    for (Index i = 0; i < L.rows(); ++i) {
        for (Index j = 0; j < L.cols(); ++j) {
            if (i != j && L(i, j) > tol * scale) {
                throw Error(ErrorCode::invalid_laplacian, "Laplacian has a positive off-diagonal entry");
            }
        }
    }
}

double max_abs(const Matrix& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

}  // namespace

Matrix SpectralBlocks::R_inv() const {
    const Index n = n_nodes;
    Matrix out(n, n);
    out(0, 0) = r11;
    out.block(0, 1, 1, n - 1) = R12;
    out.block(1, 0, n - 1, 1) = R21;
    out.block(1, 1, n - 1, n - 1) = R22;
    return out;
}

Matrix SpectralBlocks::R() const {
    const Index n = n_nodes;
    const double nn = static_cast<double>(n);
    Matrix out(n, n);
    out.col(0).setOnes();
    out.block(0, 1, 1, n - 1) = nn * R21.transpose();
    out.block(1, 1, n - 1, n - 1) = nn * R22.transpose();
    return out;
}

Matrix SpectralBlocks::lambda_bar() const {
    return eigenvalues.tail(n_nodes - 1).asDiagonal();
}

SpectralBlocks block_decompose(const Matrix& L, double tol) {
    require_laplacian(L, tol);
    const Index n = L.rows();
    const double sqrt_n = std::sqrt(static_cast<double>(n));

    const Matrix q = ones_complement(n);
    const Matrix reduced = q.transpose() * L * q;
    Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (reduced + reduced.transpose()));
    if (solver.info() != Eigen::Success) {
        throw Error(ErrorCode::invalid_laplacian, "eigensolver failed to converge");
    }

    SpectralBlocks b;
    b.n_nodes = n;
    b.basis.resize(n, n);
    b.basis.col(0).setConstant(1.0 / sqrt_n);
    b.basis.rightCols(n - 1) = q * solver.eigenvectors();
    b.eigenvalues.resize(n);
    b.eigenvalues(0) = 0.0;
    b.eigenvalues.tail(n - 1) = solver.eigenvalues();

    b.r11 = 1.0 / static_cast<double>(n);
    b.R12 = Matrix::Constant(1, n - 1, 1.0 / static_cast<double>(n));
    b.R21 = b.basis.block(0, 1, 1, n - 1).transpose() / sqrt_n;
    b.R22 = b.basis.block(1, 1, n - 1, n - 1).transpose() / sqrt_n;
    return b;
}

double PropertyReport::max_residual() const {
    double m = reassembly;
    for (const auto& r : identities) {
        m = std::max(m, r.residual);
    }
    return m;
}

bool PropertyReport::passes(double tol) const {
    return max_residual() < tol;
}

PropertyReport verify_block_properties(const SpectralBlocks& b, Index n_state) {
    if (n_state < 1) {
        throw Error(ErrorCode::invalid_argument, "state dimension must be positive");
    }
    const Index n = b.n_nodes;
    const Index m = n - 1;
    const double nn = static_cast<double>(n);
    const Matrix I_n = Matrix::Identity(n_state, n_state);
    const Matrix I_m = Matrix::Identity(m, m);
    const Matrix ones = Matrix::Ones(m, 1);
    const Matrix J = ones * ones.transpose();

    PropertyReport rep;
    auto add = [&](std::string name, std::string identity, double value) {
        rep.identities.push_back({std::move(name), std::move(identity), value});
    };

    add("block_definition", "r11 = 1/N, R12 = (1/N)1'",
        std::max(std::abs(b.r11 - 1.0 / nn), max_abs(b.R12 - Matrix::Constant(1, m, 1.0 / nn))));

    add("top_row_sum", "r11 I + (R12 1 (x) I) = I",
        max_abs(b.r11 * I_n + kron(b.R12 * ones, I_n) - I_n));

    add("bottom_row_sum", "(R21 (x) I) + (R22 1 (x) I) = 0",
        max_abs(kron(b.R21, I_n) + kron(b.R22 * ones, I_n)));

    add("bottom_gram", "(R21 R21' (x) I) + (R22 R22' (x) I) = (1/N) I",
        max_abs(kron(b.R21 * b.R21.transpose(), I_n) + kron(b.R22 * b.R22.transpose(), I_n) -
                kron(I_m, I_n) / nn));

    add("cross_orthogonality", "r11 (R21' (x) I) + (R12 R22' (x) I) = 0",
        max_abs(b.r11 * kron(b.R21.transpose(), I_n) + kron(b.R12 * b.R22.transpose(), I_n)));

    add("outer_product", "(R21 R21' (x) I) = (R22 11' R22' (x) I)",
        max_abs(kron(b.R21 * b.R21.transpose(), I_n) - kron(b.R22 * J * b.R22.transpose(), I_n)));

    const double r22_norm = spectral_norm(kron(b.R22, I_n));
    add("r22_norm_bound", "||R22 (x) I||_2 <= 1/sqrt(N)",
        std::max(0.0, r22_norm - 1.0 / std::sqrt(nn)));

    const double r21_fro = b.R21.norm();
    const double mid = std::sqrt(static_cast<double>(m)) * spectral_norm(b.R22);
    add("r21_norm_bound", "||R21|| <= sqrt(N-1) ||R22||_2 <= sqrt((N-1)/N)",
        std::max({0.0, r21_fro - mid, mid - std::sqrt(static_cast<double>(m) / nn)}));

    const Matrix r = b.R();
    add("transpose_scaling", "R' = N R^-1",
        max_abs(r.transpose() - nn * r.partialPivLu().inverse()));

    add("r22_inverse", "N R22' = (I + 11')^-1 R22^-1",
        max_abs(nn * b.R22.transpose() - (I_m + J).inverse() * b.R22.fullPivLu().inverse()));

    return rep;
}

PropertyReport verify_block_properties(const SpectralBlocks& b, Index n_state, const Matrix& L) {
    PropertyReport rep = verify_block_properties(b, n_state);
    rep.reassembly = (b.R() * b.eigenvalues.asDiagonal() * b.R_inv() - L).norm();
    return rep;
}

SimilarityTransform similarity_transform(const SpectralBlocks& b1, const Matrix& L2) {
    if (L2.rows() != b1.n_nodes || L2.cols() != b1.n_nodes) {
        throw Error(ErrorCode::dimension_mismatch, "similarity transform: Laplacians differ in size");
    }
    const SpectralBlocks u = block_decompose(L2);
    const Index m = b1.n_nodes - 1;
    const Matrix shift = Matrix::Ones(m, m) + Matrix::Identity(m, m);
    SimilarityTransform out;
    out.T = static_cast<double>(b1.n_nodes) * b1.R22 * shift * u.R22.transpose();
    out.S = out.T * u.lambda_bar() * out.T.transpose();
    return out;
}

Matrix PsiBlocks::assembled() const {
    const Index n = psi11.rows();
    const Index m = psi22.rows();
    Matrix out(n + m, n + m);
    out.topLeftCorner(n, n) = psi11;
    out.topRightCorner(n, m) = psi12;
    out.bottomLeftCorner(m, n) = psi21;
    out.bottomRightCorner(m, m) = psi22;
    return out;
}

PsiBlocks psi_blocks(const std::vector<Matrix>& A_list, const SpectralBlocks& b1) {
    const auto N = static_cast<Index>(A_list.size());
    if (N != b1.n_nodes) {
        throw Error(ErrorCode::dimension_mismatch, "psi blocks: node count differs from the decomposition");
    }
    const Index n = A_list.front().rows();
    for (Index k = 0; k < N; ++k) {
        if (A_list[k].rows() != n || A_list[k].cols() != n) {
            throw Error(ErrorCode::dimension_mismatch,
                        "psi blocks: node " + std::to_string(k + 1) + " has mismatched dynamics");
        }
    }
    const Index m = N - 1;
    const Matrix& A1 = A_list.front();

    PsiBlocks p;
    p.psi11 = Matrix::Zero(n, n);
    for (const auto& a : A_list) {
        p.psi11 += a;
    }
    p.psi11 /= static_cast<double>(N);

    p.P1.resize(n, n * m);
    p.P2.resize(n * m, n);
    p.H = kron(Matrix::Ones(m, m), A1);
    for (Index k = 1; k < N; ++k) {
        const Matrix d = A_list[k] - A1;
        p.P1.block(0, (k - 1) * n, n, n) = d;
        p.P2.block((k - 1) * n, 0, n, n) = d;
        p.H.block((k - 1) * n, (k - 1) * n, n, n) += A_list[k];
    }

    const Matrix r22 = lift(b1.R22, n);
    const Matrix r22t = lift(b1.R22.transpose(), n);
    p.psi12 = p.P1 * r22t;
    p.psi21 = r22 * p.P2;
    p.psi22 = static_cast<double>(N) * r22 * p.H * r22t;
    return p;
}

}  // namespace mpx
