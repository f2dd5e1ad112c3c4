#include "oracles.hpp"

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace mpx::test {

namespace {

Vector sorted(Vector v) {
    std::sort(v.begin(), v.end());
    return v;
}

}  // namespace

Vector ring_spectrum(Index n, double w) {
    Vector v(n);
    for (Index k = 0; k < n; ++k) {
        v(k) = 2.0 * w * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n)));
    }
    return sorted(v);
}

Vector path_spectrum(Index n, double w) {
    Vector v(n);
    for (Index k = 0; k < n; ++k) {
        v(k) = 2.0 * w * (1.0 - std::cos(std::numbers::pi * static_cast<double>(k) / static_cast<double>(n)));
    }
    return sorted(v);
}

Vector star_spectrum(Index n, double w) {
    Vector v = Vector::Constant(n, w);
    v(0) = 0.0;
    v(n - 1) = w * static_cast<double>(n);
    return v;
}

Vector complete_spectrum(Index n, double w) {
    Vector v = Vector::Constant(n, w * static_cast<double>(n));
    v(0) = 0.0;
    return v;
}

bool connected_union_find(const LayerGraph& g) {
    std::vector<std::size_t> parent(g.node_count());
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    std::size_t components = g.node_count();
    for (const auto& e : g.edges()) {
        const auto a = find(e.i);
        const auto b = find(e.j);
        if (a != b) {
            parent[a] = b;
            --components;
        }
    }
    return components <= 1;
}

Matrix psi_by_congruence(const std::vector<Matrix>& A_list, const SpectralBlocks& b) {
    const Index n = A_list.front().rows();
    const Index N = static_cast<Index>(A_list.size());
    Matrix Ahat = Matrix::Zero(n * N, n * N);
    for (Index k = 0; k < N; ++k) {
        Ahat.block(k * n, k * n, n, n) = A_list[static_cast<std::size_t>(k)];
    }
    const Matrix Rinv = b.R_inv();
    const Matrix R = Rinv.inverse();
    const Matrix I = Matrix::Identity(n, n);
    return Eigen::kroneckerProduct(Rinv, I).eval() * Ahat * Eigen::kroneckerProduct(R, I).eval();
}

Vector affine_flow(const Matrix& M, const Vector& c, const Vector& y0, double t) {
    const Index d = M.rows();
    Matrix aug = Matrix::Zero(d + 1, d + 1);
    aug.topLeftCorner(d, d) = M * t;
    aug.topRightCorner(d, 1) = c * t;
    const Matrix E = aug.exp();
    return E.topLeftCorner(d, d) * y0 + E.topRightCorner(d, 1);
}

double mu_direct(const std::vector<Matrix>& A_list, std::size_t anchor) {
    const Matrix Sa = A_list[anchor] + A_list[anchor].transpose();
    const Index n = Sa.rows();
    Matrix acc = Matrix::Zero(n, n);
    for (std::size_t k = 0; k < A_list.size(); ++k) {
        if (k == anchor) {
            continue;
        }
        const Matrix d = A_list[k] + A_list[k].transpose() - Sa;
        acc += d * d;
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(acc, Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff();
}

std::size_t anchor_scan(const std::vector<Matrix>& A_list) {
    std::size_t best = 0;
    double best_mu = mu_direct(A_list, 0);
    for (std::size_t a = 1; a < A_list.size(); ++a) {
        const double mu = mu_direct(A_list, a);
        if (mu < best_mu) {
            best = a;
            best_mu = mu;
        }
    }
    return best;
}

Matrix restricted_closed_loop(const ClosedLoopSystem& cl) {
    const Index n = cl.dim;
    const Index N = cl.nodes;
    const Index total = 2 * n * N;
    Matrix C = Matrix::Zero(total, n);
    for (Index k = 0; k < N; ++k) {
        C.block(n * N + k * n, 0, n, n) = Matrix::Identity(n, n);
    }
    Eigen::HouseholderQR<Matrix> qr(C);
    const Matrix Q = qr.householderQ() * Matrix::Identity(total, total);
    const Matrix B = Q.rightCols(total - n);
    return B.transpose() * cl.state_matrix * B;
}

std::vector<std::complex<double>> sorted_eigenvalues(const Matrix& m) {
    Eigen::EigenSolver<Matrix> es(m, false);
    std::vector<std::complex<double>> ev(es.eigenvalues().begin(), es.eigenvalues().end());
    std::sort(ev.begin(), ev.end(), [](auto a, auto b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    return ev;
}

}  // namespace mpx::test
