#include "generators.hpp"
#include "oracles.hpp"

#include "mpx/design.hpp"
#include "mpx/errors.hpp"
#include "mpx/sim.hpp"
#include "mpx/spectral.hpp"

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

using namespace mpx;

TEST_CASE("decomposition identities up to fifty nodes") {
    test::Rng rng(0xB10C);
    for (int trial = 0; trial < 120; ++trial) {
        const std::size_t N = rng.index(2, 50);
        const auto g = test::random_connected_graph(rng, N, rng.uniform(0.0, 0.3), 0.1, 5.0);
        const Matrix L = laplacian(g);
        const auto b = block_decompose(L);
        const auto r = verify_block_properties(b, static_cast<Index>(rng.index(1, 3)), L);
        INFO("N = " << N);
        for (const auto& p : r.identities) {
            INFO(p.name);
            CHECK(p.residual < 1e-9);
        }
        CHECK(r.reassembly < 1e-9);
        CHECK(b.eigenvalues(1) > 1e-9);
        CHECK(std::is_sorted(b.eigenvalues.begin(), b.eigenvalues.end()));
    }
}

TEST_CASE("similarity transforms preserve the second spectrum") {
    test::Rng rng(0x51A);
    for (int trial = 0; trial < 80; ++trial) {
        const std::size_t N = rng.index(2, trial < 60 ? 10 : 40);
        const Matrix L1 = laplacian(test::random_connected_graph(rng, N));
        const Matrix L2 = laplacian(test::random_connected_graph(rng, N, 0.4, 0.1, 4.0));
        const auto b1 = block_decompose(L1);
        const auto st = similarity_transform(b1, L2);
        const Index m = static_cast<Index>(N) - 1;
        CHECK(max_abs_diff(st.T * st.T.transpose(), Matrix::Identity(m, m)) < 1e-9);
        CHECK((st.S - st.S.transpose()).norm() < 1e-10);
        const Vector expected = eigenvalues_symmetric(L2).tail(m);
        CHECK(max_abs_diff(eigenvalues_symmetric(st.S), expected) < 1e-8);
        Matrix target = Matrix::Zero(m + 1, m + 1);
        target.bottomRightCorner(m, m) = st.S;
        CHECK(max_abs_diff(b1.R_inv() * L2 * b1.R(), target) < 1e-9);
    }
}

TEST_CASE("certified systems have stable error dynamics") {
    test::Rng rng(0x5AFE);
    int certified = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t N = rng.index(2, 10);
        const Index n = static_cast<Index>(rng.index(1, 3));
        auto sys = test::random_system(rng, N, n, rng.uniform(-2.0, 0.5), rng.uniform(0.2, 1.5), 1.0,
                                       rng.uniform(0.05, 10.0));
        if (rng.chance(0.3)) {
            sys.layer_C = test::random_connected_graph(rng, N);
            sys.sigma = rng.uniform(0.0, 2.0);
        }
        // Half of the draws put σ_P just above the certified minimum, the rest anywhere.
        if (rng.chance(0.5)) {
            try {
                const auto t = tune(sys);
                if (!std::isfinite(t.sigma_P_min)) {
                    continue;
                }
                sys.sigma_P = std::max(t.sigma_P_min, 1e-3) * rng.uniform(1.001, 2.0);
            } catch (const Error&) {
                sys.sigma_P = rng.uniform(0.0, 30.0);
            }
        } else {
            sys.sigma_P = rng.uniform(0.0, 30.0);
        }
        const auto report = check_theorem(sys, CheckOptions{.anchor = 0, .optimize_anchor = true});
        const double a = error_system(sys).abscissa();
        if (report.passes()) {
            ++certified;
            INFO("trial " << trial << " abscissa " << a);
            CHECK(a < 0.0);
        }
    }
    CHECK(certified >= 40);
}
