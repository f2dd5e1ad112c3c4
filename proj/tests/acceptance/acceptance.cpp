// One PASS/FAIL line per acceptance criterion; exits nonzero if any fails.

#include "mpx/cli/spec_io.hpp"
#include "mpx/design.hpp"
#include "mpx/fixtures.hpp"
#include "mpx/graph.hpp"
#include "mpx/linalg.hpp"
#include "mpx/power.hpp"
#include "mpx/sim.hpp"
#include "mpx/spectral.hpp"
#include "mpx/stability.hpp"
#include "generators.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace mpx;
using Clock = std::chrono::steady_clock;

constexpr std::uint64_t kSeed = 42;

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

Vector seeded_x0(const MultiplexSystem& sys) {
    const auto n = sys.nodes.front().A.rows();
    return cli::random_initial_state(kSeed, n * static_cast<Index>(sys.nodes.size()));
}

// Shared between criteria 3 and 9.
SimTrace& reference_trace() {
    static SimTrace trace = [] {
        const auto sys = fixtures::heterogeneous_eight();
        return simulate(sys, seeded_x0(sys), {.t_end = 50.0, .dt = 1e-3, .record_every = 1});
    }();
    return trace;
}

void criterion1(Outcome& out) {
    const auto t0 = Clock::now();
    const auto sys = fixtures::heterogeneous_eight();
    const auto c = certificates(sys.effective_dynamics(), 0);
    const double thr = coupling_threshold(c, 8);
    const double l2 = algebraic_connectivity(topology::ring(8));
    const auto tuned = tune(sys, {.anchor = 0});
    const double dt = seconds_since(t0);

    out.detail << std::fixed;
    out.detail.precision(6);
    out.detail << "mu=" << c.mu << " |eta|=" << std::abs(c.eta) << " rho=" << c.rho << " threshold=" << thr
               << " lambda2=" << l2 << " sigma_P_min=" << tuned.sigma_P_min << " time=" << dt << "s";
    out.require(near(c.mu, 59.8328, 1e-3), "mu");
    out.require(near(std::abs(c.eta), 0.3750, 1e-4), "|eta|");
    out.require(near(c.rho, 2.618, 1e-3), "rho");
    out.require(near(thr, 11.2812, 1e-3), "threshold");
    out.require(near(l2, 0.5858, 1e-4), "lambda2");
    out.require(tuned.feasible && tuned.sigma_P_min >= 19.25 && tuned.sigma_P_min <= 19.27, "sigma_P_min");
    out.require(dt < 1.0, "runtime");
}

void criterion2(Outcome& out) {
    const auto sys = fixtures::heterogeneous_eight();
    const auto eq = equilibrium(sys);
    const auto cl = assemble(sys);
    Vector y(eq.x_star.size() + eq.z_star.size());
    y << eq.x_star, eq.z_star;
    const double residual = cl.rhs(y).lpNorm<Eigen::Infinity>();

    out.detail << std::fixed;
    out.detail.precision(6);
    out.detail << "x_inf=[" << eq.x_infinity(0) << ", " << eq.x_infinity(1) << "]";
    out.detail << std::scientific;
    out.detail.precision(2);
    out.detail << " residual=" << residual;
    out.require(near(eq.x_infinity(0), 27.7064, 1e-3) && near(eq.x_infinity(1), -11.6881, 1e-3), "x_inf");
    out.require(residual < 1e-9, "residual");
}

void criterion3(Outcome& out) {
    const auto t0 = Clock::now();
    const auto& trace = reference_trace();
    const double dt = seconds_since(t0);
    const auto sys = fixtures::heterogeneous_eight();
    const Vector x_inf = equilibrium(sys).x_infinity;

    const Vector& xf = trace.states.back();
    double worst = 0.0;
    for (Index k = 0; k < 8; ++k) {
        worst = std::max(worst, (xf.segment(2 * k, 2) - x_inf).lpNorm<Eigen::Infinity>());
    }
    out.detail << std::scientific;
    out.detail.precision(2);
    out.detail << "d_x(50)=" << trace.d_x.back() << " max|x_i-x_inf|=" << worst;
    out.detail << std::fixed;
    out.detail.precision(2);
    out.detail << " time=" << dt << "s";
    out.require(!trace.diverged, "diverged");
    out.require(trace.d_x.back() < 1e-3, "d_x");
    out.require(worst < 1e-2, "node error");
}

void criterion4(Outcome& out) {
    out.detail << std::fixed;
    out.detail.precision(4);
    for (double sp : {5.0, 10.0}) {
        auto sys = fixtures::heterogeneous_eight();
        sys.sigma_P = sp;
        sys.sigma_I = 0.0;
        const auto trace = simulate(sys, seeded_x0(sys), {.t_end = 50.0, .dt = 1e-3, .record_every = 10});
        double max_norm = 0.0;
        for (const auto& x : trace.states) {
            max_norm = std::max(max_norm, x.norm());
        }
        double tail_inf = std::numeric_limits<double>::infinity();
        for (std::size_t s = 0; s < trace.times.size(); ++s) {
            if (trace.times[s] >= 0.8 * 50.0) {
                tail_inf = std::min(tail_inf, trace.d_x[s]);
            }
        }
        out.detail << "sigma_P=" << sp << ": max|x|=" << max_norm << " inf d_x(last 20%)=" << tail_inf << "  ";
        out.require(!trace.diverged && std::isfinite(max_norm), "bounded");
        out.require(tail_inf > 0.1, "no consensus");
    }
}

void criterion5(Outcome& out) {
    const auto t0 = Clock::now();
    const auto grid_P = cell_centres(0.0, 40.0, 20);
    const auto grid_I = cell_centres(0.0, 40.0, 20);
    const std::vector<std::pair<const char*, LayerGraph>> layers{
        {"complete", topology::complete(8)},
        {"star", topology::star(8)},
        {"ring", topology::ring(8)},
        {"tree", topology::binary_tree(8)},
    };

    std::vector<std::vector<CellClass>> classes;
    std::size_t certified = 0;
    std::size_t violations = 0;
    std::size_t errors = 0;
    for (const auto& [name, layer] : layers) {
        auto sys = fixtures::heterogeneous_eight(layer);
        const auto result = sweep(sys, grid_P, grid_I, 1);
        std::vector<CellClass> cls;
        std::size_t stable = 0;
        for (std::size_t p = 0; p < grid_P.size(); ++p) {
            for (std::size_t i = 0; i < grid_I.size(); ++i) {
                const auto& cell = result.at(p, i);
                errors += cell.error.empty() ? 0 : 1;
                cls.push_back(cell.classification);
                stable += cell.classification == CellClass::stable ? 1 : 0;
                sys.sigma_P = grid_P[p];
                sys.sigma_I = grid_I[i];
                const bool fixed = check_theorem(sys, {.anchor = 0}).passes();
                const bool best = check_theorem(sys, {.optimize_anchor = true}).passes();
                if (fixed || best) {
                    ++certified;
                    violations += cell.abscissa < 0.0 ? 0 : 1;
                }
            }
        }
        out.detail << name << ":" << stable << " stable  ";
        classes.push_back(std::move(cls));
    }
    std::size_t differing = 0;
    for (std::size_t c = 0; c < classes.front().size(); ++c) {
        for (std::size_t t = 1; t < classes.size(); ++t) {
            if (classes[t][c] != classes[0][c]) {
                ++differing;
                break;
            }
        }
    }
    const double dt = seconds_since(t0);
    out.detail << "certified=" << certified << " violations=" << violations << " differing_cells=" << differing;
    out.detail << std::fixed;
    out.detail.precision(2);
    out.detail << " time=" << dt << "s";
    out.require(errors == 0, "cell errors");
    out.require(certified > 0, "some cell certified");
    out.require(violations == 0, "certified cells stable");
    out.require(differing > 0, "topology effect");
    out.require(dt < 60.0, "runtime");
}

void criterion6(Outcome& out, PowerTrace& trace) {
    const auto t0 = Clock::now();
    const auto pn = fixtures::sixteen_bus_grid();
    const auto report = check_power(pn);

    auto open_loop = pn;
    for (auto& g : open_loop.generators) {
        g.k = 0.0;
    }
    const double omega_open = equilibrium_frequency(open_loop);

    auto disturbed = pn;
    for (const auto& e : fixtures::sixteen_bus_scenario().events) {
        disturbed.generators[e.node].P += e.delta;
    }
    const double omega_disturbed = equilibrium_frequency(disturbed);

    trace = simulate_power(pn, fixtures::sixteen_bus_scenario());
    const double dt = seconds_since(t0);

    out.detail << std::fixed;
    out.detail.precision(6);
    out.detail << "psi11=" << report.psi11 << " threshold=" << report.threshold
               << " sigma_P_bound=" << report.sigma_P_bound;
    out.detail << std::scientific;
    out.detail.precision(2);
    out.detail << " |omega_open-60|=" << std::abs(omega_open - 60.0)
               << " |omega_disturbed-60|=" << std::abs(omega_disturbed - 60.0)
               << " final_dev=" << trace.final_max_deviation;
    out.detail << std::fixed;
    out.detail.precision(4);
    out.detail << " peak_dev=" << trace.peak_deviation << "Hz";
    out.detail.precision(2);
    out.detail << " time=" << dt << "s";
    out.require(near(report.psi11, -2.3875, 1e-4), "psi11");
    out.require(near(report.threshold, 6.3991, 1e-3), "threshold");
    out.require(near(report.sigma_P_bound, 0.8326, 1e-3), "sigma_P bound");
    out.require(report.passes(), "conditions at sigma_P = 55");
    out.require(near(omega_open, 60.0, 1e-9), "omega k=0");
    out.require(near(omega_disturbed, 60.0, 1e-9), "omega disturbed");
    out.require(near(trace.nominal_frequency, 60.0, 1e-9), "nominal");
    out.require(!trace.diverged && trace.final_max_deviation < 1e-3, "demo deviation");
}

void criterion7(Outcome& out) {
    const auto t0 = Clock::now();
    test::Rng rng(kSeed);
    double worst_identity = 0.0;
    double worst_orth = 0.0;
    double worst_sim = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const auto N = rng.index(2, 50);
        const Matrix L1 = laplacian(test::random_connected_graph(rng, N));
        const Matrix L2 = laplacian(test::random_connected_graph(rng, N));
        const auto b1 = block_decompose(L1);
        const auto n_state = static_cast<Index>(rng.index(1, 3));
        worst_identity = std::max(worst_identity, verify_block_properties(b1, n_state, L1).max_residual());

        const auto st = similarity_transform(b1, L2);
        const auto M = static_cast<Index>(N) - 1;
        worst_orth = std::max(worst_orth, max_abs_diff(st.T * st.T.transpose(), Matrix::Identity(M, M)));
        Matrix expected = Matrix::Zero(M + 1, M + 1);
        expected.bottomRightCorner(M, M) = st.S;
        worst_sim = std::max(worst_sim, max_abs_diff(b1.R_inv() * L2 * b1.R(), expected));
    }
    const double dt = seconds_since(t0);
    out.detail << std::scientific;
    out.detail.precision(2);
    out.detail << "identities=" << worst_identity << " orthogonality=" << worst_orth << " similarity=" << worst_sim;
    out.detail << std::fixed;
    out.detail << " time=" << dt << "s";
    out.require(worst_identity < 1e-9, "identities");
    out.require(worst_orth < 1e-9, "orthogonality");
    out.require(worst_sim < 1e-9, "similarity");
    out.require(dt < 30.0, "runtime");
}

void criterion8(Outcome& out) {
    const auto t0 = Clock::now();
    test::Rng rng(kSeed + 8);
    std::size_t stable = 0;
    std::size_t unstable = 0;
    std::size_t excluded = 0;
    std::size_t disagreements = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const auto N = rng.index(2, 6);
        const auto n = static_cast<Index>(rng.index(1, 2));
        const double shift = rng.uniform(-1.0, 1.0);
        const double sp = rng.uniform(0.0, 6.0);
        const double si = rng.uniform(0.0, 6.0);
        const auto sys = test::random_system(rng, N, n, shift, 1.0, sp, si);
        const double a = error_system(sys).abscissa();
        std::vector<Vector> starts;
        for (int r = 0; r < 10; ++r) {
            starts.push_back(test::random_vector(rng, n * static_cast<Index>(N), -10.0, 10.0));
        }
        if (std::abs(a) < 1e-4) {
            ++excluded;
            continue;
        }
        const double radius = assemble(sys).state_matrix.eigenvalues().cwiseAbs().maxCoeff();
        const SimOptions opts{
            .t_end = 30.0 / std::abs(a) + 10.0,
            .dt = std::min(0.05, 0.5 / std::max(radius, 1e-12)),
            .record_every = std::numeric_limits<std::size_t>::max(),
        };
        std::size_t converged = 0;
        for (const auto& x0 : starts) {
            const auto trace = simulate(sys, x0, opts);
            converged += !trace.diverged && trace.d_x.back() < 1e-3 ? 1 : 0;
        }
        if (a < 0.0) {
            ++stable;
            disagreements += converged == starts.size() ? 0 : 1;
        } else {
            ++unstable;
            disagreements += converged == 0 ? 0 : 1;
        }
    }
    const double dt = seconds_since(t0);
    out.detail << "stable=" << stable << " unstable=" << unstable << " excluded=" << excluded
               << " disagreements=" << disagreements;
    out.detail << std::fixed;
    out.detail.precision(2);
    out.detail << " time=" << dt << "s";
    out.require(disagreements == 0, "sign agreement");
    out.require(stable > 0 && unstable > 0, "both classes sampled");
}

void criterion9(Outcome& out, const PowerTrace& power) {
    const auto& trace = reference_trace();
    double worst = 0.0;
    for (const auto& z : trace.integrals) {
        Vector sum = Vector::Zero(2);
        for (Index k = 0; k < 8; ++k) {
            sum += z.segment(2 * k, 2);
        }
        worst = std::max(worst, sum.norm());
    }
    out.detail << std::scientific;
    out.detail.precision(2);
    out.detail << "max|(1'(x)I)z|=" << worst << " max|v'z|=" << power.max_conservation_error;
    out.require(worst < 1e-6, "integral sum");
    out.require(power.max_conservation_error < 1e-6, "mass-weighted sum");
}

Vector final_state(const MultiplexSystem& sys, const Vector& x0, double dt) {
    const auto trace = simulate(sys, x0, {.t_end = 5.0, .dt = dt, .record_every = std::numeric_limits<std::size_t>::max()});
    Vector y(trace.states.back().size() * 2);
    y << trace.states.back(), trace.integrals.back();
    return y;
}

void criterion10(Outcome& out) {
    const auto sys = fixtures::heterogeneous_eight();
    const Vector x0 = seeded_x0(sys);
    const double h = 0.01;
    const Vector reference = final_state(sys, x0, h / 2.0 / 8.0);
    const double e1 = (final_state(sys, x0, h) - reference).norm();
    const double e2 = (final_state(sys, x0, h / 2.0) - reference).norm();
    const double ratio = e1 / e2;
    out.detail << std::scientific;
    out.detail.precision(3);
    out.detail << "err(0.01)=" << e1 << " err(0.005)=" << e2;
    out.detail << std::fixed;
    out.detail << " ratio=" << ratio;
    out.require(ratio >= 12.0 && ratio <= 20.0, "ratio");
}

}  // namespace

int main() {
    PowerTrace power;
    const std::vector<std::pair<const char*, std::function<void(Outcome&)>>> criteria{
        {"certificates", criterion1},
        {"equilibrium", criterion2},
        {"convergence", criterion3},
        {"proportional-only", criterion4},
        {"sweep sufficiency", criterion5},
        {"power grid", [&](Outcome& o) { criterion6(o, power); }},
        {"block identities", criterion7},
        {"abscissa oracle", criterion8},
        {"conservation", [&](Outcome& o) { criterion9(o, power); }},
        {"rk4 order", criterion10},
    };

    int failures = 0;
    int index = 1;
    for (const auto& [name, run] : criteria) {
        Outcome out;
        try {
            run(out);
        } catch (const std::exception& e) {
            out.pass = false;
            out.detail << " [exception: " << e.what() << "]";
        }
        failures += out.pass ? 0 : 1;
        std::printf("%s %2d %-18s %s\n", out.pass ? "PASS" : "FAIL", index++, name, out.detail.str().c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
