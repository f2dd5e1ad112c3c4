#include "mpx/fixtures.hpp"

#include <array>
#include <cmath>

namespace mpx::fixtures {

namespace {

Matrix mat2(double a, double b, double c, double d) {
    Matrix m(2, 2);
    m << a, b, c, d;
    return m;
}

}  // namespace

MultiplexSystem heterogeneous_eight(const LayerGraph& integral_layer) {
    const Matrix e1 = mat2(0.0, 1.0, -1.0, 0.0);
    const Matrix e2 = mat2(-1.5, 0.0, -1.0, -1.0);
    const Matrix e3 = mat2(1.0, 1.0, 0.0, 0.5);
    const std::array<const Matrix*, 8> types{&e1, &e2, &e1, &e3, &e2, &e3, &e2, &e3};
    const std::array<double, 16> bias{0, 10, 0, 30, 0, 1, 20, 0, 30, 30, 60, 10, -10, 40, 0, 0};

    MultiplexSystem sys{
        .nodes = {},
        .layer_C = LayerGraph::edgeless(8),
        .layer_P = topology::ring(8),
        .layer_I = integral_layer,
        .sigma = 0.0,
        .sigma_P = 19.3,
        .sigma_I = 15.0,
        .local_feedback = {},
    };
    for (std::size_t k = 0; k < types.size(); ++k) {
        Vector b(2);
        b << bias[2 * k], bias[2 * k + 1];
        sys.nodes.push_back({*types[k], b});
    }
    return sys;
}

MultiplexSystem heterogeneous_eight() {
    return heterogeneous_eight(topology::ring(8));
}

// The local gains are chosen so that, with Aᵢ = kᵢ − dᵢ/m,
//   * node 1 has A₁ = 0 and node 3 has the largest rate A₃ = 2;
//   * the mean of the Aᵢ is −2.3875, so ω∞ stays at 60 Hz after the loss;
//   * Σ(Aᵢ − A₁)²/(N|mean|) + max Aᵢ = 6.3991;
//   * nodes 8, 10 and 14 share one rate a and node 5 carries rate b, with
//     (a, b) the solution of the two remaining equations having the larger a.
PowerNetwork sixteen_bus_grid() {
    constexpr double m = 0.2;
    constexpr std::array<double, 16> damping{0.5, 0.45, 0.40, 0.5, 0.6, 0.45, 0.5, 0.5,
                                             0.45, 0.40, 0.5, 0.40, 0.45, 0.5, 0.45, 0.6};
    constexpr std::array<double, 16> injection{40, 30, 30, 22, 10, 20, 50, 35,
                                               50, 20, 30, 25, 30, 20, 17, 30};
    constexpr double mean_rate = -2.3875;
    constexpr double threshold = 6.3991;
    constexpr double top_rate = 2.0;
    constexpr std::size_t N = 16;

    std::array<double, N> rate{};
    for (std::size_t i = 0; i < N; ++i) {
        rate[i] = -damping[i] / m;
    }
    rate[0] = 0.0;
    rate[2] = top_rate;
    const std::array<std::size_t, 3> shared{7, 9, 13};
    constexpr std::size_t lone = 4;

    double fixed_sum = 0.0;
    double fixed_sq = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        if (i == lone || i == shared[0] || i == shared[1] || i == shared[2]) {
            continue;
        }
        fixed_sum += rate[i];
        fixed_sq += rate[i] * rate[i];
    }
    const double S = mean_rate * static_cast<double>(N) - fixed_sum;
    const double Q = (threshold - top_rate) * static_cast<double>(N) * std::abs(mean_rate) - fixed_sq;
    // 3a + b = S, 3a² + b² = Q  ⇒  12a² − 6Sa + S² − Q = 0.
    const double a = (6.0 * S + std::sqrt(36.0 * S * S - 48.0 * (S * S - Q))) / 24.0;
    const double b = S - 3.0 * a;
    for (auto i : shared) {
        rate[i] = a;
    }
    rate[lone] = b;

    PowerNetwork pn{
        .generators = {},
        .lines = {},
        .control_layer = topology::path(N, 200.0),
        .sigma_P = 55.0,
    };
    for (std::size_t i = 0; i < N; ++i) {
        const double k = rate[i] + damping[i] / m;
        pn.generators.push_back({m, damping[i], std::abs(k) < 1e-12 ? 0.0 : k, injection[i], 2000.0});
    }
    // Ring through all buses plus five chords.
    for (std::size_t i = 0; i < N; ++i) {
        pn.lines.push_back({i, (i + 1) % N, 1e-4});
    }
    for (auto [i, j] : std::array<std::pair<std::size_t, std::size_t>, 5>{{{0, 4}, {2, 8}, {5, 11}, {9, 13}, {1, 14}}}) {
        pn.lines.push_back({i, j, 1e-4});
    }
    return pn;
}

PowerScenario sixteen_bus_scenario() {
    PowerScenario sc;
    sc.events = {{0.0, 3, -0.2}, {0.0, 7, -0.2}, {0.0, 9, -0.2}};
    sc.control_on = 0.1;
    sc.t_start = -0.5;
    sc.t_end = 40.0;
    sc.dt = 2.5e-5;
    sc.record_every = 200;
    return sc;
}

}  // namespace mpx::fixtures
