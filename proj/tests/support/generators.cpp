#include "generators.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

namespace mpx::test {

LayerGraph random_connected_graph(Rng& rng, std::size_t n, double extra, double w_lo, double w_hi) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t k = n; k > 1; --k) {
        std::swap(order[k - 1], order[rng.index(0, k - 1)]);
    }
    std::vector<std::vector<bool>> used(n, std::vector<bool>(n, false));
    std::vector<Edge> edges;
    for (std::size_t k = 1; k < n; ++k) {
        const std::size_t a = order[k];
        const std::size_t b = order[rng.index(0, k - 1)];
        used[a][b] = used[b][a] = true;
        edges.push_back({a, b, rng.uniform(w_lo, w_hi)});
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (!used[i][j] && rng.chance(extra)) {
                edges.push_back({i, j, rng.uniform(w_lo, w_hi)});
            }
        }
    }
    return LayerGraph(n, std::move(edges));
}

LayerGraph random_graph(Rng& rng, std::size_t n, double p, double w_lo, double w_hi) {
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (rng.chance(p)) {
                edges.push_back({i, j, rng.uniform(w_lo, w_hi)});
            }
        }
    }
    return LayerGraph(n, std::move(edges));
}

Matrix random_matrix(Rng& rng, Index rows, Index cols, double lo, double hi) {
    Matrix m(rows, cols);
    for (Index i = 0; i < rows; ++i) {
        for (Index j = 0; j < cols; ++j) {
            m(i, j) = rng.uniform(lo, hi);
        }
    }
    return m;
}

Vector random_vector(Rng& rng, Index n, double lo, double hi) {
    Vector v(n);
    for (Index i = 0; i < n; ++i) {
        v(i) = rng.uniform(lo, hi);
    }
    return v;
}

MultiplexSystem random_system(Rng& rng, std::size_t N, Index n, double shift, double spread,
                              double sigma_P, double sigma_I) {
    MultiplexSystem sys{
        .nodes = {},
        .layer_C = LayerGraph::edgeless(N),
        .layer_P = random_connected_graph(rng, N),
        .layer_I = random_connected_graph(rng, N),
        .sigma = 0.0,
        .sigma_P = sigma_P,
        .sigma_I = sigma_I,
        .local_feedback = {},
    };
    for (std::size_t k = 0; k < N; ++k) {
        Matrix A = random_matrix(rng, n, n, -spread, spread);
        A.diagonal().array() += shift;
        sys.nodes.push_back({A, random_vector(rng, n, -5.0, 5.0)});
    }
    return sys;
}

}  // namespace mpx::test
