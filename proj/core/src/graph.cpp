#include "mpx/graph.hpp"

#include "mpx/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <string>
#include <utility>

namespace mpx {

namespace {

std::string edge_label(const Edge& e) {
    return "(" + std::to_string(e.i + 1) + ", " + std::to_string(e.j + 1) + ")";
}

class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n) {
        std::iota(parent_.begin(), parent_.end(), std::size_t{0});
    }

    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    bool unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) {
            return false;
        }
        parent_[std::max(a, b)] = std::min(a, b);
        return true;
    }

private:
    std::vector<std::size_t> parent_;
};

}  // namespace

LayerGraph::LayerGraph(std::size_t node_count, std::vector<Edge> edges)
    : node_count_(node_count), edges_(std::move(edges)) {
    if (node_count_ == 0) {
        throw Error(ErrorCode::invalid_graph, "graph must have at least one node");
    }
    for (auto& e : edges_) {
        if (e.i >= node_count_ || e.j >= node_count_) {
            throw Error(ErrorCode::node_out_of_range,
                        "edge " + edge_label(e) + " references a node outside 1.." +
                            std::to_string(node_count_));
        }
        if (e.i == e.j) {
            throw Error(ErrorCode::self_loop, "self-loop at node " + std::to_string(e.i + 1));
        }
        if (!std::isfinite(e.weight) || e.weight <= 0.0) {
            throw Error(ErrorCode::non_positive_weight,
                        "edge " + edge_label(e) + " has non-positive weight");
        }
        if (e.i > e.j) {
            std::swap(e.i, e.j);
        }
    }
    std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
        return std::tie(a.i, a.j) < std::tie(b.i, b.j);
    });
    auto dup = std::adjacent_find(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
        return a.i == b.i && a.j == b.j;
    });
    if (dup != edges_.end()) {
        throw Error(ErrorCode::duplicate_edge, "duplicate edge " + edge_label(*dup));
    }
}

LayerGraph LayerGraph::edgeless(std::size_t node_count) {
    return LayerGraph(node_count, {});
}

Matrix LayerGraph::adjacency() const {
    const auto n = static_cast<Index>(node_count_);
    Matrix a = Matrix::Zero(n, n);
    for (const auto& e : edges_) {
        a(static_cast<Index>(e.i), static_cast<Index>(e.j)) = e.weight;
        a(static_cast<Index>(e.j), static_cast<Index>(e.i)) = e.weight;
    }
    return a;
}

LayerGraph LayerGraph::scaled(double factor) const {
    std::vector<Edge> out = edges_;
    for (auto& e : out) {
        e.weight *= factor;
    }
    return LayerGraph(node_count_, std::move(out));
}

Matrix laplacian(const LayerGraph& g) {
    const auto n = static_cast<Index>(g.node_count());
    Matrix l = Matrix::Zero(n, n);
    for (const auto& e : g.edges()) {
        const auto i = static_cast<Index>(e.i);
        const auto j = static_cast<Index>(e.j);
        l(i, j) -= e.weight;
        l(j, i) -= e.weight;
        l(i, i) += e.weight;
        l(j, j) += e.weight;
    }
    return l;
}

LayerGraph projection(const LayerGraph& g1, const LayerGraph& g2) {
    if (g1.node_count() != g2.node_count()) {
        throw Error(ErrorCode::dimension_mismatch, "projection: graphs have different node counts");
    }
    std::vector<Edge> merged = g1.edges();
    merged.insert(merged.end(), g2.edges().begin(), g2.edges().end());
    std::sort(merged.begin(), merged.end(), [](const Edge& a, const Edge& b) {
        return std::tie(a.i, a.j) < std::tie(b.i, b.j);
    });
    std::vector<Edge> out;
    out.reserve(merged.size());
    for (const auto& e : merged) {
        if (!out.empty() && out.back().i == e.i && out.back().j == e.j) {
            out.back().weight += e.weight;
        } else {
            out.push_back(e);
        }
    }
    return LayerGraph(g1.node_count(), std::move(out));
}

bool is_connected(const LayerGraph& g) {
    const std::size_t n = g.node_count();
    std::vector<std::vector<std::size_t>> neighbours(n);
    for (const auto& e : g.edges()) {
        neighbours[e.i].push_back(e.j);
        neighbours[e.j].push_back(e.i);
    }
    std::vector<bool> seen(n, false);
    std::queue<std::size_t> frontier;
    frontier.push(0);
    seen[0] = true;
    std::size_t reached = 1;
    while (!frontier.empty()) {
        const auto u = frontier.front();
        frontier.pop();
        for (auto v : neighbours[u]) {
            if (!seen[v]) {
                seen[v] = true;
                ++reached;
                frontier.push(v);
            }
        }
    }
    return reached == n;
}

double algebraic_connectivity(const LayerGraph& g) {
    if (g.node_count() < 2) {
        return 0.0;
    }
    const Vector ev = eigenvalues_symmetric(laplacian(g));
    return std::max(0.0, ev(1));
}

LayerGraph minimum_spanning_tree(const LayerGraph& g) {
    std::vector<Edge> sorted = g.edges();
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const Edge& a, const Edge& b) { return a.weight < b.weight; });
    DisjointSets sets(g.node_count());
    std::vector<Edge> tree;
    for (const auto& e : sorted) {
        if (sets.unite(e.i, e.j)) {
            tree.push_back(e);
        }
    }
    return LayerGraph(g.node_count(), std::move(tree));
}

namespace topology {

LayerGraph ring(std::size_t n, double weight) {
    if (n < 3) {
        return path(n, weight);
    }
    std::vector<Edge> edges;
    for (std::size_t k = 0; k < n; ++k) {
        edges.push_back({k, (k + 1) % n, weight});
    }
    return LayerGraph(n, std::move(edges));
}

LayerGraph path(std::size_t n, double weight) {
    std::vector<Edge> edges;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        edges.push_back({k, k + 1, weight});
    }
    return LayerGraph(n, std::move(edges));
}

LayerGraph star(std::size_t n, double weight, std::size_t center) {
    std::vector<Edge> edges;
    for (std::size_t k = 0; k < n; ++k) {
        if (k != center) {
            edges.push_back({center, k, weight});
        }
    }
    return LayerGraph(n, std::move(edges));
}

LayerGraph complete(std::size_t n, double weight) {
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            edges.push_back({i, j, weight});
        }
    }
    return LayerGraph(n, std::move(edges));
}

LayerGraph binary_tree(std::size_t n, double weight) {
    std::vector<Edge> edges;
    for (std::size_t k = 1; k < n; ++k) {
        edges.push_back({(k - 1) / 2, k, weight});
    }
    return LayerGraph(n, std::move(edges));
}

}  // namespace topology

}  // namespace mpx
