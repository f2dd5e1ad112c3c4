#pragma once

// Weighted undirected graphs on a shared node set, one per multiplex layer.
//
// Node indices are 0-based throughout the library. File formats and the CLI
// use 1-based labels; the conversion happens at the I/O boundary only.

#include "mpx/linalg.hpp"

#include <cstddef>
#include <vector>

namespace mpx {

struct Edge {
    std::size_t i = 0;
    std::size_t j = 0;
    double weight = 1.0;

    friend bool operator==(const Edge&, const Edge&) = default;
};

/// Immutable weighted undirected graph without self-loops or parallel edges.
class LayerGraph {
public:
    /// Throws Error on self-loops, duplicate pairs (in either orientation),
    /// out-of-range endpoints or non-positive/non-finite weights.
    LayerGraph(std::size_t node_count, std::vector<Edge> edges);

    static LayerGraph edgeless(std::size_t node_count);

    std::size_t node_count() const noexcept { return node_count_; }

    /// Edges normalized to i < j, sorted lexicographically.
    const std::vector<Edge>& edges() const noexcept { return edges_; }

    bool empty() const noexcept { return edges_.empty(); }

    Matrix adjacency() const;

    /// Same topology with every weight multiplied by factor > 0.
    LayerGraph scaled(double factor) const;

    friend bool operator==(const LayerGraph&, const LayerGraph&) = default;

private:
    std::size_t node_count_;
    std::vector<Edge> edges_;
};

/// L = diag(A·1) − A.
Matrix laplacian(const LayerGraph& g);

/// Graph whose adjacency is the sum of both adjacencies.
LayerGraph projection(const LayerGraph& g1, const LayerGraph& g2);

/// Graph-search connectivity; a single node counts as connected.
bool is_connected(const LayerGraph& g);

/// Second-smallest Laplacian eigenvalue, clamped at zero; 0 for N = 1.
double algebraic_connectivity(const LayerGraph& g);

/// Kruskal minimum-weight spanning tree (forest if g is disconnected).
LayerGraph minimum_spanning_tree(const LayerGraph& g);

namespace topology {

LayerGraph ring(std::size_t n, double weight = 1.0);
LayerGraph path(std::size_t n, double weight = 1.0);
LayerGraph star(std::size_t n, double weight = 1.0, std::size_t center = 0);
LayerGraph complete(std::size_t n, double weight = 1.0);
/// Heap-ordered binary tree: node k links to 2k+1 and 2k+2.
LayerGraph binary_tree(std::size_t n, double weight = 1.0);

}  // namespace topology

}  // namespace mpx
