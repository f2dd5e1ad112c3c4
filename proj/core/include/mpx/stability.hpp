#pragma once

// Sufficient conditions for admissible consensus of a multiplex PI network.

#include "mpx/graph.hpp"
#include "mpx/linalg.hpp"

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

namespace mpx {

struct NodeDynamics {
    Matrix A;
    Vector b;
};

/// Heterogeneous agents ẋᵢ = Aᵢxᵢ + bᵢ coupled through an open-loop layer C
/// (gain σ) and controlled by a proportional layer P (σ_P) and an integral
/// layer I (σ_I). Optional local feedback Hᵢ is added to Aᵢ.
struct MultiplexSystem {
    std::vector<NodeDynamics> nodes;
    LayerGraph layer_C;
    LayerGraph layer_P;
    LayerGraph layer_I;
    double sigma = 0.0;
    double sigma_P = 1.0;
    double sigma_I = 1.0;
    std::vector<Matrix> local_feedback;  // empty, or one n×n matrix per node

    Index node_count() const noexcept { return static_cast<Index>(nodes.size()); }
    Index state_dim() const noexcept { return nodes.empty() ? 0 : nodes.front().A.rows(); }

    /// Aᵢ + Hᵢ for every node.
    std::vector<Matrix> effective_dynamics() const;

    /// b₁ … b_N stacked.
    Vector stacked_bias() const;

    /// Throws Error on inconsistent dimensions, N < 2, negative gains or
    /// non-finite entries.
    void validate() const;
};

struct Certificates {
    double mu = 0.0;
    double eta = 0.0;  // signed; negative when the averaged symmetric part is Hurwitz
    double rho = 0.0;
    std::size_t anchor = 0;
};

/// μ = λmax(Σ_{k≠a}(A′ₖ − A′ₐ)²), η = λmax((1/N)ΣA′ₖ), ρ = maxₖ λmax(A′ₖ),
/// with A′ = A + Aᵀ and a the anchor node.
Certificates certificates(const std::vector<Matrix>& A_list, std::size_t anchor = 0);

struct AnchorChoice {
    std::size_t anchor = 0;
    double mu = 0.0;
};

/// Anchor minimizing μ; ties go to the lowest index.
AnchorChoice best_anchor(const std::vector<Matrix>& A_list);

/// ½(μ/(N|η|) + ρ). The heterogeneity term is dropped when μ = 0.
double coupling_threshold(const Certificates& c, Index node_count);

enum class CheckMode { theorem, projection, homogeneous };

std::string_view to_string(CheckMode mode) noexcept;

struct Condition {
    bool pass = false;
    double margin = 0.0;  // signed distance to the inequality, positive when satisfied
};

struct StabilityReport {
    CheckMode mode = CheckMode::theorem;
    std::size_t anchor = 0;
    Index node_count = 0;
    double mu = 0.0;
    double eta = 0.0;
    double rho = 0.0;
    double lambda2_C = 0.0;
    double lambda2_P = 0.0;
    double lambda2_I = 0.0;
    double lambda2_CP = 0.0;  // λ₂(σℒ_C + σ_Pℒ_P)
    double threshold = 0.0;   // ½(μ/(N|η|) + ρ)
    double coupling = 0.0;    // left-hand side compared against the threshold
    bool psi11_nonsingular = false;
    bool psi11_symmetric_hurwitz = false;
    Condition condition_i;
    Condition condition_ii;
    Condition condition_iii;
    std::optional<Vector> x_infinity;

    bool passes() const noexcept {
        return condition_i.pass && condition_ii.pass && condition_iii.pass;
    }
};

struct CheckOptions {
    std::size_t anchor = 0;
    bool optimize_anchor = false;
};

/// Evaluates the three conditions with coupling σ_Pλ₂(ℒ_P) + σλ₂(ℒ_C). When
/// σλ₂(ℒ_C) vanishes the weighted projection σℒ_C + σ_Pℒ_P is used instead
/// (mode projection). Identical node dynamics are labelled homogeneous.
/// Never throws on failing conditions; x_infinity is empty when Ψ₁₁ is singular.
StabilityReport check_theorem(const MultiplexSystem& sys, const CheckOptions& opts = {});

/// Condition ii replaced by λ₂(σℒ_C + σ_Pℒ_P) > threshold. Throws
/// Error(not_applicable) when the weighted projection is disconnected.
StabilityReport check_projection(const MultiplexSystem& sys, const CheckOptions& opts = {});

/// Returns sys with Aᵢ replaced by Aᵢ + Hᵢ (and any previous feedback folded
/// in as well); the result carries no separate local feedback.
MultiplexSystem consensusability_fold(const MultiplexSystem& sys, const std::vector<Matrix>& H_list);

/// x∞ = −(1/N)Ψ₁₁⁻¹Σbₖ. Throws Error(no_equilibrium) when Ψ₁₁ is singular.
Vector consensus_point(const std::vector<Matrix>& A_list, const Vector& bias_sum);

/// Ψ₁₁ nonsingular in the scale-aware sense σ_min > 1e-9·‖Ψ₁₁‖₂.
bool is_nonsingular(const Matrix& psi11);

}  // namespace mpx
