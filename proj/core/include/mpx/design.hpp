#pragma once

// Gain tuning: the smallest proportional gain certified by the sufficient
// conditions, for fixed layer topologies.

#include "mpx/stability.hpp"

#include <cstddef>
#include <optional>

namespace mpx {

struct TuneOptions {
    /// Fixed anchor node; empty selects the anchor minimizing μ.
    std::optional<std::size_t> anchor;
    /// The certifying report is evaluated at σ_P,min·(1 + slack).
    double slack = 1e-6;
};

struct TuningResult {
    double sigma_P_min = 0.0;
    double certified_sigma_P = 0.0;
    bool feasible = false;
    bool used_local_feedback = false;
    std::size_t anchor = 0;
    StabilityReport report;
};

/// Steps of the design procedure on sys (its σ_P is ignored):
///   1. average dynamics Ψ₁₁ of the open-loop nodes;
///   2. require Ψ₁₁ nonsingular and Ψ′₁₁ Hurwitz;
///   3. otherwise fold sys.local_feedback, throwing Error(infeasible) if none;
///   4. certificates with the chosen anchor;
///   5. σ_P,min = max(0, threshold − σλ₂(ℒ_C)) / λ₂(ℒ_P).
/// Throws Error(disconnected_layer) when layer_I is disconnected. When
/// layer_P is disconnected and a positive gain is needed, the result is
/// infeasible with σ_P,min = +∞.
TuningResult tune(const MultiplexSystem& sys, const TuneOptions& opts = {});

/// Minimum-weight spanning tree of g, a sparse choice for the integral layer.
LayerGraph integral_layer_from(const LayerGraph& g);

}  // namespace mpx
