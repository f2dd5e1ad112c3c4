#pragma once

// Closed-loop assembly, consensus equilibrium, error dynamics, fixed-step
// simulation and gain sweeps.

#include "mpx/stability.hpp"

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

namespace mpx {

/// d/dt [x; z] = state_matrix·[x; z] + forcing, with
///
///     state_matrix = | Â − ℋ        I |     forcing = | B |
///                    | −σ_I L̂_I     0 |               | 0 |
///
/// where ℋ = σ(ℒ_C⊗I) + σ_P(ℒ_P⊗I) and Â = blockdiag(Aᵢ + Hᵢ).
struct ClosedLoopSystem {
    Matrix state_matrix;
    Vector forcing;
    Index nodes = 0;
    Index dim = 0;

    Vector rhs(const Vector& y) const { return state_matrix * y + forcing; }
};

ClosedLoopSystem assemble(const MultiplexSystem& sys);

struct Equilibrium {
    Vector x_infinity;  // n
    Vector x_star;      // 1_N ⊗ x∞
    Vector z_star;      // −(Â·x* + B)
};

/// Throws Error(no_equilibrium) when Ψ₁₁ is singular.
Equilibrium equilibrium(const MultiplexSystem& sys);

/// Shifted and transformed dynamics in coordinates where the consensus mode
/// and the conserved integral average separate. Dimension nN + n(N−1).
struct ErrorSystem {
    Matrix matrix;
    Index nodes = 0;
    Index dim = 0;

    double abscissa() const { return spectral_abscissa(matrix); }
};

/// Gain-independent pieces of the error dynamics, so that σ_P and σ_I can be
/// varied cheaply.
class ErrorSystemFactory {
public:
    explicit ErrorSystemFactory(const MultiplexSystem& sys);

    ErrorSystem at(double sigma_P, double sigma_I) const;

private:
    Index nodes_;
    Index dim_;
    Matrix base_;      // Ψ − blockdiag(0, σΛ̄_C ⊗ I)
    Matrix prop_;      // T_PΛ̄_PT_Pᵀ ⊗ I
    Matrix integral_;  // T_IΛ̄_IT_Iᵀ ⊗ I
};

ErrorSystem error_system(const MultiplexSystem& sys);

/// ‖x − (1/N)(11ᵀ⊗I_n)x‖₂ for a stacked state of N blocks of size n.
double consensus_index(const Vector& x, Index nodes, Index dim);

/// One piece of a piecewise-constant affine ODE ẏ = M·y + c on [t_begin, t_end].
template <class Mat>
struct AffineSegment {
    const Mat* matrix;
    const Vector* offset;
    double t_begin;
    double t_end;
};

/// Classical fixed-step RK4 over consecutive segments. Each segment is split
/// into ⌈length/dt⌉ equal steps so switching times fall on step boundaries.
/// observer(t, y) is called at the start and after every step; returning
/// false stops the integration. Returns false if a non-finite state appears.
template <class Mat, class Observer>
bool integrate_affine(const std::vector<AffineSegment<Mat>>& segments, Vector& y, double dt,
                      Observer&& observer) {
    if (segments.empty()) {
        return true;
    }
    if (!observer(segments.front().t_begin, y)) {
        return true;
    }
    Vector k1(y.size()), k2(y.size()), k3(y.size()), k4(y.size()), tmp(y.size());
    for (const auto& seg : segments) {
        const Mat& m = *seg.matrix;
        const Vector& c = *seg.offset;
        const double length = seg.t_end - seg.t_begin;
        if (!(length > 0.0)) {
            continue;
        }
        const auto steps = static_cast<long long>(std::max(1.0, std::ceil(length / dt - 1e-9)));
        const double h = length / static_cast<double>(steps);
        for (long long s = 0; s < steps; ++s) {
            k1.noalias() = m * y;
            k1 += c;
            tmp = y + (0.5 * h) * k1;
            k2.noalias() = m * tmp;
            k2 += c;
            tmp = y + (0.5 * h) * k2;
            k3.noalias() = m * tmp;
            k3 += c;
            tmp = y + h * k3;
            k4.noalias() = m * tmp;
            k4 += c;
            y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            if (!y.allFinite()) {
                return false;
            }
            const double t = s + 1 == steps ? seg.t_end : seg.t_begin + static_cast<double>(s + 1) * h;
            if (!observer(t, y)) {
                return true;
            }
        }
    }
    return true;
}

struct SimOptions {
    double t_end = 10.0;
    double dt = 1e-3;
    /// Keep every k-th step in the trace (the final state is always kept).
    std::size_t record_every = 1;
};

struct SimTrace {
    std::vector<double> times;
    std::vector<Vector> states;     // x, nN
    std::vector<Vector> integrals;  // z, nN
    std::vector<double> d_x;
    bool diverged = false;
    Index nodes = 0;
    Index dim = 0;
};

/// Integrates the closed loop from x(0) = x0, z(0) = 0.
SimTrace simulate(const MultiplexSystem& sys, const Vector& x0, const SimOptions& opts = {});

enum class CellClass { stable, marginal, unstable };

std::string_view to_string(CellClass c) noexcept;

/// stable ⇔ a < −1e-9, marginal ⇔ |a| ≤ 1e-9.
CellClass classify_abscissa(double a) noexcept;

struct SweepCell {
    double sigma_P = 0.0;
    double sigma_I = 0.0;
    double abscissa = 0.0;
    CellClass classification = CellClass::unstable;
    std::string error;  // non-empty when the cell could not be evaluated
};

struct SweepResult {
    std::vector<double> sigma_P_grid;
    std::vector<double> sigma_I_grid;
    std::vector<SweepCell> cells;  // σ_P-major: cells[p·|σ_I| + i]

    const SweepCell& at(std::size_t p, std::size_t i) const {
        return cells[p * sigma_I_grid.size() + i];
    }
};

/// Error-dynamics abscissa on every grid point, evaluated on up to `threads`
/// workers (0 picks the hardware concurrency).
SweepResult sweep(const MultiplexSystem& sys, const std::vector<double>& sigma_P_grid,
                  const std::vector<double>& sigma_I_grid, unsigned threads = 0);

/// `steps` evenly spaced values from a to b inclusive.
std::vector<double> linspace(double a, double b, std::size_t steps);

/// Centres of `steps` equal cells partitioning [a, b].
std::vector<double> cell_centres(double a, double b, std::size_t steps);

}  // namespace mpx
