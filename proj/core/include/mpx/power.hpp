#pragma once

// Linearized swing-equation networks under distributed proportional control.
//
//     ω̇ = (H − σ_P ℒ_P) ω + z + B,     ż = −M ℒ_I ω
//
// with H = diag(kᵢ − dᵢ/mᵢ), M = diag(1/mᵢ), B = (Pᵢ*/mᵢ), z = −P^net/m and
// ℒ_I the electrical Laplacian with weights βᵢⱼ = EᵢEⱼ|Yᵢⱼ|.

#include "mpx/graph.hpp"
#include "mpx/linalg.hpp"
#include "mpx/stability.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace mpx {

struct Generator {
    double m = 1.0;  // inertia, 2H/ω_R
    double d = 1.0;  // damping
    double k = 0.0;  // local feedback gain
    double P = 0.0;  // nominal injection
    double E = 1.0;  // nodal voltage
};

struct PowerLine {
    std::size_t i = 0;
    std::size_t j = 0;
    double admittance = 0.0;  // |Yᵢⱼ|
};

struct PowerNetwork {
    std::vector<Generator> generators;
    std::vector<PowerLine> lines;
    LayerGraph control_layer;
    double sigma_P = 1.0;

    std::size_t size() const noexcept { return generators.size(); }

    /// Weighted graph with βᵢⱼ = EᵢEⱼ|Yᵢⱼ|.
    LayerGraph electrical_graph() const;

    bool homogeneous_inertia() const noexcept;

    /// Throws Error on non-positive masses, dampings or voltages, a control
    /// layer of the wrong size, or a disconnected electrical graph.
    void validate() const;
};

/// Scalar agents Aᵢ = kᵢ − dᵢ/m, bᵢ = Pᵢ*/m, σ = 0, σ_I = 1/m, integral layer
/// the electrical graph. Throws Error(not_representable) when the masses differ.
MultiplexSystem as_multiplex(const PowerNetwork& pn);

/// ω∞ = −ΣPᵢ* / Σ(mᵢkᵢ − dᵢ). Throws Error(no_equilibrium) on a zero denominator.
double equilibrium_frequency(const PowerNetwork& pn);

struct PowerReport {
    double psi11 = 0.0;        // mean of kᵢ − dᵢ/m
    double psi11_sum = 0.0;    // Σ(kᵢ − dᵢ/m)
    double max_rate = 0.0;     // maxᵢ(kᵢ − dᵢ/m)
    double spread = 0.0;       // Σ_{i≥2}(Aᵢ − A₁)²
    double threshold = 0.0;    // spread/(N|ψ₁₁|) + max_rate
    double lambda2_P = 0.0;
    double sigma_P_bound = 0.0;  // threshold/λ₂(ℒ_P)
    bool c1 = false;             // ψ₁₁ < 0
    bool c2 = false;             // σ_Pλ₂(ℒ_P) > threshold
    bool electrical_connected = false;
    std::optional<double> omega_infinity;

    bool passes() const noexcept { return c1 && c2 && electrical_connected; }
};

/// Convergence conditions for homogeneous inertia; throws as as_multiplex.
PowerReport check_power(const PowerNetwork& pn);

struct InjectionEvent {
    double time = 0.0;
    std::size_t node = 0;
    double delta = 0.0;  // added to Pᵢ* from `time` on
};

struct PowerScenario {
    std::vector<InjectionEvent> events;
    /// Time at which kᵢ and the proportional layer engage; empty = never.
    std::optional<double> control_on;
    double t_start = 0.0;
    double t_end = 40.0;
    double dt = 2.5e-5;
    std::size_t record_every = 100;
};

struct PowerTrace {
    std::vector<double> times;
    std::vector<Vector> omega;
    std::vector<Vector> z;
    std::vector<double> mass_weighted_z;  // Σmᵢzᵢ per sample
    double nominal_frequency = 0.0;       // uncontrolled, undisturbed equilibrium
    double peak_deviation = 0.0;          // max |ωᵢ − nominal| over all steps
    double final_max_deviation = 0.0;     // maxᵢ |ωᵢ(t_end) − nominal|, +∞ if diverged
    double max_conservation_error = 0.0;  // max |Σmᵢzᵢ| over all steps
    bool diverged = false;
};

/// Starts at the uncontrolled nominal equilibrium at t_start and integrates
/// the piecewise-constant schedule of injections and controller switch-on.
PowerTrace simulate_power(const PowerNetwork& pn, const PowerScenario& scenario);

}  // namespace mpx
