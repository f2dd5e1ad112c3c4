#pragma once

// Reference networks used by the CLI demos, the tests and the benchmarks.

#include "mpx/power.hpp"
#include "mpx/stability.hpp"

namespace mpx::fixtures {

/// Eight two-dimensional agents drawn from three node types,
///
///   E1 = [[0, 1], [−1, 0]]   at nodes 1, 3
///   E2 = [[−1.5, 0], [−1, −1]] at nodes 2, 5, 7
///   E3 = [[1, 1], [0, 0.5]]  at nodes 4, 6, 8
///
/// uncoupled in open loop (σ = 0), with unit-weight rings for both control
/// layers, σ_P = 19.3 and σ_I = 15.
MultiplexSystem heterogeneous_eight();

/// Same agents with the given integral layer.
MultiplexSystem heterogeneous_eight(const LayerGraph& integral_layer);

/// Sixteen generators with m = 0.2, four damping classes, E = 2 kV on every
/// bus, |Y| = 1e-4 on every line, a weight-200 path as proportional layer
/// and σ_P = 55. Local gains act on buses 1, 3, 5, 8, 10 and 14.
PowerNetwork sixteen_bus_grid();

/// Loss of 600 kW in total at t = 0 (0.2 MW at each of buses 4, 8 and 10),
/// controller switched on at t = 0.1, 40 s horizon.
PowerScenario sixteen_bus_scenario();

}  // namespace mpx::fixtures
