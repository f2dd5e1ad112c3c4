#pragma once

// JSON network and grid descriptions.
//
// Network file:
//
//   {
//     "n": 2,
//     "nodes": [{"A": [[0, 1], [-1, 0]], "b": [0, 10], "H": [[0, 0], [0, 0]]}, ...],
//     "layers": {
//       "C": {"edges": [[1, 2, 1.0], ...], "sigma": 0.0},
//       "P": {"edges": [...], "sigma": 19.3},
//       "I": {"edges": [...], "sigma": 15.0}
//     },
//     "sim": {"t_end": 50.0, "dt": 0.001, "x0": "random:42"}
//   }
//
// Node labels in edge lists are 1-based. "H", layer "C" and "sim" are
// optional; a layer may repeat the node count as "n". Unknown keys are errors.

#include "mpx/power.hpp"
#include "mpx/stability.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace mpx::cli {

enum class SpecErrorCode {
    io,
    malformed_json,
    missing_key,
    unknown_key,
    wrong_type,
    dimension_mismatch,
    self_loop,
    duplicate_edge,
    non_positive_weight,
    node_out_of_range,
    invalid_value,
};

std::string_view to_string(SpecErrorCode code) noexcept;

class SpecError : public std::runtime_error {
public:
    SpecError(SpecErrorCode code, std::string path, const std::string& message);

    SpecErrorCode code() const noexcept { return code_; }
    /// JSON path of the offending value, e.g. "$.nodes[2].A[0]".
    const std::string& path() const noexcept { return path_; }

private:
    SpecErrorCode code_;
    std::string path_;
};

struct SimDefaults {
    std::optional<double> t_end;
    std::optional<double> dt;
    std::optional<std::string> x0;

    friend bool operator==(const SimDefaults&, const SimDefaults&) = default;
};

struct NetworkSpec {
    MultiplexSystem system;
    SimDefaults sim;
};

NetworkSpec parse_network(std::string_view text);
NetworkSpec load_network(const std::string& path);
/// Inverse of parse_network; numbers keep full round-trip precision.
std::string serialize_network(const NetworkSpec& spec);

// Grid file:
//
//   {
//     "generators": [{"m": 0.2, "d": 0.5, "k": 0.0, "P": 40, "E": 2000}, ...],
//     "lines": [[1, 2, 0.0001], ...],
//     "control": {"edges": [[1, 2, 200], ...], "sigma": 55},
//     "scenario": {
//       "events": [{"time": 0, "node": 4, "delta": -0.2}, ...],
//       "control_on": 0.1, "t_start": -0.5, "t_end": 40, "dt": 2.5e-5
//     }
//   }
//
// "k" defaults to 0 and "E" to 1; "scenario" is optional, as are its keys.

struct GridSpec {
    PowerNetwork network;
    std::optional<PowerScenario> scenario;
};

GridSpec parse_grid(std::string_view text);
GridSpec load_grid(const std::string& path);
std::string serialize_grid(const GridSpec& spec);

/// Whitespace or comma separated numbers, or a JSON array.
Vector parse_vector_text(std::string_view text);

/// Half-width of the box sampled by random_initial_state.
inline constexpr double kRandomStateHalfWidth = 10.0;

/// Entries uniform on [−10, 10] from mt19937_64(seed), mapping each raw draw
/// through its top 53 bits so the values do not depend on the standard
/// library's distribution implementation.
Vector random_initial_state(std::uint64_t seed, Index len);

}  // namespace mpx::cli
