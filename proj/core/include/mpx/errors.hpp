#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mpx {

enum class ErrorCode {
    dimension_mismatch,
    invalid_graph,
    self_loop,
    duplicate_edge,
    non_positive_weight,
    node_out_of_range,
    invalid_laplacian,
    invalid_argument,
    no_equilibrium,
    not_applicable,
    infeasible,
    not_representable,
    disconnected_layer,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace mpx
