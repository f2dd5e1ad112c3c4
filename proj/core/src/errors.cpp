#include "mpx/errors.hpp"

namespace mpx {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::dimension_mismatch: return "dimension_mismatch";
        case ErrorCode::invalid_graph: return "invalid_graph";
        case ErrorCode::self_loop: return "self_loop";
        case ErrorCode::duplicate_edge: return "duplicate_edge";
        case ErrorCode::non_positive_weight: return "non_positive_weight";
        case ErrorCode::node_out_of_range: return "node_out_of_range";
        case ErrorCode::invalid_laplacian: return "invalid_laplacian";
        case ErrorCode::invalid_argument: return "invalid_argument";
        case ErrorCode::no_equilibrium: return "no_equilibrium";
        case ErrorCode::not_applicable: return "not_applicable";
        case ErrorCode::infeasible: return "infeasible";
        case ErrorCode::not_representable: return "not_representable";
        case ErrorCode::disconnected_layer: return "disconnected_layer";
    }
    return "unknown";
}

}  // namespace mpx
