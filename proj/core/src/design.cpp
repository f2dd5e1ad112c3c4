#include "mpx/design.hpp"

#include "mpx/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mpx {

namespace {

bool average_is_admissible(const std::vector<Matrix>& dyn) {
    Matrix avg = Matrix::Zero(dyn.front().rows(), dyn.front().cols());
    for (const auto& a : dyn) {
        avg += a;
    }
    avg /= static_cast<double>(dyn.size());
    return is_nonsingular(avg) && max_eigenvalue_symmetric(symmetric_part(avg)) < -1e-9;
}

}  // namespace

TuningResult tune(const MultiplexSystem& sys, const TuneOptions& opts) {
    sys.validate();
    if (!is_connected(sys.layer_I)) {
        throw Error(ErrorCode::disconnected_layer, "integral layer must be connected");
    }
    if (!(opts.slack > 0.0)) {
        throw Error(ErrorCode::invalid_argument, "slack must be positive");
    }

    MultiplexSystem work = sys;
    work.local_feedback.clear();
    TuningResult result;
    std::vector<Matrix> dyn = work.effective_dynamics();
    if (!average_is_admissible(dyn)) {
        if (sys.local_feedback.empty()) {
            throw Error(ErrorCode::infeasible,
                        "average node dynamics are not Hurwitz and no local feedback was supplied");
        }
        work = consensusability_fold(work, sys.local_feedback);
        dyn = work.effective_dynamics();
        result.used_local_feedback = true;
    }

    result.anchor = opts.anchor ? *opts.anchor : best_anchor(dyn).anchor;
    if (result.anchor >= dyn.size()) {
        throw Error(ErrorCode::node_out_of_range, "anchor node out of range");
    }
    const Certificates c = certificates(dyn, result.anchor);
    const double needed = std::max(0.0, coupling_threshold(c, work.node_count()) -
                                            work.sigma * algebraic_connectivity(work.layer_C));
    const double l2p = algebraic_connectivity(work.layer_P);
    if (needed == 0.0) {
        result.sigma_P_min = 0.0;
        result.certified_sigma_P = opts.slack;
    } else if (l2p > 0.0 && is_connected(work.layer_P)) {
        result.sigma_P_min = needed / l2p;
        result.certified_sigma_P = result.sigma_P_min * (1.0 + opts.slack);
    } else {
        result.sigma_P_min = std::numeric_limits<double>::infinity();
        result.certified_sigma_P = result.sigma_P_min;
    }

    if (std::isfinite(result.certified_sigma_P)) {
        work.sigma_P = result.certified_sigma_P;
        result.report = check_theorem(work, CheckOptions{result.anchor, false});
        result.feasible = result.report.passes();
    } else {
        work.sigma_P = 0.0;
        result.report = check_theorem(work, CheckOptions{result.anchor, false});
        result.feasible = false;
    }
    return result;
}

LayerGraph integral_layer_from(const LayerGraph& g) {
    return minimum_spanning_tree(g);
}

}  // namespace mpx
