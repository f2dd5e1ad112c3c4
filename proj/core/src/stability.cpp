#include "mpx/stability.hpp"

#include "mpx/errors.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace mpx {

namespace {

constexpr double kHurwitzTol = 1e-9;
constexpr double kSingularTol = 1e-9;

void require_homogeneous_shapes(const std::vector<Matrix>& A_list) {
    if (A_list.empty()) {
        throw Error(ErrorCode::invalid_argument, "empty list of node dynamics");
    }
    const Index n = A_list.front().rows();
    for (std::size_t k = 0; k < A_list.size(); ++k) {
        if (A_list[k].rows() != n || A_list[k].cols() != n) {
            throw Error(ErrorCode::dimension_mismatch,
                        "node " + std::to_string(k + 1) + " dynamics are not " + std::to_string(n) + "x" +
                            std::to_string(n));
        }
    }
}

Matrix average(const std::vector<Matrix>& A_list) {
    Matrix s = Matrix::Zero(A_list.front().rows(), A_list.front().cols());
    for (const auto& a : A_list) {
        s += a;
    }
    return s / static_cast<double>(A_list.size());
}

double heterogeneity(const std::vector<Matrix>& sym, std::size_t anchor) {
    const Index n = sym.front().rows();
    Matrix acc = Matrix::Zero(n, n);
    for (std::size_t k = 0; k < sym.size(); ++k) {
        if (k == anchor) {
            continue;
        }
        const Matrix d = sym[k] - sym[anchor];
        acc += d * d;
    }
    return std::max(0.0, max_eigenvalue_symmetric(0.5 * (acc + acc.transpose())));
}

bool all_identical(const std::vector<Matrix>& A_list) {
    for (std::size_t k = 1; k < A_list.size(); ++k) {
        if (A_list[k] != A_list.front()) {
            return false;
        }
    }
    return true;
}

bool projection_connected(const MultiplexSystem& sys) {
    LayerGraph merged = LayerGraph::edgeless(sys.layer_C.node_count());
    if (sys.sigma > 0.0) {
        merged = projection(merged, sys.layer_C);
    }
    if (sys.sigma_P > 0.0) {
        merged = projection(merged, sys.layer_P);
    }
    return is_connected(merged);
}

Vector bias_sum(const MultiplexSystem& sys) {
    Vector s = Vector::Zero(sys.state_dim());
    for (const auto& node : sys.nodes) {
        s += node.b;
    }
    return s;
}

StabilityReport evaluate(const MultiplexSystem& sys, const CheckOptions& opts, bool force_projection) {
    sys.validate();
    const std::vector<Matrix> dyn = sys.effective_dynamics();
    const Index N = sys.node_count();

    StabilityReport rep;
    rep.node_count = N;
    rep.anchor = opts.optimize_anchor ? best_anchor(dyn).anchor : opts.anchor;
    if (rep.anchor >= dyn.size()) {
        throw Error(ErrorCode::node_out_of_range, "anchor node " + std::to_string(rep.anchor + 1) + " out of range");
    }
    const Certificates c = certificates(dyn, rep.anchor);
    rep.mu = c.mu;
    rep.eta = c.eta;
    rep.rho = c.rho;
    rep.threshold = coupling_threshold(c, N);

    const Matrix L_C = laplacian(sys.layer_C);
    const Matrix L_P = laplacian(sys.layer_P);
    rep.lambda2_C = algebraic_connectivity(sys.layer_C);
    rep.lambda2_P = algebraic_connectivity(sys.layer_P);
    rep.lambda2_I = algebraic_connectivity(sys.layer_I);
    {
        const Vector ev = eigenvalues_symmetric(sys.sigma * L_C + sys.sigma_P * L_P);
        rep.lambda2_CP = std::max(0.0, ev(1));
    }

    const double open_loop = sys.sigma * rep.lambda2_C;
    const bool use_projection = force_projection || !(open_loop > 0.0);
    rep.coupling = use_projection ? rep.lambda2_CP : sys.sigma_P * rep.lambda2_P + open_loop;
    rep.mode = use_projection ? CheckMode::projection : CheckMode::theorem;
    if (all_identical(dyn)) {
        rep.mode = CheckMode::homogeneous;
    }

    const Matrix psi11 = average(dyn);
    rep.psi11_nonsingular = is_nonsingular(psi11);
    rep.psi11_symmetric_hurwitz = rep.eta < -kHurwitzTol;
    rep.condition_i.pass = rep.psi11_nonsingular && rep.psi11_symmetric_hurwitz;
    rep.condition_i.margin = -rep.eta;

    rep.condition_ii.margin = rep.coupling - rep.threshold;
    rep.condition_ii.pass = rep.condition_ii.margin > 0.0;

    const bool integral_connected = is_connected(sys.layer_I);
    rep.condition_iii.margin = sys.sigma_I * rep.lambda2_I;
    rep.condition_iii.pass = integral_connected && sys.sigma_I > 0.0 && rep.lambda2_I > 0.0;

    if (rep.psi11_nonsingular) {
        rep.x_infinity = consensus_point(dyn, bias_sum(sys));
    }
    return rep;
}

}  // namespace

std::vector<Matrix> MultiplexSystem::effective_dynamics() const {
    std::vector<Matrix> out;
    out.reserve(nodes.size());
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        out.push_back(local_feedback.empty() ? nodes[k].A : Matrix(nodes[k].A + local_feedback[k]));
    }
    return out;
}

Vector MultiplexSystem::stacked_bias() const {
    const Index n = state_dim();
    Vector out(n * node_count());
    for (Index k = 0; k < node_count(); ++k) {
        out.segment(k * n, n) = nodes[static_cast<std::size_t>(k)].b;
    }
    return out;
}

void MultiplexSystem::validate() const {
    if (nodes.size() < 2) {
        throw Error(ErrorCode::invalid_argument, "a multiplex system needs at least two nodes");
    }
    const Index n = state_dim();
    if (n < 1) {
        throw Error(ErrorCode::dimension_mismatch, "state dimension must be positive");
    }
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        const auto label = "node " + std::to_string(k + 1);
        if (nodes[k].A.rows() != n || nodes[k].A.cols() != n) {
            throw Error(ErrorCode::dimension_mismatch, label + ": A is not " + std::to_string(n) + "x" + std::to_string(n));
        }
        if (nodes[k].b.size() != n) {
            throw Error(ErrorCode::dimension_mismatch, label + ": b has the wrong length");
        }
        if (!nodes[k].A.allFinite() || !nodes[k].b.allFinite()) {
            throw Error(ErrorCode::invalid_argument, label + ": non-finite entries");
        }
    }
    if (!local_feedback.empty()) {
        if (local_feedback.size() != nodes.size()) {
            throw Error(ErrorCode::dimension_mismatch, "local feedback needs one matrix per node");
        }
        for (std::size_t k = 0; k < local_feedback.size(); ++k) {
            if (local_feedback[k].rows() != n || local_feedback[k].cols() != n) {
                throw Error(ErrorCode::dimension_mismatch,
                            "node " + std::to_string(k + 1) + ": H has the wrong shape");
            }
        }
    }
    const auto N = nodes.size();
    if (layer_C.node_count() != N || layer_P.node_count() != N || layer_I.node_count() != N) {
        throw Error(ErrorCode::dimension_mismatch, "layers must share the node count of the system");
    }
    for (double g : {sigma, sigma_P, sigma_I}) {
        if (!std::isfinite(g) || g < 0.0) {
            throw Error(ErrorCode::invalid_argument, "coupling gains must be finite and non-negative");
        }
    }
}

Certificates certificates(const std::vector<Matrix>& A_list, std::size_t anchor) {
    require_homogeneous_shapes(A_list);
    if (A_list.size() < 2) {
        throw Error(ErrorCode::invalid_argument, "certificates need at least two nodes");
    }
    if (anchor >= A_list.size()) {
        throw Error(ErrorCode::node_out_of_range, "anchor node out of range");
    }
    std::vector<Matrix> sym;
    sym.reserve(A_list.size());
    Certificates c;
    c.anchor = anchor;
    c.rho = -std::numeric_limits<double>::infinity();
    for (const auto& a : A_list) {
        sym.push_back(symmetric_part(a));
        c.rho = std::max(c.rho, max_eigenvalue_symmetric(sym.back()));
    }
    c.mu = heterogeneity(sym, anchor);
    c.eta = max_eigenvalue_symmetric(symmetric_part(average(A_list)));
    return c;
}

AnchorChoice best_anchor(const std::vector<Matrix>& A_list) {
    require_homogeneous_shapes(A_list);
    if (A_list.size() < 2) {
        throw Error(ErrorCode::invalid_argument, "anchor selection needs at least two nodes");
    }
    std::vector<Matrix> sym;
    for (const auto& a : A_list) {
        sym.push_back(symmetric_part(a));
    }
    AnchorChoice best{0, heterogeneity(sym, 0)};
    for (std::size_t k = 1; k < sym.size(); ++k) {
        const double mu = heterogeneity(sym, k);
        if (mu < best.mu) {
            best = {k, mu};
        }
    }
    return best;
}

double coupling_threshold(const Certificates& c, Index node_count) {
    const double spread = c.mu == 0.0 ? 0.0 : c.mu / (static_cast<double>(node_count) * std::abs(c.eta));
    return 0.5 * (spread + c.rho);
}

std::string_view to_string(CheckMode mode) noexcept {
    switch (mode) {
        case CheckMode::theorem: return "theorem";
        case CheckMode::projection: return "projection";
        case CheckMode::homogeneous: return "homogeneous";
    }
    return "unknown";
}

StabilityReport check_theorem(const MultiplexSystem& sys, const CheckOptions& opts) {
    return evaluate(sys, opts, false);
}

StabilityReport check_projection(const MultiplexSystem& sys, const CheckOptions& opts) {
    sys.validate();
    if (!projection_connected(sys)) {
        throw Error(ErrorCode::not_applicable, "projection of the open-loop and proportional layers is disconnected");
    }
    return evaluate(sys, opts, true);
}

MultiplexSystem consensusability_fold(const MultiplexSystem& sys, const std::vector<Matrix>& H_list) {
    if (H_list.size() != sys.nodes.size()) {
        throw Error(ErrorCode::dimension_mismatch, "local feedback needs one matrix per node");
    }
    MultiplexSystem out = sys;
    const std::vector<Matrix> dyn = sys.effective_dynamics();
    for (std::size_t k = 0; k < H_list.size(); ++k) {
        if (H_list[k].rows() != dyn[k].rows() || H_list[k].cols() != dyn[k].cols()) {
            throw Error(ErrorCode::dimension_mismatch, "node " + std::to_string(k + 1) + ": H has the wrong shape");
        }
        out.nodes[k].A = dyn[k] + H_list[k];
    }
    out.local_feedback.clear();
    return out;
}

bool is_nonsingular(const Matrix& psi11) {
    const double norm = spectral_norm(psi11);
    return norm > 0.0 && min_singular_value(psi11) > kSingularTol * norm;
}

Vector consensus_point(const std::vector<Matrix>& A_list, const Vector& bias_sum) {
    require_homogeneous_shapes(A_list);
    const Matrix psi11 = average(A_list);
    if (!is_nonsingular(psi11)) {
        throw Error(ErrorCode::no_equilibrium, "average node dynamics are singular; no consensus equilibrium");
    }
    return -psi11.fullPivLu().solve(bias_sum) / static_cast<double>(A_list.size());
}

}  // namespace mpx
