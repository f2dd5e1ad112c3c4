#include "mpx/sim.hpp"

#include "mpx/errors.hpp"
#include "mpx/spectral.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

namespace mpx {

ClosedLoopSystem assemble(const MultiplexSystem& sys) {
    sys.validate();
    const Index N = sys.node_count();
    const Index n = sys.state_dim();
    const Index nN = N * n;
    const std::vector<Matrix> dyn = sys.effective_dynamics();

    ClosedLoopSystem cl;
    cl.nodes = N;
    cl.dim = n;
    cl.state_matrix = Matrix::Zero(2 * nN, 2 * nN);
    cl.state_matrix.topLeftCorner(nN, nN) =
        block_diagonal(dyn) - lift(sys.sigma * laplacian(sys.layer_C) + sys.sigma_P * laplacian(sys.layer_P), n);
    cl.state_matrix.topRightCorner(nN, nN).setIdentity();
    cl.state_matrix.bottomLeftCorner(nN, nN) = -sys.sigma_I * lift(laplacian(sys.layer_I), n);
    cl.forcing = Vector::Zero(2 * nN);
    cl.forcing.head(nN) = sys.stacked_bias();
    return cl;
}

Equilibrium equilibrium(const MultiplexSystem& sys) {
    sys.validate();
    const std::vector<Matrix> dyn = sys.effective_dynamics();
    Vector bias_sum = Vector::Zero(sys.state_dim());
    for (const auto& node : sys.nodes) {
        bias_sum += node.b;
    }
    Equilibrium eq;
    eq.x_infinity = consensus_point(dyn, bias_sum);
    eq.x_star = eq.x_infinity.replicate(sys.node_count(), 1);
    eq.z_star = -(block_diagonal(dyn) * eq.x_star + sys.stacked_bias());
    return eq;
}

ErrorSystemFactory::ErrorSystemFactory(const MultiplexSystem& sys) {
    sys.validate();
    nodes_ = sys.node_count();
    dim_ = sys.state_dim();
    const Index n = dim_;
    const Index m = nodes_ - 1;

    const SpectralBlocks bc = block_decompose(laplacian(sys.layer_C));
    const PsiBlocks psi = psi_blocks(sys.effective_dynamics(), bc);
    base_ = psi.assembled();
    base_.bottomRightCorner(m * n, m * n) -= lift(sys.sigma * bc.lambda_bar(), n);
    prop_ = lift(similarity_transform(bc, laplacian(sys.layer_P)).S, n);
    integral_ = lift(similarity_transform(bc, laplacian(sys.layer_I)).S, n);
}

ErrorSystem ErrorSystemFactory::at(double sigma_P, double sigma_I) const {
    const Index n = dim_;
    const Index nN = nodes_ * n;
    const Index tail = (nodes_ - 1) * n;

    ErrorSystem es;
    es.nodes = nodes_;
    es.dim = dim_;
    es.matrix = Matrix::Zero(nN + tail, nN + tail);
    es.matrix.topLeftCorner(nN, nN) = base_;
    es.matrix.block(n, n, tail, tail) -= sigma_P * prop_;
    es.matrix.block(n, nN, tail, tail).setIdentity();
    es.matrix.block(nN, n, tail, tail) = -sigma_I * integral_;
    return es;
}

ErrorSystem error_system(const MultiplexSystem& sys) {
    return ErrorSystemFactory(sys).at(sys.sigma_P, sys.sigma_I);
}

double consensus_index(const Vector& x, Index nodes, Index dim) {
    const auto blocks = x.reshaped(dim, nodes);
    const Vector mean = blocks.rowwise().mean();
    return (blocks.colwise() - mean).norm();
}

SimTrace simulate(const MultiplexSystem& sys, const Vector& x0, const SimOptions& opts) {
    const ClosedLoopSystem cl = assemble(sys);
    const Index nN = cl.nodes * cl.dim;
    if (x0.size() != nN) {
        throw Error(ErrorCode::dimension_mismatch,
                    "initial state has length " + std::to_string(x0.size()) + ", expected " + std::to_string(nN));
    }
    if (!(opts.dt > 0.0) || !(opts.t_end > opts.dt)) {
        throw Error(ErrorCode::invalid_argument, "simulation needs 0 < dt < t_end");
    }
    const std::size_t stride = std::max<std::size_t>(1, opts.record_every);

    SimTrace trace;
    trace.nodes = cl.nodes;
    trace.dim = cl.dim;
    Vector y = Vector::Zero(2 * nN);
    y.head(nN) = x0;

    std::size_t step = 0;
    const double t_end = opts.t_end;
    auto record = [&](double t, const Vector& s) {
        trace.times.push_back(t);
        trace.states.push_back(s.head(nN));
        trace.integrals.push_back(s.tail(nN));
        trace.d_x.push_back(consensus_index(s.head(nN), cl.nodes, cl.dim));
    };
    auto observer = [&](double t, const Vector& s) {
        if (step % stride == 0 || t == t_end) {
            record(t, s);
        }
        ++step;
        return true;
    };
    const std::vector<AffineSegment<Matrix>> segments{{&cl.state_matrix, &cl.forcing, 0.0, t_end}};
    trace.diverged = !integrate_affine(segments, y, opts.dt, observer);
    return trace;
}

std::string_view to_string(CellClass c) noexcept {
    switch (c) {
        case CellClass::stable: return "stable";
        case CellClass::marginal: return "marginal";
        case CellClass::unstable: return "unstable";
    }
    return "unknown";
}

CellClass classify_abscissa(double a) noexcept {
    if (a < -1e-9) {
        return CellClass::stable;
    }
    if (a <= 1e-9) {
        return CellClass::marginal;
    }
    return CellClass::unstable;
}

SweepResult sweep(const MultiplexSystem& sys, const std::vector<double>& sigma_P_grid,
                  const std::vector<double>& sigma_I_grid, unsigned threads) {
    SweepResult out;
    out.sigma_P_grid = sigma_P_grid;
    out.sigma_I_grid = sigma_I_grid;
    out.cells.resize(sigma_P_grid.size() * sigma_I_grid.size());
    if (out.cells.empty()) {
        return out;
    }
    const ErrorSystemFactory factory(sys);

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t idx = next++; idx < out.cells.size(); idx = next++) {
            SweepCell& cell = out.cells[idx];
            cell.sigma_P = sigma_P_grid[idx / sigma_I_grid.size()];
            cell.sigma_I = sigma_I_grid[idx % sigma_I_grid.size()];
            if (!std::isfinite(cell.sigma_P) || !std::isfinite(cell.sigma_I) || cell.sigma_P < 0.0 ||
                cell.sigma_I < 0.0) {
                cell.error = "gains must be finite and non-negative";
                cell.abscissa = std::nan("");
                continue;
            }
            cell.abscissa = factory.at(cell.sigma_P, cell.sigma_I).abscissa();
            if (std::isnan(cell.abscissa)) {
                cell.error = "eigensolver did not converge";
                continue;
            }
            cell.classification = classify_abscissa(cell.abscissa);
        }
    };

    unsigned count = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
    count = static_cast<unsigned>(std::min<std::size_t>(count, out.cells.size()));
    if (count <= 1) {
        worker();
        return out;
    }
    {
        std::vector<std::jthread> pool;
        pool.reserve(count);
        for (unsigned t = 0; t < count; ++t) {
            pool.emplace_back(worker);
        }
    }
    return out;
}

std::vector<double> linspace(double a, double b, std::size_t steps) {
    std::vector<double> out;
    if (steps == 0) {
        return out;
    }
    if (steps == 1) {
        out.push_back(a);
        return out;
    }
    out.reserve(steps);
    for (std::size_t k = 0; k < steps; ++k) {
        out.push_back(a + (b - a) * static_cast<double>(k) / static_cast<double>(steps - 1));
    }
    return out;
}

std::vector<double> cell_centres(double a, double b, std::size_t steps) {
    std::vector<double> out;
    out.reserve(steps);
    for (std::size_t k = 0; k < steps; ++k) {
        out.push_back(a + (b - a) * (static_cast<double>(k) + 0.5) / static_cast<double>(steps));
    }
    return out;
}

}  // namespace mpx
