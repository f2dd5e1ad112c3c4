#include "mpx/power.hpp"

#include "mpx/errors.hpp"
#include "mpx/sim.hpp"

#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace mpx {

namespace {

using Sparse = Eigen::SparseMatrix<double>;

double common_mass(const PowerNetwork& pn) {
    if (!pn.homogeneous_inertia()) {
        throw Error(ErrorCode::not_representable, "generators have different inertia");
    }
    return pn.generators.front().m;
}

Sparse to_sparse(const Matrix& m) {
    return m.sparseView(0.0, 0.0);
}

/// [[diag(h) − σ_P L_P, I], [−M L_I, 0]].
Sparse power_matrix(const PowerNetwork& pn, const Vector& h, double sigma_P, const Matrix& L_P, const Matrix& L_I) {
    const auto N = static_cast<Index>(pn.size());
    Matrix full = Matrix::Zero(2 * N, 2 * N);
    full.topLeftCorner(N, N) = Matrix(h.asDiagonal()) - sigma_P * L_P;
    full.topRightCorner(N, N).setIdentity();
    for (Index i = 0; i < N; ++i) {
        full.block(N + i, 0, 1, N) = -L_I.row(i) / pn.generators[static_cast<std::size_t>(i)].m;
    }
    return to_sparse(full);
}

}  // namespace

LayerGraph PowerNetwork::electrical_graph() const {
    std::vector<Edge> edges;
    edges.reserve(lines.size());
    for (const auto& line : lines) {
        if (line.i >= generators.size() || line.j >= generators.size()) {
            throw Error(ErrorCode::node_out_of_range, "power line references an unknown bus");
        }
        edges.push_back({line.i, line.j, generators[line.i].E * generators[line.j].E * std::abs(line.admittance)});
    }
    return LayerGraph(generators.size(), std::move(edges));
}

bool PowerNetwork::homogeneous_inertia() const noexcept {
    return std::all_of(generators.begin(), generators.end(),
                       [&](const Generator& g) { return g.m == generators.front().m; });
}

void PowerNetwork::validate() const {
    if (generators.empty()) {
        throw Error(ErrorCode::invalid_argument, "power network has no generators");
    }
    for (std::size_t i = 0; i < generators.size(); ++i) {
        const auto& g = generators[i];
        const auto label = "generator " + std::to_string(i + 1);
        if (!(g.m > 0.0) || !(g.d > 0.0) || !(g.E > 0.0)) {
            throw Error(ErrorCode::invalid_argument, label + ": m, d and E must be positive");
        }
        if (!std::isfinite(g.m) || !std::isfinite(g.d) || !std::isfinite(g.k) || !std::isfinite(g.P) ||
            !std::isfinite(g.E)) {
            throw Error(ErrorCode::invalid_argument, label + ": non-finite parameter");
        }
    }
    if (control_layer.node_count() != generators.size()) {
        throw Error(ErrorCode::dimension_mismatch, "control layer size differs from the number of generators");
    }
    if (!std::isfinite(sigma_P) || sigma_P < 0.0) {
        throw Error(ErrorCode::invalid_argument, "sigma_P must be finite and non-negative");
    }
    if (!is_connected(electrical_graph())) {
        throw Error(ErrorCode::disconnected_layer, "electrical network is disconnected");
    }
}

MultiplexSystem as_multiplex(const PowerNetwork& pn) {
    pn.validate();
    const double m = common_mass(pn);
    MultiplexSystem sys{
        .nodes = {},
        .layer_C = LayerGraph::edgeless(pn.size()),
        .layer_P = pn.control_layer,
        .layer_I = pn.electrical_graph(),
        .sigma = 0.0,
        .sigma_P = pn.sigma_P,
        .sigma_I = 1.0 / m,
        .local_feedback = {},
    };
    for (const auto& g : pn.generators) {
        sys.nodes.push_back({Matrix::Constant(1, 1, g.k - g.d / m), Vector::Constant(1, g.P / m)});
    }
    return sys;
}

double equilibrium_frequency(const PowerNetwork& pn) {
    double num = 0.0;
    double den = 0.0;
    double scale = 0.0;
    for (const auto& g : pn.generators) {
        num += g.P;
        den += g.m * g.k - g.d;
        scale += std::abs(g.m * g.k) + std::abs(g.d);
    }
    if (!(std::abs(den) > 1e-12 * scale)) {
        throw Error(ErrorCode::no_equilibrium, "sum of m_i k_i - d_i vanishes; no synchronous equilibrium");
    }
    return -num / den;
}

PowerReport check_power(const PowerNetwork& pn) {
    pn.validate();
    const double m = common_mass(pn);
    const double N = static_cast<double>(pn.size());

    PowerReport rep;
    std::vector<double> a;
    for (const auto& g : pn.generators) {
        a.push_back(g.k - g.d / m);
    }
    rep.max_rate = *std::max_element(a.begin(), a.end());
    for (double v : a) {
        rep.psi11_sum += v;
        rep.spread += (v - a.front()) * (v - a.front());
    }
    rep.psi11 = rep.psi11_sum / N;
    // Same tolerance as the Hurwitz test on the symmetric part 2ψ₁₁.
    rep.c1 = 2.0 * rep.psi11 < -1e-9;
    const double heterogeneity = rep.spread == 0.0 ? 0.0 : rep.spread / (N * std::abs(rep.psi11));
    rep.threshold = heterogeneity + rep.max_rate;
    rep.lambda2_P = algebraic_connectivity(pn.control_layer);
    rep.sigma_P_bound = rep.lambda2_P > 0.0 ? rep.threshold / rep.lambda2_P : std::nan("");
    rep.c2 = pn.sigma_P * rep.lambda2_P - rep.threshold > 0.0;
    rep.electrical_connected = true;
    try {
        rep.omega_infinity = equilibrium_frequency(pn);
    } catch (const Error&) {
        rep.omega_infinity.reset();
    }
    return rep;
}

PowerTrace simulate_power(const PowerNetwork& pn, const PowerScenario& sc) {
    pn.validate();
    const std::size_t N = pn.size();
    const auto n = static_cast<Index>(N);
    if (!(sc.dt > 0.0) || !(sc.t_end > sc.t_start)) {
        throw Error(ErrorCode::invalid_argument, "power scenario needs dt > 0 and t_end > t_start");
    }
    for (const auto& ev : sc.events) {
        if (ev.node >= N) {
            throw Error(ErrorCode::node_out_of_range, "injection event references an unknown bus");
        }
    }

    const Matrix L_I = laplacian(pn.electrical_graph());
    const Matrix L_P = laplacian(pn.control_layer);
    Vector h_off(n), h_on(n), inj(n), mass(n);
    double den_off = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        const auto& g = pn.generators[i];
        const auto ii = static_cast<Index>(i);
        h_off(ii) = -g.d / g.m;
        h_on(ii) = g.k - g.d / g.m;
        inj(ii) = g.P;
        mass(ii) = g.m;
        den_off -= g.d;
    }

    PowerTrace trace;
    trace.nominal_frequency = -inj.sum() / den_off;

    const Sparse off = power_matrix(pn, h_off, 0.0, L_P, L_I);
    const Sparse on = power_matrix(pn, h_on, pn.sigma_P, L_P, L_I);

    // Breakpoints: every event and the switch-on time inside the window.
    std::vector<double> cuts{sc.t_start, sc.t_end};
    for (const auto& ev : sc.events) {
        if (ev.time > sc.t_start && ev.time < sc.t_end) {
            cuts.push_back(ev.time);
        }
    }
    if (sc.control_on && *sc.control_on > sc.t_start && *sc.control_on < sc.t_end) {
        cuts.push_back(*sc.control_on);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    std::vector<Vector> offsets;
    std::vector<AffineSegment<Sparse>> segments;
    offsets.reserve(cuts.size());
    for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
        const double ta = cuts[s];
        Vector p = inj;
        for (const auto& ev : sc.events) {
            if (ev.time <= ta) {
                p(static_cast<Index>(ev.node)) += ev.delta;
            }
        }
        Vector c = Vector::Zero(2 * n);
        c.head(n) = p.cwiseQuotient(mass);
        offsets.push_back(std::move(c));
        const bool controlled = sc.control_on && *sc.control_on <= ta;
        segments.push_back({controlled ? &on : &off, &offsets.back(), ta, cuts[s + 1]});
    }

    Vector y(2 * n);
    y.head(n).setConstant(trace.nominal_frequency);
    y.tail(n) = -(trace.nominal_frequency * h_off + inj.cwiseQuotient(mass));

    const std::size_t stride = std::max<std::size_t>(1, sc.record_every);
    std::size_t step = 0;
    auto observer = [&](double t, const Vector& s) {
        const double dev = (s.head(n).array() - trace.nominal_frequency).abs().maxCoeff();
        const double cons = mass.dot(s.tail(n));
        trace.peak_deviation = std::max(trace.peak_deviation, dev);
        trace.max_conservation_error = std::max(trace.max_conservation_error, std::abs(cons));
        if (step % stride == 0 || t == sc.t_end) {
            trace.times.push_back(t);
            trace.omega.push_back(s.head(n));
            trace.z.push_back(s.tail(n));
            trace.mass_weighted_z.push_back(cons);
        }
        ++step;
        return true;
    };
    trace.diverged = !integrate_affine(segments, y, sc.dt, observer);
    trace.final_max_deviation = trace.diverged
        ? std::numeric_limits<double>::infinity()
        : (y.head(n).array() - trace.nominal_frequency).abs().maxCoeff();
    return trace;
}

}  // namespace mpx
