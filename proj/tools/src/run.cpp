#include "mpx/cli/run.hpp"

#include "mpx/cli/spec_io.hpp"
#include "mpx/design.hpp"
#include "mpx/errors.hpp"
#include "mpx/fixtures.hpp"
#include "mpx/power.hpp"
#include "mpx/sim.hpp"
#include "mpx/spectral.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <thread>

namespace mpx::cli {

namespace {

// ---------------------------------------------------------------------------
// Output helpers
// ---------------------------------------------------------------------------

class KeyValueWriter {
public:
    KeyValueWriter(std::ostream& out, bool csv) : out_(out), csv_(csv) {
        if (csv_) {
            out_ << "quantity,value\n";
        }
    }

    void number(std::string_view key, double v) {
        if (csv_) {
            fmt::print(out_, "{},{:.17g}\n", key, v);
        } else {
            fmt::print(out_, "{:<24}{:.6f}\n", key, v);
        }
    }

    void text(std::string_view key, std::string_view v) {
        if (csv_) {
            fmt::print(out_, "{},{}\n", key, v);
        } else {
            fmt::print(out_, "{:<24}{}\n", key, v);
        }
    }

    void condition(std::string_view key, const Condition& c) {
        if (csv_) {
            fmt::print(out_, "{}_pass,{}\n{}_margin,{:.17g}\n", key, c.pass ? 1 : 0, key, c.margin);
        } else {
            fmt::print(out_, "{:<24}{:<6}margin {:.6f}\n", key, c.pass ? "pass" : "FAIL", c.margin);
        }
    }

    void vector(std::string_view key, const Vector& v) {
        std::string s;
        for (Index i = 0; i < v.size(); ++i) {
            s += csv_ ? fmt::format("{}{:.17g}", i ? " " : "", v(i)) : fmt::format("{}{:.6f}", i ? ", " : "", v(i));
        }
        text(key, csv_ ? s : "[" + s + "]");
    }

private:
    std::ostream& out_;
    bool csv_;
};

void print_report(const StabilityReport& r, std::ostream& out, bool csv) {
    KeyValueWriter w(out, csv);
    w.text("mode", to_string(r.mode));
    w.text("anchor", std::to_string(r.anchor + 1));
    w.text("nodes", std::to_string(r.node_count));
    w.number("mu", r.mu);
    w.number("|eta|", std::abs(r.eta));
    w.number("eta", r.eta);
    w.number("rho", r.rho);
    w.number("lambda2_C", r.lambda2_C);
    w.number("lambda2_P", r.lambda2_P);
    w.number("lambda2_I", r.lambda2_I);
    w.number("lambda2_CP", r.lambda2_CP);
    w.number("threshold", r.threshold);
    w.number("coupling", r.coupling);
    w.text("psi11_nonsingular", r.psi11_nonsingular ? "yes" : "no");
    w.text("psi11_sym_hurwitz", r.psi11_symmetric_hurwitz ? "yes" : "no");
    w.condition("condition_i", r.condition_i);
    w.condition("condition_ii", r.condition_ii);
    w.condition("condition_iii", r.condition_iii);
    if (r.x_infinity) {
        w.vector("x_infinity", *r.x_infinity);
    } else {
        w.text("x_infinity", "undefined");
    }
    w.text("verdict", r.passes() ? "certified" : "not certified");
}

std::ofstream open_output(const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw SpecError(SpecErrorCode::io, "$", "cannot write '" + path + "'");
    }
    return f;
}

// ---------------------------------------------------------------------------
// Argument parsing helpers
// ---------------------------------------------------------------------------

std::optional<std::size_t> parse_anchor(const std::string& text, std::size_t nodes) {
    if (text == "auto") {
        return std::nullopt;
    }
    std::size_t used = 0;
    long long v = 0;
    try {
        v = std::stoll(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != text.size() || v < 1 || static_cast<std::size_t>(v) > nodes) {
        throw SpecError(SpecErrorCode::invalid_value, "--anchor",
                        "expected 'auto' or a node label in 1.." + std::to_string(nodes));
    }
    return static_cast<std::size_t>(v - 1);
}

struct GridArg {
    double a = 0.0;
    double b = 0.0;
    std::size_t steps = 0;
};

GridArg parse_grid_arg(const std::string& text, const std::string& flag) {
    GridArg g;
    char c1 = 0;
    char c2 = 0;
    long long steps = 0;
    std::istringstream in(text);
    if (!(in >> g.a >> c1 >> g.b >> c2 >> steps) || c1 != ':' || c2 != ':' || steps < 1 || !in.eof()) {
        throw SpecError(SpecErrorCode::invalid_value, flag, "expected a:b:steps, got '" + text + "'");
    }
    g.steps = static_cast<std::size_t>(steps);
    return g;
}

unsigned thread_budget(unsigned requested) {
    unsigned n = requested == 0 ? std::max(1u, std::thread::hardware_concurrency()) : requested;
    if (const char* env = std::getenv("MPX_THREADS")) {
        char* end = nullptr;
        const long cap = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && cap >= 1) {
            n = std::min<unsigned>(n, static_cast<unsigned>(cap));
        }
    }
    return n;
}

struct InitialState {
    Vector x0;
    std::optional<std::uint64_t> seed;
};

InitialState initial_state(const std::string& spec, Index len) {
    if (spec == "zero") {
        return {Vector::Zero(len), std::nullopt};
    }
    if (spec.rfind("random:", 0) == 0) {
        const std::string s = spec.substr(7);
        std::size_t used = 0;
        unsigned long long seed = 0;
        try {
            seed = std::stoull(s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (s.empty() || used != s.size()) {
            throw SpecError(SpecErrorCode::invalid_value, "--x0", "bad seed in '" + spec + "'");
        }
        return {random_initial_state(seed, len), seed};
    }
    std::ifstream in(spec, std::ios::binary);
    if (!in) {
        throw SpecError(SpecErrorCode::io, "--x0", "cannot open '" + spec + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    Vector v = parse_vector_text(ss.str());
    if (v.size() != len) {
        throw SpecError(SpecErrorCode::dimension_mismatch, "--x0",
                        "initial state has " + std::to_string(v.size()) + " entries, expected " + std::to_string(len));
    }
    return {v, std::nullopt};
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

struct CheckArgs {
    std::string network;
    std::string format = "table";
    std::string anchor = "1";
    bool verify_spectral = false;
};

int cmd_check(const CheckArgs& a, std::ostream& out) {
    const NetworkSpec spec = load_network(a.network);
    const MultiplexSystem& sys = spec.system;
    sys.validate();
    const auto anchor = parse_anchor(a.anchor, sys.nodes.size());
    const StabilityReport r = check_theorem(sys, CheckOptions{anchor.value_or(0), !anchor.has_value()});
    const bool csv = a.format == "csv";
    print_report(r, out, csv);
    bool ok = r.passes();

    if (a.verify_spectral) {
        out << (csv ? "layer,property,identity,residual\n" : "\n");
        if (!csv) {
            fmt::print(out, "{:<7}{:<22}{:<48}{}\n", "layer", "property", "identity", "residual");
        }
        const std::pair<const char*, const LayerGraph*> layers[] = {
            {"C", &sys.layer_C}, {"P", &sys.layer_P}, {"I", &sys.layer_I}};
        for (const auto& [name, g] : layers) {
            const Matrix L = laplacian(*g);
            const PropertyReport pr = verify_block_properties(block_decompose(L), sys.state_dim(), L);
            for (const auto& p : pr.identities) {
                if (csv) {
                    fmt::print(out, "{},{},\"{}\",{:.17g}\n", name, p.name, p.identity, p.residual);
                } else {
                    fmt::print(out, "{:<7}{:<22}{:<48}{:.3e}\n", name, p.name, p.identity, p.residual);
                }
            }
            if (csv) {
                fmt::print(out, "{},reassembly,\"R Lambda R^-1 = L\",{:.17g}\n", name, pr.reassembly);
            } else {
                fmt::print(out, "{:<7}{:<22}{:<48}{:.3e}\n", name, "reassembly", "R Lambda R^-1 = L", pr.reassembly);
            }
            ok = ok && pr.passes();
        }
    }
    return ok ? exit_ok : exit_condition_failed;
}

struct TuneArgs {
    std::string network;
    std::string format = "table";
    std::string anchor = "auto";
};

int cmd_tune(const TuneArgs& a, std::ostream& out) {
    const NetworkSpec spec = load_network(a.network);
    spec.system.validate();
    TuneOptions opts;
    opts.anchor = parse_anchor(a.anchor, spec.system.nodes.size());
    const TuningResult t = tune(spec.system, opts);
    const bool csv = a.format == "csv";
    {
        KeyValueWriter w(out, csv);
        w.number("sigma_P_min", t.sigma_P_min);
        w.number("certified_sigma_P", t.certified_sigma_P);
        w.text("feasible", t.feasible ? "yes" : "no");
        w.text("used_local_feedback", t.used_local_feedback ? "yes" : "no");
        w.text("anchor", std::to_string(t.anchor + 1));
    }
    out << (csv ? "" : "\ncertifying report\n");
    print_report(t.report, out, csv);
    return t.feasible ? exit_ok : exit_condition_failed;
}

struct SimulateArgs {
    std::string network;
    std::optional<double> t_end;
    std::optional<double> dt;
    std::optional<std::string> x0;
    std::size_t every = 1;
    std::string out_path;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
    const NetworkSpec spec = load_network(a.network);
    const MultiplexSystem& sys = spec.system;
    sys.validate();
    const Index nN = sys.node_count() * sys.state_dim();

    SimOptions opts;
    opts.t_end = a.t_end.value_or(spec.sim.t_end.value_or(10.0));
    opts.dt = a.dt.value_or(spec.sim.dt.value_or(1e-3));
    opts.record_every = a.every;
    const std::string x0_spec = a.x0.value_or(spec.sim.x0.value_or("zero"));
    const InitialState init = initial_state(x0_spec, nN);
    const SimTrace trace = simulate(sys, init.x0, opts);

    std::unique_ptr<std::ofstream> file;
    if (!a.out_path.empty()) {
        file = std::make_unique<std::ofstream>(open_output(a.out_path));
    }
    std::ostream& csv = file ? *file : out;
    if (init.seed) {
        fmt::print(csv, "# x0 random seed {} (mt19937_64, uniform on [-{}, {}])\n", *init.seed, kRandomStateHalfWidth, kRandomStateHalfWidth);
    } else {
        fmt::print(csv, "# x0 {}\n", x0_spec);
    }
    fmt::print(csv, "# t_end {:.17g} dt {:.17g}{}\n", opts.t_end, opts.dt, trace.diverged ? " diverged" : "");
    std::string header = "t";
    for (Index i = 1; i <= nN; ++i) {
        header += fmt::format(",x_{}", i);
    }
    for (Index i = 1; i <= nN; ++i) {
        header += fmt::format(",z_{}", i);
    }
    csv << header << ",d_x\n";
    fmt::memory_buffer line;
    for (std::size_t s = 0; s < trace.times.size(); ++s) {
        line.clear();
        fmt::format_to(std::back_inserter(line), "{:.17g}", trace.times[s]);
        for (Index i = 0; i < nN; ++i) {
            fmt::format_to(std::back_inserter(line), ",{:.17g}", trace.states[s](i));
        }
        for (Index i = 0; i < nN; ++i) {
            fmt::format_to(std::back_inserter(line), ",{:.17g}", trace.integrals[s](i));
        }
        fmt::format_to(std::back_inserter(line), ",{:.17g}\n", trace.d_x[s]);
        csv.write(line.data(), static_cast<std::streamsize>(line.size()));
    }
    return trace.diverged ? exit_condition_failed : exit_ok;
}

struct SweepArgs {
    std::string network;
    std::string sigma_p;
    std::string sigma_i;
    bool centres = false;
    unsigned threads = 0;
    std::string out_path;
};

int cmd_sweep(const SweepArgs& a, std::ostream& out) {
    const NetworkSpec spec = load_network(a.network);
    const GridArg gp = parse_grid_arg(a.sigma_p, "--sigma-p");
    const GridArg gi = parse_grid_arg(a.sigma_i, "--sigma-i");
    auto grid = [&](const GridArg& g) { return a.centres ? cell_centres(g.a, g.b, g.steps) : linspace(g.a, g.b, g.steps); };
    const SweepResult res = sweep(spec.system, grid(gp), grid(gi), thread_budget(a.threads));

    std::unique_ptr<std::ofstream> file;
    if (!a.out_path.empty()) {
        file = std::make_unique<std::ofstream>(open_output(a.out_path));
    }
    std::ostream& csv = file ? *file : out;
    csv << "sigma_p,sigma_i,abscissa,stable,class\n";
    for (const auto& c : res.cells) {
        fmt::print(csv, "{:.17g},{:.17g},{:.17g},{},{}\n", c.sigma_P, c.sigma_I, c.abscissa,
                   c.error.empty() && c.classification == CellClass::stable ? 1 : 0,
                   c.error.empty() ? std::string(to_string(c.classification)) : "error");
    }
    return exit_ok;
}

struct PowerArgs {
    std::string grid;  // empty: built-in sixteen-bus fixture
    std::optional<double> sigma_p;
    std::optional<double> dt;
    std::optional<double> t_end;
    std::string out_path;
    std::string format = "table";
};

int cmd_power(const PowerArgs& a, std::ostream& out) {
    std::optional<PowerScenario> scenario;
    PowerNetwork pn = [&] {
        if (a.grid.empty()) {
            scenario = fixtures::sixteen_bus_scenario();
            return fixtures::sixteen_bus_grid();
        }
        GridSpec g = load_grid(a.grid);
        scenario = std::move(g.scenario);
        return std::move(g.network);
    }();
    if (a.sigma_p) {
        pn.sigma_P = *a.sigma_p;
    }
    if (scenario) {
        scenario->dt = a.dt.value_or(scenario->dt);
        scenario->t_end = a.t_end.value_or(scenario->t_end);
    }
    pn.validate();

    const bool csv = a.format == "csv";
    KeyValueWriter w(out, csv);
    bool ok = true;
    if (pn.homogeneous_inertia()) {
        const PowerReport r = check_power(pn);
        w.number("psi11", r.psi11);
        w.number("psi11_sum", r.psi11_sum);
        w.number("max_rate", r.max_rate);
        w.number("threshold", r.threshold);
        w.number("lambda2_P", r.lambda2_P);
        w.number("sigma_P_bound", r.sigma_P_bound);
        w.number("sigma_P", pn.sigma_P);
        w.text("c1", r.c1 ? "pass" : "FAIL");
        w.text("c2", r.c2 ? "pass" : "FAIL");
        ok = r.passes();
    } else {
        w.text("conditions", "not applicable (heterogeneous inertia)");
    }

    PowerNetwork open = pn;
    for (auto& g : open.generators) {
        g.k = 0.0;
    }
    auto print_frequency = [&](std::string_view key, const PowerNetwork& net) {
        try {
            w.number(key, equilibrium_frequency(net));
        } catch (const Error&) {
            w.text(key, "undefined");
        }
    };
    print_frequency("omega_inf_open_loop", open);
    if (scenario) {
        PowerNetwork disturbed = pn;
        for (const auto& ev : scenario->events) {
            if (ev.time < scenario->t_end) {
                disturbed.generators[ev.node].P += ev.delta;
            }
        }
        if (!scenario->control_on) {
            for (auto& g : disturbed.generators) {
                g.k = 0.0;
            }
        }
        print_frequency("omega_inf_final", disturbed);

        const PowerTrace trace = simulate_power(pn, *scenario);
        w.number("nominal_frequency", trace.nominal_frequency);
        w.number("final_max_deviation", trace.final_max_deviation);
        w.number("peak_deviation", trace.peak_deviation);
        w.number("max_abs_sum_mz", trace.max_conservation_error);
        w.text("diverged", trace.diverged ? "yes" : "no");
        ok = ok && !trace.diverged;

        if (!a.out_path.empty()) {
            std::ofstream f = open_output(a.out_path);
            std::string header = "t";
            for (std::size_t i = 1; i <= pn.size(); ++i) {
                header += fmt::format(",omega_{}", i);
            }
            for (std::size_t i = 1; i <= pn.size(); ++i) {
                header += fmt::format(",z_{}", i);
            }
            f << header << ",sum_mz\n";
            for (std::size_t s = 0; s < trace.times.size(); ++s) {
                fmt::print(f, "{:.17g}", trace.times[s]);
                for (Index i = 0; i < trace.omega[s].size(); ++i) {
                    fmt::print(f, ",{:.17g}", trace.omega[s](i));
                }
                for (Index i = 0; i < trace.z[s].size(); ++i) {
                    fmt::print(f, ",{:.17g}", trace.z[s](i));
                }
                fmt::print(f, ",{:.17g}\n", trace.mass_weighted_z[s]);
            }
        }
    }
    return ok ? exit_ok : exit_condition_failed;
}

int error_status(ErrorCode code) {
    switch (code) {
        case ErrorCode::no_equilibrium:
        case ErrorCode::infeasible:
        case ErrorCode::not_applicable:
        case ErrorCode::disconnected_layer:
            return exit_condition_failed;
        default:
            return exit_input_error;
    }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Multiplex PI consensus: stability certificates, gain tuning, simulation and sweeps", "mpx"};
    app.require_subcommand(1, 1);
    app.failure_message(CLI::FailureMessage::help);

    CheckArgs check_args;
    auto* check = app.add_subcommand("check", "Evaluate the sufficient conditions for admissible consensus");
    check->add_option("network", check_args.network, "Network description (JSON)")->required();
    check->add_option("--format", check_args.format, "table or csv")->check(CLI::IsMember({"table", "csv"}));
    check->add_option("--anchor", check_args.anchor, "Anchor node: auto or a label (default 1)");
    check->add_flag("--verify-spectral", check_args.verify_spectral, "Also print block-decomposition residuals");

    TuneArgs tune_args;
    auto* tune_cmd = app.add_subcommand("tune", "Smallest certified proportional gain");
    tune_cmd->add_option("network", tune_args.network, "Network description (JSON)")->required();
    tune_cmd->add_option("--format", tune_args.format, "table or csv")->check(CLI::IsMember({"table", "csv"}));
    tune_cmd->add_option("--anchor", tune_args.anchor, "Anchor node: auto (default) or a label");

    SimulateArgs sim_args;
    auto* sim = app.add_subcommand("simulate", "Integrate the closed loop and write a CSV trace");
    sim->add_option("network", sim_args.network, "Network description (JSON)")->required();
    sim->add_option("--t-end", sim_args.t_end, "Final time");
    sim->add_option("--dt", sim_args.dt, "RK4 step");
    sim->add_option("--x0", sim_args.x0, "Initial state: a file, random:SEED or zero");
    sim->add_option("--every", sim_args.every, "Record every k-th step")->check(CLI::PositiveNumber);
    sim->add_option("--out", sim_args.out_path, "Write the CSV here instead of stdout");

    SweepArgs sweep_args;
    auto* sw = app.add_subcommand("sweep", "Error-dynamics spectral abscissa over a gain grid");
    sw->add_option("network", sweep_args.network, "Network description (JSON)")->required();
    sw->add_option("--sigma-p", sweep_args.sigma_p, "a:b:steps")->required();
    sw->add_option("--sigma-i", sweep_args.sigma_i, "a:b:steps")->required();
    sw->add_flag("--centers,--centres", sweep_args.centres, "Sample cell centres instead of end points");
    sw->add_option("--threads", sweep_args.threads, "Worker threads (0: all cores; capped by MPX_THREADS)");
    sw->add_option("--out", sweep_args.out_path, "Write the CSV here instead of stdout");

    PowerArgs demo_args;
    auto* demo = app.add_subcommand("power-demo", "Sixteen-bus frequency-control scenario");
    demo->add_option("--sigma-p", demo_args.sigma_p, "Proportional gain (default 55)");
    demo->add_option("--dt", demo_args.dt, "RK4 step");
    demo->add_option("--t-end", demo_args.t_end, "Final time");
    demo->add_option("--out", demo_args.out_path, "Write the frequency trace CSV here");
    demo->add_option("--format", demo_args.format, "table or csv")->check(CLI::IsMember({"table", "csv"}));

    PowerArgs grid_args;
    auto* grid = app.add_subcommand("power", "Conditions and scenario for a user grid");
    grid->add_option("grid", grid_args.grid, "Grid description (JSON)")->required();
    grid->add_option("--sigma-p", grid_args.sigma_p, "Override the proportional gain");
    grid->add_option("--dt", grid_args.dt, "RK4 step");
    grid->add_option("--t-end", grid_args.t_end, "Final time");
    grid->add_option("--out", grid_args.out_path, "Write the frequency trace CSV here");
    grid->add_option("--format", grid_args.format, "table or csv")->check(CLI::IsMember({"table", "csv"}));

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e, out, err);
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return exit_input_error;
    }

    try {
        if (check->parsed()) {
            return cmd_check(check_args, out);
        }
        if (tune_cmd->parsed()) {
            return cmd_tune(tune_args, out);
        }
        if (sim->parsed()) {
            return cmd_simulate(sim_args, out);
        }
        if (sw->parsed()) {
            return cmd_sweep(sweep_args, out);
        }
        if (demo->parsed()) {
            return cmd_power(demo_args, out);
        }
        if (grid->parsed()) {
            return cmd_power(grid_args, out);
        }
    } catch (const SpecError& e) {
        fmt::print(err, "error [{}] {}\n", to_string(e.code()), e.what());
        return exit_input_error;
    } catch (const Error& e) {
        fmt::print(err, "error [{}] {}\n", to_string(e.code()), e.what());
        return error_status(e.code());
    }
    return exit_input_error;
}

}  // namespace mpx::cli
