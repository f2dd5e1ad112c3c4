#include "mpx/cli/spec_io.hpp"

#include "mpx/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <random>
#include <set>
#include <sstream>
#include <utility>

namespace mpx::cli {

namespace {

using json = nlohmann::json;

[[noreturn]] void fail(SpecErrorCode code, const std::string& path, const std::string& msg) {
    throw SpecError(code, path, msg);
}

std::string key_path(const std::string& base, std::string_view key) {
    return base + "." + std::string(key);
}

std::string index_path(const std::string& base, std::size_t i) {
    return base + "[" + std::to_string(i) + "]";
}

void require_object(const json& j, const std::string& path) {
    if (!j.is_object()) {
        fail(SpecErrorCode::wrong_type, path, "expected an object");
    }
}

void require_array(const json& j, const std::string& path) {
    if (!j.is_array()) {
        fail(SpecErrorCode::wrong_type, path, "expected an array");
    }
}

void reject_unknown(const json& obj, std::initializer_list<std::string_view> allowed, const std::string& path) {
    for (const auto& [key, value] : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            fail(SpecErrorCode::unknown_key, key_path(path, key), "unknown key '" + key + "'");
        }
    }
}

const json& member(const json& obj, std::string_view key, const std::string& path) {
    const auto it = obj.find(std::string(key));
    if (it == obj.end()) {
        fail(SpecErrorCode::missing_key, key_path(path, key), "missing required key '" + std::string(key) + "'");
    }
    return *it;
}

const json* optional_member(const json& obj, std::string_view key) {
    const auto it = obj.find(std::string(key));
    return it == obj.end() ? nullptr : &*it;
}

double number(const json& j, const std::string& path) {
    if (!j.is_number()) {
        fail(SpecErrorCode::wrong_type, path, "expected a number");
    }
    const double v = j.get<double>();
    if (!std::isfinite(v)) {
        fail(SpecErrorCode::invalid_value, path, "number must be finite");
    }
    return v;
}

std::size_t positive_integer(const json& j, const std::string& path) {
    if (!j.is_number_integer() || j.get<long long>() < 1) {
        fail(SpecErrorCode::wrong_type, path, "expected a positive integer");
    }
    return static_cast<std::size_t>(j.get<long long>());
}

Vector vector_of(const json& j, Index len, const std::string& path, const std::string& what) {
    require_array(j, path);
    if (static_cast<Index>(j.size()) != len) {
        fail(SpecErrorCode::dimension_mismatch, path,
             what + " has " + std::to_string(j.size()) + " entries, expected " + std::to_string(len));
    }
    Vector v(len);
    for (Index i = 0; i < len; ++i) {
        v(i) = number(j[static_cast<std::size_t>(i)], index_path(path, static_cast<std::size_t>(i)));
    }
    return v;
}

Matrix matrix_of(const json& j, Index n, const std::string& path, const std::string& what) {
    require_array(j, path);
    if (static_cast<Index>(j.size()) != n) {
        fail(SpecErrorCode::dimension_mismatch, path,
             what + " has " + std::to_string(j.size()) + " rows, expected " + std::to_string(n));
    }
    Matrix m(n, n);
    for (Index r = 0; r < n; ++r) {
        const auto rpath = index_path(path, static_cast<std::size_t>(r));
        const json& row = j[static_cast<std::size_t>(r)];
        require_array(row, rpath);
        if (static_cast<Index>(row.size()) != n) {
            fail(SpecErrorCode::dimension_mismatch, rpath,
                 what + " row " + std::to_string(r + 1) + " has " + std::to_string(row.size()) +
                     " entries, expected " + std::to_string(n));
        }
        for (Index c = 0; c < n; ++c) {
            m(r, c) = number(row[static_cast<std::size_t>(c)], index_path(rpath, static_cast<std::size_t>(c)));
        }
    }
    return m;
}

LayerGraph edges_of(const json& j, std::size_t nodes, const std::string& path) {
    require_array(j, path);
    std::vector<Edge> edges;
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (std::size_t e = 0; e < j.size(); ++e) {
        const auto epath = index_path(path, e);
        const json& item = j[e];
        require_array(item, epath);
        if (item.size() != 2 && item.size() != 3) {
            fail(SpecErrorCode::wrong_type, epath, "edge must be [i, j] or [i, j, weight]");
        }
        std::size_t ends[2];
        for (std::size_t k = 0; k < 2; ++k) {
            const auto kpath = index_path(epath, k);
            if (!item[k].is_number_integer()) {
                fail(SpecErrorCode::wrong_type, kpath, "node label must be an integer");
            }
            const long long label = item[k].get<long long>();
            if (label < 1 || static_cast<std::size_t>(label) > nodes) {
                fail(SpecErrorCode::node_out_of_range, kpath,
                     "node " + std::to_string(label) + " outside 1.." + std::to_string(nodes));
            }
            ends[k] = static_cast<std::size_t>(label - 1);
        }
        if (ends[0] == ends[1]) {
            fail(SpecErrorCode::self_loop, epath, "self-loop at node " + std::to_string(ends[0] + 1));
        }
        const double w = item.size() == 3 ? number(item[2], index_path(epath, 2)) : 1.0;
        if (!(w > 0.0)) {
            fail(SpecErrorCode::non_positive_weight, index_path(epath, 2), "edge weight must be positive");
        }
        if (!seen.insert(std::minmax(ends[0], ends[1])).second) {
            fail(SpecErrorCode::duplicate_edge, epath,
                 "duplicate edge (" + std::to_string(ends[0] + 1) + ", " + std::to_string(ends[1] + 1) + ")");
        }
        edges.push_back({ends[0], ends[1], w});
    }
    return LayerGraph(nodes, std::move(edges));
}

struct ParsedLayer {
    LayerGraph graph;
    double sigma;
};

ParsedLayer layer_of(const json& j, std::size_t nodes, const std::string& path) {
    require_object(j, path);
    reject_unknown(j, {"n", "edges", "sigma"}, path);
    if (const json* n = optional_member(j, "n")) {
        if (positive_integer(*n, key_path(path, "n")) != nodes) {
            fail(SpecErrorCode::dimension_mismatch, key_path(path, "n"), "layer node count differs from the node list");
        }
    }
    LayerGraph g = edges_of(member(j, "edges", path), nodes, key_path(path, "edges"));
    const double sigma = number(member(j, "sigma", path), key_path(path, "sigma"));
    if (sigma < 0.0) {
        fail(SpecErrorCode::invalid_value, key_path(path, "sigma"), "gain must be non-negative");
    }
    return {std::move(g), sigma};
}

json parse_json(std::string_view text) {
    try {
        return json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        fail(SpecErrorCode::malformed_json, "$", std::string("malformed JSON: ") + e.what());
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        fail(SpecErrorCode::io, "$", "cannot open '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json matrix_json(const Matrix& m) {
    json rows = json::array();
    for (Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Index c = 0; c < m.cols(); ++c) {
            row.push_back(m(r, c));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

json vector_json(const Vector& v) {
    json out = json::array();
    for (Index i = 0; i < v.size(); ++i) {
        out.push_back(v(i));
    }
    return out;
}

json edges_json(const LayerGraph& g) {
    json out = json::array();
    for (const auto& e : g.edges()) {
        out.push_back(json::array({e.i + 1, e.j + 1, e.weight}));
    }
    return out;
}

json layer_json(const LayerGraph& g, double sigma) {
    return json{{"edges", edges_json(g)}, {"sigma", sigma}};
}

// Like json::dump(2), but arrays whose elements are all scalars, and arrays
// of such arrays with at most four entries each, stay on one line.
bool is_flat(const json& j) {
    if (!j.is_array()) {
        return false;
    }
    return std::all_of(j.begin(), j.end(), [](const json& e) { return e.is_primitive(); });
}

bool is_compact(const json& j) {
    if (is_flat(j)) {
        return true;
    }
    return j.is_array() && !j.empty() &&
           std::all_of(j.begin(), j.end(), [](const json& e) { return is_flat(e) && e.size() <= 4; });
}

void pretty(const json& j, std::string& out, int depth) {
    const std::string pad(static_cast<std::size_t>(2 * (depth + 1)), ' ');
    const std::string close(static_cast<std::size_t>(2 * depth), ' ');
    if (is_compact(j)) {
        out += j.dump();
        return;
    }
    if (j.is_object() && !j.empty()) {
        out += "{\n";
        std::size_t k = 0;
        for (auto it = j.begin(); it != j.end(); ++it, ++k) {
            out += pad + json(it.key()).dump() + ": ";
            pretty(it.value(), out, depth + 1);
            out += k + 1 < j.size() ? ",\n" : "\n";
        }
        out += close + "}";
        return;
    }
    if (j.is_array() && !j.empty()) {
        out += "[\n";
        for (std::size_t k = 0; k < j.size(); ++k) {
            out += pad;
            pretty(j[k], out, depth + 1);
            out += k + 1 < j.size() ? ",\n" : "\n";
        }
        out += close + "]";
        return;
    }
    out += j.dump();
}

std::string pretty(const json& j) {
    std::string out;
    pretty(j, out, 0);
    return out + "\n";
}

}  // namespace

std::string_view to_string(SpecErrorCode code) noexcept {
    switch (code) {
        case SpecErrorCode::io: return "io";
        case SpecErrorCode::malformed_json: return "malformed_json";
        case SpecErrorCode::missing_key: return "missing_key";
        case SpecErrorCode::unknown_key: return "unknown_key";
        case SpecErrorCode::wrong_type: return "wrong_type";
        case SpecErrorCode::dimension_mismatch: return "dimension_mismatch";
        case SpecErrorCode::self_loop: return "self_loop";
        case SpecErrorCode::duplicate_edge: return "duplicate_edge";
        case SpecErrorCode::non_positive_weight: return "non_positive_weight";
        case SpecErrorCode::node_out_of_range: return "node_out_of_range";
        case SpecErrorCode::invalid_value: return "invalid_value";
    }
    return "unknown";
}

SpecError::SpecError(SpecErrorCode code, std::string path, const std::string& message)
    : std::runtime_error(path + ": " + message), code_(code), path_(std::move(path)) {}

NetworkSpec parse_network(std::string_view text) {
    const json root = parse_json(text);
    const std::string rp = "$";
    require_object(root, rp);
    reject_unknown(root, {"n", "nodes", "layers", "sim"}, rp);

    const auto n = static_cast<Index>(positive_integer(member(root, "n", rp), "$.n"));
    const json& nodes = member(root, "nodes", rp);
    require_array(nodes, "$.nodes");
    if (nodes.size() < 2) {
        fail(SpecErrorCode::dimension_mismatch, "$.nodes", "at least two nodes are required");
    }
    const std::size_t N = nodes.size();

    std::vector<NodeDynamics> dyn;
    std::vector<Matrix> feedback;
    bool any_feedback = false;
    for (std::size_t k = 0; k < N; ++k) {
        const auto np = index_path("$.nodes", k);
        const json& node = nodes[k];
        require_object(node, np);
        reject_unknown(node, {"A", "b", "H"}, np);
        const std::string label = "node " + std::to_string(k + 1);
        NodeDynamics d{matrix_of(member(node, "A", np), n, key_path(np, "A"), label + " A"),
                       vector_of(member(node, "b", np), n, key_path(np, "b"), label + " b")};
        dyn.push_back(std::move(d));
        if (const json* h = optional_member(node, "H")) {
            feedback.push_back(matrix_of(*h, n, key_path(np, "H"), label + " H"));
            any_feedback = true;
        } else {
            feedback.push_back(Matrix::Zero(n, n));
        }
    }

    const json& layers = member(root, "layers", rp);
    require_object(layers, "$.layers");
    reject_unknown(layers, {"C", "P", "I"}, "$.layers");
    ParsedLayer c{LayerGraph::edgeless(N), 0.0};
    if (const json* cj = optional_member(layers, "C")) {
        c = layer_of(*cj, N, "$.layers.C");
    }
    ParsedLayer p = layer_of(member(layers, "P", "$.layers"), N, "$.layers.P");
    ParsedLayer i = layer_of(member(layers, "I", "$.layers"), N, "$.layers.I");

    NetworkSpec spec{
        .system =
            MultiplexSystem{
                .nodes = std::move(dyn),
                .layer_C = std::move(c.graph),
                .layer_P = std::move(p.graph),
                .layer_I = std::move(i.graph),
                .sigma = c.sigma,
                .sigma_P = p.sigma,
                .sigma_I = i.sigma,
                .local_feedback = any_feedback ? std::move(feedback) : std::vector<Matrix>{},
            },
        .sim = {},
    };

    if (const json* sim = optional_member(root, "sim")) {
        require_object(*sim, "$.sim");
        reject_unknown(*sim, {"t_end", "dt", "x0"}, "$.sim");
        if (const json* v = optional_member(*sim, "t_end")) {
            spec.sim.t_end = number(*v, "$.sim.t_end");
        }
        if (const json* v = optional_member(*sim, "dt")) {
            spec.sim.dt = number(*v, "$.sim.dt");
        }
        if (const json* v = optional_member(*sim, "x0")) {
            if (!v->is_string()) {
                fail(SpecErrorCode::wrong_type, "$.sim.x0", "expected a string (file path or random:SEED)");
            }
            spec.sim.x0 = v->get<std::string>();
        }
    }
    return spec;
}

NetworkSpec load_network(const std::string& path) {
    return parse_network(read_file(path));
}

std::string serialize_network(const NetworkSpec& spec) {
    const MultiplexSystem& sys = spec.system;
    json root;
    root["n"] = sys.state_dim();
    json nodes = json::array();
    for (std::size_t k = 0; k < sys.nodes.size(); ++k) {
        json node{{"A", matrix_json(sys.nodes[k].A)}, {"b", vector_json(sys.nodes[k].b)}};
        if (!sys.local_feedback.empty()) {
            node["H"] = matrix_json(sys.local_feedback[k]);
        }
        nodes.push_back(std::move(node));
    }
    root["nodes"] = std::move(nodes);
    root["layers"] = json{{"C", layer_json(sys.layer_C, sys.sigma)},
                          {"P", layer_json(sys.layer_P, sys.sigma_P)},
                          {"I", layer_json(sys.layer_I, sys.sigma_I)}};
    json sim = json::object();
    if (spec.sim.t_end) {
        sim["t_end"] = *spec.sim.t_end;
    }
    if (spec.sim.dt) {
        sim["dt"] = *spec.sim.dt;
    }
    if (spec.sim.x0) {
        sim["x0"] = *spec.sim.x0;
    }
    if (!sim.empty()) {
        root["sim"] = std::move(sim);
    }
    return pretty(root);
}

GridSpec parse_grid(std::string_view text) {
    const json root = parse_json(text);
    require_object(root, "$");
    reject_unknown(root, {"generators", "lines", "control", "scenario"}, "$");

    const json& gens = member(root, "generators", "$");
    require_array(gens, "$.generators");
    if (gens.empty()) {
        fail(SpecErrorCode::dimension_mismatch, "$.generators", "at least one generator is required");
    }
    const std::size_t N = gens.size();
    std::vector<Generator> generators;
    for (std::size_t i = 0; i < N; ++i) {
        const auto gp = index_path("$.generators", i);
        const json& g = gens[i];
        require_object(g, gp);
        reject_unknown(g, {"m", "d", "k", "P", "E"}, gp);
        Generator gen;
        gen.m = number(member(g, "m", gp), key_path(gp, "m"));
        gen.d = number(member(g, "d", gp), key_path(gp, "d"));
        gen.P = number(member(g, "P", gp), key_path(gp, "P"));
        if (const json* k = optional_member(g, "k")) {
            gen.k = number(*k, key_path(gp, "k"));
        }
        if (const json* e = optional_member(g, "E")) {
            gen.E = number(*e, key_path(gp, "E"));
        }
        for (auto [v, name] : {std::pair{gen.m, "m"}, std::pair{gen.d, "d"}, std::pair{gen.E, "E"}}) {
            if (!(v > 0.0)) {
                fail(SpecErrorCode::invalid_value, key_path(gp, name), std::string(name) + " must be positive");
            }
        }
        generators.push_back(gen);
    }

    const LayerGraph electrical = edges_of(member(root, "lines", "$"), N, "$.lines");
    const ParsedLayer control = layer_of(member(root, "control", "$"), N, "$.control");

    GridSpec spec{
        .network =
            PowerNetwork{
                .generators = std::move(generators),
                .lines = {},
                .control_layer = control.graph,
                .sigma_P = control.sigma,
            },
        .scenario = std::nullopt,
    };
    for (const auto& e : electrical.edges()) {
        spec.network.lines.push_back({e.i, e.j, e.weight});
    }

    if (const json* sc = optional_member(root, "scenario")) {
        require_object(*sc, "$.scenario");
        reject_unknown(*sc, {"events", "control_on", "t_start", "t_end", "dt", "record_every"}, "$.scenario");
        PowerScenario scenario;
        scenario.control_on.reset();
        if (const json* ev = optional_member(*sc, "events")) {
            require_array(*ev, "$.scenario.events");
            for (std::size_t e = 0; e < ev->size(); ++e) {
                const auto ep = index_path("$.scenario.events", e);
                const json& item = (*ev)[e];
                require_object(item, ep);
                reject_unknown(item, {"time", "node", "delta"}, ep);
                const std::size_t node = positive_integer(member(item, "node", ep), key_path(ep, "node"));
                if (node > N) {
                    fail(SpecErrorCode::node_out_of_range, key_path(ep, "node"), "bus outside 1.." + std::to_string(N));
                }
                scenario.events.push_back({number(member(item, "time", ep), key_path(ep, "time")), node - 1,
                                           number(member(item, "delta", ep), key_path(ep, "delta"))});
            }
        }
        if (const json* v = optional_member(*sc, "control_on")) {
            scenario.control_on = number(*v, "$.scenario.control_on");
        }
        if (const json* v = optional_member(*sc, "t_start")) {
            scenario.t_start = number(*v, "$.scenario.t_start");
        }
        if (const json* v = optional_member(*sc, "t_end")) {
            scenario.t_end = number(*v, "$.scenario.t_end");
        }
        if (const json* v = optional_member(*sc, "dt")) {
            scenario.dt = number(*v, "$.scenario.dt");
            if (!(scenario.dt > 0.0)) {
                fail(SpecErrorCode::invalid_value, "$.scenario.dt", "dt must be positive");
            }
        }
        if (const json* v = optional_member(*sc, "record_every")) {
            scenario.record_every = positive_integer(*v, "$.scenario.record_every");
        }
        if (!(scenario.t_end > scenario.t_start)) {
            fail(SpecErrorCode::invalid_value, "$.scenario.t_end", "t_end must exceed t_start");
        }
        spec.scenario = std::move(scenario);
    }
    return spec;
}

GridSpec load_grid(const std::string& path) {
    return parse_grid(read_file(path));
}

std::string serialize_grid(const GridSpec& spec) {
    const PowerNetwork& pn = spec.network;
    json root;
    json gens = json::array();
    for (const auto& g : pn.generators) {
        gens.push_back(json{{"m", g.m}, {"d", g.d}, {"k", g.k}, {"P", g.P}, {"E", g.E}});
    }
    root["generators"] = std::move(gens);
    json lines = json::array();
    for (const auto& l : pn.lines) {
        lines.push_back(json::array({l.i + 1, l.j + 1, l.admittance}));
    }
    root["lines"] = std::move(lines);
    root["control"] = layer_json(pn.control_layer, pn.sigma_P);
    if (spec.scenario) {
        const PowerScenario& sc = *spec.scenario;
        json events = json::array();
        for (const auto& e : sc.events) {
            events.push_back(json{{"time", e.time}, {"node", e.node + 1}, {"delta", e.delta}});
        }
        json s{{"events", std::move(events)},
               {"t_start", sc.t_start},
               {"t_end", sc.t_end},
               {"dt", sc.dt},
               {"record_every", sc.record_every}};
        if (sc.control_on) {
            s["control_on"] = *sc.control_on;
        }
        root["scenario"] = std::move(s);
    }
    return pretty(root);
}

Vector parse_vector_text(std::string_view text) {
    std::string cleaned(text);
    const auto first = cleaned.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && cleaned[first] == '[') {
        const json j = parse_json(text);
        require_array(j, "$");
        Vector v(static_cast<Index>(j.size()));
        for (std::size_t i = 0; i < j.size(); ++i) {
            v(static_cast<Index>(i)) = number(j[i], index_path("$", i));
        }
        return v;
    }
    std::replace(cleaned.begin(), cleaned.end(), ',', ' ');
    std::istringstream in(cleaned);
    std::vector<double> values;
    std::string token;
    while (in >> token) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(token, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != token.size() || !std::isfinite(v)) {
            fail(SpecErrorCode::invalid_value, "[" + std::to_string(values.size()) + "]",
                 "'" + token + "' is not a finite number");
        }
        values.push_back(v);
    }
    return Eigen::Map<const Vector>(values.data(), static_cast<Index>(values.size()));
}

Vector random_initial_state(std::uint64_t seed, Index len) {
    std::mt19937_64 gen(seed);
    Vector v(len);
    for (Index i = 0; i < len; ++i) {
        const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
        v(i) = -kRandomStateHalfWidth + 2.0 * kRandomStateHalfWidth * u;
    }
    return v;
}

}  // namespace mpx::cli
