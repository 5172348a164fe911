// Batch front end: resolves a JSON config (embedded defaults, optional file,
// --set overrides), runs one experiment subcommand, and writes CSV/JSON
// outputs plus a manifest describing the run.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "uscqec/fluxqubit.hpp"
#include "uscqec/graphstate.hpp"
#include "uscqec/io.hpp"
#include "uscqec/noise.hpp"
#include "uscqec/resonator.hpp"
#include "uscqec/studies.hpp"

namespace {

using nlohmann::json;
namespace fs = std::filesystem;
using namespace uscqec;

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitVerify = 4;
constexpr const char* kArtifactVersion = "0.1.0";

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct VerifyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GlobalOpts {
    std::string config_path;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;
    int jobs = 1;
    bool print_config = false;
    std::vector<std::string> sets;
};

// ---------------------------------------------------------------------------
// config plumbing

json default_config(const std::string& sub) {
    if (sub == "qubit-sweep") {
        return json{{"E_J_GHz", 221.0},
                    {"E_C_ratio", 32.0},
                    {"alpha", 0.8},
                    {"beta", 0.2},
                    {"gamma", 0.7},
                    {"f1", {{"min", 0.49}, {"max", 0.53}, {"count", 41}}},
                    {"f2", 0.0},
                    {"f3", 0.0},
                    {"n_max", 10}};
    }
    if (sub == "modes") {
        return json{{"length_m", 0.072},
                    {"l_per_m", 50.0 / 1.2e8},
                    {"c_per_m", 1.0 / (50.0 * 1.2e8)},
                    {"N", 5},
                    {"C_J_F", 1e-14},
                    {"L_J_H", 1.0132118364233778e-7},
                    {"gamma", 0.6},
                    {"beta", 0.2},
                    {"max_freq_GHz", 12.0}};
    }
    if (sub == "gate-fidelity") {
        return json{{"omega_GHz", 5.0},
                    {"omega_q_GHz", 1.0},
                    {"g_over_omega", nullptr},
                    {"cx", json::array({0.0, 0.05, 0.1, 0.2, 0.3})},
                    {"cutoff", 15},
                    {"periods", 1},
                    {"mode_count", 2},
                    {"tail_tol", 1e-9},
                    {"cavity", nullptr}};
    }
    if (sub == "adiabatic") {
        return json{{"omega_GHz", 5.0},
                    {"omega_q_GHz", 1.0},
                    {"cx", 0.0},
                    {"cutoff", 8},
                    {"mode_count", 2},
                    {"record_every", 25},
                    {"ramp",
                     {{"g0_over_omega", 1.0 / (4.0 * std::sqrt(2.0))},
                      {"T_over_omega", 250.0},
                      {"shape", "linear"},
                      {"steps", 500}}}};
    }
    if (sub == "code") {
        return json{{"distance_max", 3}, {"search_budget", 1000000}};
    }
    if (sub == "montecarlo") {
        return json{{"code", "five-qubit"},
                    {"p1_grid", {{"min", 0.0}, {"max", 0.05}, {"count", 6}}},
                    {"p2_grid", {{"min", 0.0}, {"max", 0.05}, {"count", 6}}},
                    {"p_m", 0.01},
                    {"trials", 200},
                    {"seed", 12345},
                    {"mode", "trajectory"}};
    }
    throw std::logic_error("unknown subcommand: " + sub);
}

void merge_into(json& base, const json& patch, const std::string& prefix) {
    if (!patch.is_object()) throw ConfigError("config: expected an object at '" + prefix + "'");
    for (const auto& [key, value] : patch.items()) {
        if (!base.contains(key)) throw ConfigError("config: unknown key '" + prefix + key + "'");
        if (base[key].is_object() && value.is_object())
            merge_into(base[key], value, prefix + key + ".");
        else
            base[key] = value;
    }
}

void apply_set(json& cfg, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ConfigError("config: --set expects key=value, got '" + assignment + "'");
    const std::string path = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);

    json* node = &cfg;
    std::size_t start = 0;
    std::vector<std::string> parts;
    while (true) {
        const auto dot = path.find('.', start);
        parts.push_back(path.substr(start, dot == std::string::npos ? dot : dot - start));
        if (dot == std::string::npos) break;
        start = dot + 1;
    }
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
        if (!node->contains(parts[i]) || !(*node)[parts[i]].is_object())
            throw ConfigError("config: unknown key '" + path + "'");
        node = &(*node)[parts[i]];
    }
    if (!node->contains(parts.back())) throw ConfigError("config: unknown key '" + path + "'");

    json value;
    try {
        value = json::parse(text);
    } catch (const json::exception&) {
        value = text;
    }
    (*node)[parts.back()] = value;
}

json resolve_config(const std::string& sub, const GlobalOpts& g) {
    json cfg = default_config(sub);
    if (!g.config_path.empty()) {
        std::ifstream in(g.config_path);
        if (!in) throw ConfigError("config: cannot open '" + g.config_path + "'");
        json user;
        try {
            user = json::parse(in);
        } catch (const json::exception& e) {
            throw ConfigError(std::string("config: ") + e.what());
        }
        merge_into(cfg, user, "");
    }
    for (const auto& s : g.sets) apply_set(cfg, s);
    if (g.seed && cfg.contains("seed")) cfg["seed"] = *g.seed;
    return cfg;
}

double require_number(const json& cfg, const std::string& key) {
    if (!cfg.contains(key) || !cfg[key].is_number())
        throw ConfigError("config: '" + key + "' must be a number");
    return cfg[key].get<double>();
}

int require_int(const json& cfg, const std::string& key) {
    if (!cfg.contains(key) || !cfg[key].is_number_integer())
        throw ConfigError("config: '" + key + "' must be an integer");
    return cfg[key].get<int>();
}

std::string require_string(const json& cfg, const std::string& key) {
    if (!cfg.contains(key) || !cfg[key].is_string())
        throw ConfigError("config: '" + key + "' must be a string");
    return cfg[key].get<std::string>();
}

std::uint64_t require_u64(const json& cfg, const std::string& key) {
    if (!cfg.contains(key) || !cfg[key].is_number_integer())
        throw ConfigError("config: '" + key + "' must be a non-negative integer");
    if (cfg[key].is_number_unsigned()) return cfg[key].get<std::uint64_t>();
    const auto v = cfg[key].get<std::int64_t>();
    if (v < 0) throw ConfigError("config: '" + key + "' must be a non-negative integer");
    return std::uint64_t(v);
}

// a sweep axis: a single number, an explicit array, or {min,max,count}
std::vector<double> parse_grid(const json& v, const std::string& name) {
    if (v.is_number()) return {v.get<double>()};
    if (v.is_array()) {
        std::vector<double> out;
        for (const auto& e : v) {
            if (!e.is_number()) throw ConfigError("config: '" + name + "' has a non-numeric entry");
            out.push_back(e.get<double>());
        }
        if (out.empty()) throw ConfigError("config: '" + name + "' grid is empty");
        return out;
    }
    if (v.is_object() && v.contains("min") && v.contains("max") && v.contains("count")) {
        const double lo = v["min"].get<double>(), hi = v["max"].get<double>();
        const int count = v["count"].get<int>();
        if (count < 1) throw ConfigError("config: '" + name + "' needs count >= 1");
        std::vector<double> out;
        for (int i = 0; i < count; ++i)
            out.push_back(count == 1 ? lo : lo + (hi - lo) * double(i) / double(count - 1));
        return out;
    }
    throw ConfigError("config: '" + name + "' must be a number, array, or {min,max,count}");
}

// ---------------------------------------------------------------------------
// output plumbing

struct RunOutput {
    std::vector<std::string> outputs;
    json extra;  // subcommand-specific manifest fields
    bool verify_failed = false;
    std::string verify_message;
};

void write_manifest(const std::string& sub, const json& cfg, const GlobalOpts& g,
                    const RunOutput& run, double duration_s) {
    json manifest{{"subcommand", sub},
                  {"config", cfg},
                  {"seed", cfg.contains("seed") ? cfg["seed"] : json(0)},
                  {"artifact_version", kArtifactVersion},
                  {"outputs", run.outputs},
                  {"duration_seconds", duration_s}};
    if (!run.extra.is_null()) manifest["report"] = run.extra;
    const fs::path path = fs::path(g.out_dir) / (sub + std::string("_manifest.json"));
    io::write_file_atomic(path, manifest.dump(2) + "\n");
}

std::string csv_path(const GlobalOpts& g, const std::string& stem) {
    return (fs::path(g.out_dir) / (stem + std::string(".csv"))).string();
}

// ---------------------------------------------------------------------------
// subcommands

RunOutput run_qubit_sweep(const json& cfg, const GlobalOpts& g) {
    fluxqubit::QubitParams base;
    base.E_J_GHz = require_number(cfg, "E_J_GHz");
    base.E_C_ratio = require_number(cfg, "E_C_ratio");
    base.beta = require_number(cfg, "beta");
    base.gamma = require_number(cfg, "gamma");
    base.f2 = require_number(cfg, "f2");
    base.f3 = require_number(cfg, "f3");
    base.n_max = require_int(cfg, "n_max");

    const auto alphas = parse_grid(cfg.at("alpha"), "alpha");
    const auto f1s = parse_grid(cfg.at("f1"), "f1");

    io::CsvTable table;
    table.header = {"alpha", "f1", "omega_q_GHz", "c0", "cx", "cy", "cz"};
    for (const double a : alphas) {
        for (const double f : f1s) {
            fluxqubit::QubitParams p = base;
            p.alpha = a;
            p.f1 = f;
            const auto model = fluxqubit::solve_qubit(p);
            const auto c = fluxqubit::coupling_coefficients(model);
            table.add_row({io::format_g(a), io::format_g(f), io::format_g(model.transition_GHz()),
                           io::format_g(c.c0), io::format_g(c.cx), io::format_g(c.cy),
                           io::format_g(c.cz)});
        }
    }
    const std::string path = csv_path(g, "qubit_sweep");
    io::write_file_atomic(path, table.render());
    return {{path}, json()};
}

RunOutput run_modes(const json& cfg, const GlobalOpts& g) {
    const double l_per_m = require_number(cfg, "l_per_m");
    const double c_per_m = require_number(cfg, "c_per_m");
    if (l_per_m <= 0 || c_per_m <= 0)
        throw ConfigError("config: line parameters must be positive");

    resonator::ResonatorParams p;
    p.length_m = require_number(cfg, "length_m");
    p.velocity_mps = 1.0 / std::sqrt(l_per_m * c_per_m);
    p.impedance_ohm = std::sqrt(l_per_m / c_per_m);
    p.junction_C_F = require_number(cfg, "C_J_F");
    p.junction_L_H = require_number(cfg, "L_J_H");
    p.gamma = require_number(cfg, "gamma");
    p.beta = require_number(cfg, "beta");
    p.junction_count = require_int(cfg, "N");
    const double max_freq_GHz = require_number(cfg, "max_freq_GHz");
    if (max_freq_GHz <= 0) throw ConfigError("config: 'max_freq_GHz' must be positive");

    const double fsr_GHz = p.velocity_mps / (2.0 * p.length_m * 1e9);
    const int count = int(max_freq_GHz / fsr_GHz) + p.junction_count + 3;
    std::vector<resonator::Mode> modes;
    for (const double w : resonator::mode_frequencies(p, count)) {
        if (w / (2e9 * constants::pi) > max_freq_GHz) break;
        // the degenerate manifold is spliced in separately below
        if (std::abs(p.chi(w)) * p.junction_L_H < 1e-11) continue;
        modes.push_back(resonator::solve_mode(p, w));
    }
    // a matched junction array hides an (N+1)-fold degenerate block at the
    // segment half-wave frequency; the bracketing scan cannot see the
    // even-multiplicity root, so place the manifold basis explicitly
    if (p.junction_count >= 1 && std::abs(p.degeneracy_mismatch()) <= 1e-9 &&
        p.commensurate_omega() / (2e9 * constants::pi) <= max_freq_GHz) {
        const auto manifold = resonator::degenerate_manifold(p);
        const auto at = std::find_if(modes.begin(), modes.end(), [&](const resonator::Mode& m) {
            return m.omega > manifold.omega;
        });
        modes.insert(at, manifold.basis.begin(), manifold.basis.end());
    }

    io::CsvTable table;
    table.header = {"index", "freq_GHz", "mass"};
    for (int j = 1; j <= p.junction_count; ++j)
        table.header.push_back("flux_drop_j" + std::to_string(j));
    int index = 1;
    for (const auto& m : modes) {
        std::vector<std::string> row = {std::to_string(index++),
                                        io::format_g(m.omega / (2e9 * constants::pi)),
                                        io::format_g(m.mass_F)};
        for (const double d : m.drops) row.push_back(io::format_g(d));
        table.add_row(std::move(row));
    }
    const std::string path = csv_path(g, "modes");
    io::write_file_atomic(path, table.render());
    return {{path}, json()};
}

std::vector<studies::CavitySpec> cavity_list(const json& cfg) {
    if (cfg.at("cavity").is_null()) {
        return {{studies::CavityKind::vacuum, 0.0, 0.0},
                {studies::CavityKind::coherent, 0.25, 0.0},
                {studies::CavityKind::coherent, 0.5, 0.0},
                {studies::CavityKind::coherent, 1.0, 0.0},
                {studies::CavityKind::thermal, 0.0, 0.015}};
    }
    const json& c = cfg.at("cavity");
    if (!c.is_object() || !c.contains("kind") || !c["kind"].is_string())
        throw ConfigError("config: 'cavity' must be an object with a 'kind' string");
    const std::string kind = c["kind"].get<std::string>();
    studies::CavitySpec spec;
    if (kind == "vacuum") {
        spec.kind = studies::CavityKind::vacuum;
    } else if (kind == "coherent") {
        spec.kind = studies::CavityKind::coherent;
        if (!c.contains("gamma") || !c["gamma"].is_number())
            throw ConfigError("config: coherent cavity needs a numeric 'gamma'");
        spec.amplitude = c["gamma"].get<double>();
    } else if (kind == "thermal") {
        spec.kind = studies::CavityKind::thermal;
        if (!c.contains("temp_mK") || !c["temp_mK"].is_number())
            throw ConfigError("config: thermal cavity needs a numeric 'temp_mK'");
        spec.temperature_K = c["temp_mK"].get<double>() * 1e-3;
    } else {
        throw ConfigError("config: cavity kind must be vacuum, coherent, or thermal");
    }
    return {spec};
}

std::string cavity_label(const studies::CavitySpec& spec) {
    switch (spec.kind) {
        case studies::CavityKind::vacuum: return "vacuum";
        case studies::CavityKind::coherent: return "coherent-" + io::format_g(spec.amplitude);
        case studies::CavityKind::thermal:
            return "thermal-" + io::format_g(spec.temperature_K * 1e3) + "mK";
    }
    return "unknown";
}

RunOutput run_gate_fidelity(const json& cfg, const GlobalOpts& g) {
    studies::GateFidelityParams base;
    base.omega = constants::two_pi * require_number(cfg, "omega_GHz");
    base.omega_q = constants::two_pi * require_number(cfg, "omega_q_GHz");
    base.cutoff = require_int(cfg, "cutoff");
    base.schedule.periods = require_int(cfg, "periods");
    base.schedule.mode_count = require_int(cfg, "mode_count");
    base.tail_tol = require_number(cfg, "tail_tol");
    if (!cfg.at("g_over_omega").is_null()) {
        const double want = require_number(cfg, "g_over_omega");
        if (std::abs(want - base.schedule.kappa()) > 1e-12)
            throw ConfigError("config: 'g_over_omega' contradicts the phase-matched value "
                              "1/(4 sqrt(periods*mode_count))");
    }
    const auto cxs = parse_grid(cfg.at("cx"), "cx");
    const auto cavities = cavity_list(cfg);

    io::CsvTable table;
    table.header = {"cx", "cavity_kind", "fidelity"};
    for (const double cx : cxs) {
        studies::GateFidelityParams p = base;
        p.cx = cx;
        const auto fids = studies::gate_fidelity_sweep(p, cavities);
        for (std::size_t i = 0; i < cavities.size(); ++i)
            table.add_row({io::format_g(cx), cavity_label(cavities[i]),
                           io::format_g(fids[i])});
    }
    const std::string path = csv_path(g, "gate_fidelity");
    io::write_file_atomic(path, table.render());
    return {{path}, json()};
}

RunOutput run_adiabatic(const json& cfg, const GlobalOpts& g) {
    const json& ramp = cfg.at("ramp");
    if (require_string(ramp, "shape") != "linear")
        throw ConfigError("config: only the linear ramp shape is implemented");

    studies::AdiabaticParams p;
    p.omega = constants::two_pi * require_number(cfg, "omega_GHz");
    p.omega_q = constants::two_pi * require_number(cfg, "omega_q_GHz");
    p.cx = require_number(cfg, "cx");
    p.cutoff = require_int(cfg, "cutoff");
    p.mode_count = require_int(cfg, "mode_count");
    p.record_every = require_int(cfg, "record_every");
    p.g0_frac = require_number(ramp, "g0_over_omega");
    p.ramp_omega_T = require_number(ramp, "T_over_omega");
    p.steps = require_int(ramp, "steps");
    try {
        p.validate();
    } catch (const studies::StepCountTooLow& e) {
        throw ConfigError(e.what());
    }

    const auto result = studies::adiabatic_initialize(p);
    io::CsvTable table;
    table.header = {"t_over_T", "fidelity"};
    for (const auto& [t, f] : result.curve)
        table.add_row({io::format_g(t), io::format_g(f)});
    const std::string path = csv_path(g, "adiabatic");
    io::write_file_atomic(path, table.render());
    return {{path}, json{{"final_fidelity", result.fidelity}}};
}

struct CodeOpts {
    std::string target;
    bool verify = false;
    std::string expect;
};

json eigenvalue_entry(const std::string& op, int expected, int value) {
    return json{{"operator", op}, {"expected", expected}, {"value", value}};
}

RunOutput run_code(const json& cfg, const GlobalOpts& g, const CodeOpts& opts) {
    const int distance_max = require_int(cfg, "distance_max");
    const auto budget = std::uint64_t(require_int(cfg, "search_budget"));

    graphstate::GraphSpec graph;
    bool named = true;
    if (opts.target == "five-qubit") {
        graph = graphstate::five_qubit_graph();
    } else if (opts.target == "steane") {
        graph = graphstate::steane_graph();
    } else if (fs::exists(opts.target)) {
        std::ifstream in(opts.target);
        std::stringstream buffer;
        buffer << in.rdbuf();
        try {
            graph = graphstate::parse_graph_text(buffer.str());
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("config: ") + e.what());
        }
        named = false;
    } else {
        throw ConfigError("config: code target must be 'five-qubit', 'steane', or a graph file");
    }

    json report;
    report["target"] = opts.target;
    json measured = json::array();
    for (const int a : graph.measure_set) measured.push_back(a + 1);
    report["graph"] = {{"vertices", graph.vertices}, {"measured", measured}};
    json edges = json::array();
    for (const auto& [u, v] : graph.edges) edges.push_back({u + 1, v + 1});
    report["graph"]["edges"] = edges;

    // construct through the gate sequence, then take out the measured qubits
    auto built = tableau::StabilizerTableau::plus_state(graph.vertices);
    for (const auto& [u, v] : graph.edges) built.apply_cz(u, v);

    bool ok = true;
    json checks = json::array();
    for (const auto& k : graphstate::cluster_generators(graph)) {
        const int value = built.contains(k);
        checks.push_back(eigenvalue_entry(k.to_string(), 1, value));
        ok = ok && value == 1;
    }
    report["cluster_generator_checks"] = checks;

    std::optional<tableau::StabilizerTableau> reduced;
    if (graph.measure_set.empty()) {
        reduced = built;
    } else {
        reduced = graphstate::postselect_plus_tableau(graph, built).tab;
    }

    json rows = json::array();
    for (const auto& row : reduced->canonical_rows()) rows.push_back(row.to_string());
    report["reduced_generators"] = rows;

    if (named) {
        const bool five = opts.target == "five-qubit";
        const auto code_gens = five ? graphstate::five_qubit_code() : graphstate::steane_code();
        const auto state_group =
            five ? graphstate::five_qubit_state_group() : graphstate::steane_state_group();
        const auto mapped = five ? graphstate::lu_map(*reduced) : *reduced;

        json code_checks = json::array();
        for (const auto& gen : code_gens) {
            const int value = mapped.contains(gen);
            code_checks.push_back(eigenvalue_entry(gen.to_string(), 1, value));
            ok = ok && value == 1;
        }
        report["code_generator_checks"] = code_checks;
        const bool group_match = mapped.group_equal(state_group);
        report["group_match"] = group_match;
        ok = ok && group_match;

        if (opts.verify) {
            const auto distance = graphstate::code_distance(code_gens, distance_max);
            report["distance"] = distance ? json(*distance) : json();
            ok = ok && distance.has_value();
        }
    }

    if (!opts.expect.empty()) {
        if (opts.expect != "five-qubit" && opts.expect != "steane")
            throw ConfigError("config: --expect must be 'five-qubit' or 'steane'");
        const auto target_group = opts.expect == "five-qubit"
                                      ? graphstate::five_qubit_state_group()
                                      : graphstate::steane_state_group();
        const auto lc = graphstate::lc_orbit_check(graph, target_group, budget);
        json eq{{"target", opts.expect},
                {"equivalent", lc.equivalent},
                {"assignments_checked", lc.assignments_checked}};
        if (lc.equivalent) {
            eq["clifford_words"] = lc.witness.words;
            eq["pauli_layer"] = lc.witness.pauli_layer.to_string();
        }
        report["local_equivalence"] = eq;
        ok = ok && lc.equivalent;
    }

    report["verified"] = ok;
    const std::string path = (fs::path(g.out_dir) / "code.json").string();
    io::write_file_atomic(path, report.dump(2) + "\n");
    RunOutput run{{path}, json(), !ok, "code: verification failed, see " + path};
    return run;
}

struct MonteCarloOpts {
    std::optional<std::string> code;
    std::optional<std::uint64_t> trials;
    std::optional<double> pm;
};

RunOutput run_montecarlo(json& cfg, const GlobalOpts& g, const MonteCarloOpts& opts) {
    if (opts.code) cfg["code"] = *opts.code;
    if (opts.trials) cfg["trials"] = *opts.trials;
    if (opts.pm) cfg["p_m"] = *opts.pm;

    const std::string code_name = require_string(cfg, "code");
    const std::string mode = require_string(cfg, "mode");
    const double p_m = require_number(cfg, "p_m");
    const std::uint64_t trials = require_u64(cfg, "trials");
    const std::uint64_t seed = require_u64(cfg, "seed");
    const auto p1s = parse_grid(cfg.at("p1_grid"), "p1_grid");
    const auto p2s = parse_grid(cfg.at("p2_grid"), "p2_grid");

    noise::CodeKind kind;
    if (code_name == "five-qubit") kind = noise::CodeKind::five_qubit;
    else if (code_name == "steane") kind = noise::CodeKind::steane;
    else throw ConfigError("config: 'code' must be 'five-qubit' or 'steane'");

    if (mode != "trajectory" && mode != "channel")
        throw ConfigError("config: 'mode' must be 'trajectory' or 'channel'");
    if (mode == "channel" && kind != noise::CodeKind::five_qubit)
        throw ConfigError("config: channel mode needs a measurement-free code (five-qubit)");

    io::CsvTable table;
    table.header = {"p1", "p2", "mean", "std_error", "trials"};
    const auto protocol = noise::protocol_for(kind);
    for (const double p1 : p1s) {
        for (const double p2 : p2s) {
            noise::NoiseModel nm{p1, p2, p_m};
            nm.validate();
            if (mode == "channel") {
                const double f = noise::exact_channel_fidelity(protocol.graph, nm);
                table.add_row({io::format_g(p1), io::format_g(p2), io::format_g(f),
                               io::format_g(0.0), "0"});
            } else {
                const auto est = noise::montecarlo_fidelity(protocol, nm, trials, seed, g.jobs);
                table.add_row({io::format_g(p1), io::format_g(p2), io::format_g(est.mean),
                               io::format_g(est.std_error), std::to_string(est.trials)});
            }
        }
    }
    const std::string path = csv_path(g, "montecarlo");
    io::write_file_atomic(path, table.render());
    return {{path}, json()};
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Ultrastrong-coupling code construction toolkit"};
    app.require_subcommand(1);

    GlobalOpts g;
    app.add_option("--config", g.config_path, "JSON config file merged over the defaults");
    app.add_option("--out", g.out_dir, "output directory")->capture_default_str();
    std::uint64_t seed_value = 0;
    auto* seed_opt = app.add_option("--seed", seed_value, "override the config seed");
    app.add_option("--jobs", g.jobs, "worker thread cap")->capture_default_str();
    app.add_flag("--print-config", g.print_config, "print the resolved config and exit");
    app.add_option("--set", g.sets, "override a config key, e.g. --set ramp.steps=600");

    CodeOpts code_opts;
    MonteCarloOpts mc_opts;

    auto* sweep = app.add_subcommand("qubit-sweep", "qubit spectrum and coupling coefficients");
    auto* modes = app.add_subcommand("modes", "resonator eigenmode table");
    auto* gate = app.add_subcommand("gate-fidelity", "controlled-phase fidelity by cavity state");
    auto* adiabatic = app.add_subcommand("adiabatic", "dressed-to-bare initialization ramp");
    double adia_T = 0;
    auto* adia_T_opt = adiabatic->add_option("--T", adia_T, "ramp duration omega*T");
    auto* code = app.add_subcommand("code", "build a code and report its stabilizer checks");
    code->add_option("target", code_opts.target, "five-qubit, steane, or a graph file")
        ->required();
    code->add_flag("--verify", code_opts.verify, "also check the code distance");
    code->add_option("--expect", code_opts.expect,
                     "check local-Clifford equivalence against a named code");
    auto* mc = app.add_subcommand("montecarlo", "noisy-construction fidelity surface");
    std::string mc_code;
    std::uint64_t mc_trials = 0;
    double mc_pm = 0;
    auto* mc_code_opt = mc->add_option("--code", mc_code, "five-qubit or steane");
    auto* mc_trials_opt = mc->add_option("--trials", mc_trials, "trials per grid point");
    auto* mc_pm_opt = mc->add_option("--pm", mc_pm, "measurement flip probability");

    for (auto* s : {sweep, modes, gate, adiabatic, code, mc}) s->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code_ = app.exit(e);
        return code_ == 0 ? 0 : kExitConfig;
    }

    if (seed_opt->count()) g.seed = seed_value;
    if (mc_code_opt->count()) mc_opts.code = mc_code;
    if (mc_trials_opt->count()) mc_opts.trials = mc_trials;
    if (mc_pm_opt->count()) mc_opts.pm = mc_pm;

    const CLI::App* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();

    try {
        json cfg = resolve_config(name, g);
        if (sub == adiabatic && adia_T_opt->count()) cfg["ramp"]["T_over_omega"] = adia_T;
        if (g.print_config) {
            std::cout << cfg.dump(2) << '\n';
            return 0;
        }
        if (g.jobs < 1) throw ConfigError("config: --jobs must be at least 1");
        fs::create_directories(g.out_dir);

        const auto start = std::chrono::steady_clock::now();
        RunOutput run;
        if (sub == sweep) run = run_qubit_sweep(cfg, g);
        else if (sub == modes) run = run_modes(cfg, g);
        else if (sub == gate) run = run_gate_fidelity(cfg, g);
        else if (sub == adiabatic) run = run_adiabatic(cfg, g);
        else if (sub == code) run = run_code(cfg, g, code_opts);
        else run = run_montecarlo(cfg, g, mc_opts);
        const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;

        write_manifest(name, cfg, g, run, elapsed.count());
        if (run.verify_failed) {
            std::cerr << "error: " << run.verify_message << '\n';
            return kExitVerify;
        }
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const VerifyError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitVerify;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumeric;
    }
}
