#include "qsmb/formats.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace qsmb {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

[[noreturn]] void fail_at(const std::string& source, int line, const std::string& message) {
    throw std::runtime_error(source + ":" + std::to_string(line) + ": " + message);
}

double parse_double(const std::string& value, const std::string& context) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error(context + ": expected a number, got '" + value + "'");
    }
}

long parse_long(const std::string& value, const std::string& context) {
    try {
        std::size_t used = 0;
        const long v = std::stol(value, &used);
        if (used != value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error(context + ": expected an integer, got '" + value + "'");
    }
}

bool parse_bool(const std::string& value, const std::string& context) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw std::runtime_error(context + ": expected a boolean, got '" + value + "'");
}

std::vector<int> parse_dash_list(const std::string& value, const std::string& context) {
    std::vector<int> out;
    std::stringstream ss(value);
    std::string part;
    while (std::getline(ss, part, '-')) {
        out.push_back(static_cast<int>(parse_long(trim(part), context)));
    }
    if (out.empty()) throw std::runtime_error(context + ": empty qubit list");
    return out;
}

std::vector<double> parse_comma_doubles(const std::string& value, const std::string& context) {
    std::vector<double> out;
    std::stringstream ss(value);
    std::string part;
    while (std::getline(ss, part, ',')) {
        out.push_back(parse_double(trim(part), context));
    }
    return out;
}

std::string join_dash(std::span<const int> values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += '-';
        out += std::to_string(values[i]);
    }
    return out;
}

}  // namespace

std::string format_angle(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", value);
    return buf;
}

namespace {
std::string format_exact(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}
}  // namespace

// ---------------------------------------------------------------------------
// KvConfig
// ---------------------------------------------------------------------------

KvConfig KvConfig::parse(std::istream& in, const std::string& source_name) {
    KvConfig kv;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string text = trim(line);
        if (text.empty()) continue;
        const std::size_t eq = text.find('=');
        if (eq == std::string::npos) fail_at(source_name, line_no, "expected 'key = value'");
        const std::string key = trim(text.substr(0, eq));
        const std::string value = trim(text.substr(eq + 1));
        if (key.empty()) fail_at(source_name, line_no, "empty key");
        if (kv.entries.count(key)) fail_at(source_name, line_no, "duplicate key '" + key + "'");
        kv.entries[key] = value;
    }
    return kv;
}

KvConfig KvConfig::parse_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path.string());
    return parse(in, path.string());
}

// ---------------------------------------------------------------------------
// Presets (fitted parameters of the tested devices, units of 1e-2 rad)
// ---------------------------------------------------------------------------

namespace {

struct Preset {
    const char* name;
    int n;
    std::vector<double> alphas, alpha_bounds;
    std::vector<double> lambdas, lambda_bounds;
    double p_dep;   // per-protocol effective depolarizing; <0 when unused
    double gamma;   // <0 when unused
    std::vector<int> qubits;
};

// n = 2 lambdas follow the first-use order of CR pairs in the linear-chain
// transpilation: (0,1), (2,3), (1,0), (1,2).
const std::vector<Preset>& presets() {
    static const std::vector<Preset> table = {
        {"nairobi-n1", 1, {2.83, 4.45}, {5.26, 4.45}, {-1.78}, {7.25}, -1.0, 1.21, {0, 1}},
        {"lima-n1", 1, {3.63, 4.83}, {7.55, 5.73}, {-2.63}, {6.68}, 1.99, -1.0, {0, 1}},
        {"manila-n1", 1, {-0.55, 0.29}, {4.38, 3.88}, {0.06}, {6.43}, 2.30, -1.0, {0, 1}},
        {"quito-n1", 1, {-4.30, 1.22}, {4.30, 5.48}, {1.26}, {8.13}, 2.64, -1.0, {0, 1}},
        {"oslo-n1", 1, {3.44, 0.61}, {3.44, 7.85}, {-2.31}, {7.63}, 6.46, -1.0, {0, 1}},
        {"nairobi-n2", 2, {2.74, -2.98, 5.04, 4.05}, {4.04, 4.33, 5.04, 4.05},
         {0.73, 3.78, -0.85, 7.28}, {7.22, 9.62, 7.28, 7.28}, 6.42, -1.0, {0, 1, 3, 5}},
        {"lima-n2", 2, {3.58, 2.11, 3.99, -1.86}, {3.58, 3.25, 3.99, 6.29},
         {-4.42, 3.13, 8.44, 3.33}, {5.05, 9.53, 8.44, 8.44}, 10.48, -1.0, {0, 1, 3, 4}},
        {"bogota-n2", 2, {4.47, 0.83, 3.24, 5.27}, {4.47, 4.05, 3.24, 6.56},
         {-7.71, 2.00, 1.27, 1.15}, {7.71, 6.84, 6.29, 6.29}, 12.77, -1.0, {0, 1, 2, 3}},
        {"manila-n2", 2, {4.38, 2.34, -5.05, 3.56}, {4.38, 3.88, 5.05, 3.56},
         {-4.50, 8.32, -0.97, 4.89}, {6.43, 30.18, 30.18, 8.00}, 14.60, -1.0, {0, 1, 2, 3}},
        {"quito-n2", 2, {-4.47, 2.75, 5.00, 5.23}, {4.47, 4.68, 5.00, 5.23},
         {6.29, -2.08, -0.17, -7.54}, {6.40, 9.87, 9.87, 7.71}, 15.10, -1.0, {0, 1, 3, 4}},
        {"santiago-n2", 2, {7.71, -3.18, -3.52, 4.58}, {7.71, 3.18, 3.52, 4.58},
         {-1.50, 9.27, 6.14, 4.79}, {10.71, 13.47, 13.47, 11.04}, 16.90, -1.0, {0, 1, 2, 3}},
        {"oslo-n2", 2, {0.89, 4.59, 3.38, 4.92}, {4.34, 4.59, 5.93, 4.92},
         {-5.90, -1.47, 6.17, 4.79}, {7.47, 6.17, 6.17, 7.44}, 23.21, -1.0, {0, 1, 3, 5}},
    };
    return table;
}

const std::vector<std::pair<int, int>>& lambda_pair_order(int n) {
    static const std::vector<std::pair<int, int>> n1 = {{0, 1}};
    static const std::vector<std::pair<int, int>> n2 = {{0, 1}, {2, 3}, {1, 0}, {1, 2}};
    return n == 1 ? n1 : n2;
}

}  // namespace

std::vector<std::string> preset_names() {
    std::vector<std::string> names;
    for (const Preset& p : presets()) names.emplace_back(p.name);
    return names;
}

void apply_preset(RunConfig& config, const std::string& name) {
    const auto it = std::find_if(presets().begin(), presets().end(),
                                 [&](const Preset& p) { return name == p.name; });
    if (it == presets().end()) {
        std::string known;
        for (const std::string& n : preset_names()) known += " " + n;
        throw std::runtime_error("unknown noise preset '" + name + "'; known presets:" + known);
    }
    const Preset& p = *it;
    constexpr double scale = 1e-2;

    config.protocol.n_iterations = p.n;
    config.device_label = p.name;
    config.device_qubits = p.qubits;
    config.noise = NoiseSpec{};
    for (std::size_t q = 0; q < p.alphas.size(); ++q) {
        config.noise.alphas[static_cast<int>(q)] = p.alphas[q] * scale;
        config.fit.alpha_bounds[static_cast<int>(q)] = p.alpha_bounds[q] * scale;
    }
    const auto& pairs = lambda_pair_order(p.n);
    for (std::size_t i = 0; i < p.lambdas.size(); ++i) {
        config.noise.lambdas[pairs[i]] = p.lambdas[i] * scale;
        config.fit.lambda_bounds[pairs[i]] = p.lambda_bounds[i] * scale;
    }
    if (p.p_dep >= 0.0) config.noise.per_step_dep = {p.p_dep * scale};
    if (p.gamma >= 0.0) config.noise.gamma = p.gamma * scale;
    config.fit.model = p.gamma >= 0.0 ? ShiftModel::AmplitudeDamping : ShiftModel::Depolarizing;
}

// ---------------------------------------------------------------------------
// RunConfig
// ---------------------------------------------------------------------------

RunConfig RunConfig::from_kv(const KvConfig& kv) {
    RunConfig config;

    // The preset seeds the configuration; explicit keys override it.
    if (const auto it = kv.entries.find("noise.preset"); it != kv.entries.end()) {
        apply_preset(config, it->second);
    }

    for (const auto& [key, value] : kv.entries) {
        const std::string ctx = "config key " + key;
        if (key == "noise.preset") {
            continue;
        } else if (key == "protocol.epsilon") {
            config.protocol.epsilon = parse_double(value, ctx);
        } else if (key == "protocol.theta0") {
            config.protocol.theta0 = parse_double(value, ctx);
        } else if (key == "protocol.n") {
            config.protocol.n_iterations = static_cast<int>(parse_long(value, ctx));
        } else if (key == "sweep.phi0_points") {
            config.phi0_points = static_cast<int>(parse_long(value, ctx));
        } else if (key == "run.shots") {
            config.shots = static_cast<int>(parse_long(value, ctx));
        } else if (key == "run.runs") {
            config.runs = static_cast<int>(parse_long(value, ctx));
        } else if (key == "device.label") {
            config.device_label = value;
        } else if (key == "device.qubits") {
            config.device_qubits = parse_dash_list(value, ctx);
        } else if (key == "device.coupling") {
            config.coupling_spec = value;
        } else if (key == "noise.dep") {
            config.noise.per_step_dep = parse_comma_doubles(value, ctx);
        } else if (key == "noise.gamma") {
            config.noise.gamma = parse_double(value, ctx);
        } else if (key == "noise.damp_all") {
            config.noise.damp_all_qubits = parse_bool(value, ctx);
        } else if (key == "noise.readout.p01") {
            if (!config.noise.readout) config.noise.readout = ReadoutError{};
            config.noise.readout->p01 = parse_double(value, ctx);
        } else if (key == "noise.readout.p10") {
            if (!config.noise.readout) config.noise.readout = ReadoutError{};
            config.noise.readout->p10 = parse_double(value, ctx);
        } else if (key.starts_with("noise.alpha.")) {
            const int q = static_cast<int>(parse_long(key.substr(12), ctx));
            config.noise.alphas[q] = parse_double(value, ctx);
        } else if (key.starts_with("noise.lambda.")) {
            const std::vector<int> pair = parse_dash_list(key.substr(13), ctx);
            if (pair.size() != 2) throw std::runtime_error(ctx + ": expected control-target");
            config.noise.lambdas[{pair[0], pair[1]}] = parse_double(value, ctx);
        } else if (key == "fit.model") {
            if (value == "auto") {
                config.fit.model.reset();
            } else if (value == "dep") {
                config.fit.model = ShiftModel::Depolarizing;
            } else if (value == "ad") {
                config.fit.model = ShiftModel::AmplitudeDamping;
            } else {
                throw std::runtime_error(ctx + ": expected auto|dep|ad");
            }
        } else if (key == "fit.bound.default") {
            config.fit.default_bound = parse_double(value, ctx);
        } else if (key.starts_with("fit.bound.alpha.")) {
            const int q = static_cast<int>(parse_long(key.substr(16), ctx));
            config.fit.alpha_bounds[q] = parse_double(value, ctx);
        } else if (key.starts_with("fit.bound.lambda.")) {
            const std::vector<int> pair = parse_dash_list(key.substr(17), ctx);
            if (pair.size() != 2) throw std::runtime_error(ctx + ": expected control-target");
            config.fit.lambda_bounds[{pair[0], pair[1]}] = parse_double(value, ctx);
        } else if (key == "fit.refine_iterations") {
            config.fit.refine_iterations = static_cast<int>(parse_long(value, ctx));
        } else if (key == "fit.multistart_cap") {
            config.fit.coherent.multistart_cap = static_cast<int>(parse_long(value, ctx));
        } else {
            throw std::runtime_error("unknown config key '" + key + "'");
        }
    }

    config.protocol.validate();
    config.noise.validate();
    if (config.phi0_points < 1) throw std::runtime_error("sweep.phi0_points must be positive");
    if (config.shots < 1 || config.runs < 1) {
        throw std::runtime_error("run.shots and run.runs must be positive");
    }
    return config;
}

std::vector<double> RunConfig::phi0_grid() const {
    std::vector<double> grid(phi0_points);
    for (int k = 0; k < phi0_points; ++k) {
        grid[k] = 2.0 * std::numbers::pi * k / phi0_points;
    }
    return grid;
}

CouplingMap RunConfig::coupling() const {
    const int n_qubits = protocol.qubit_count();
    if (coupling_spec == "linear") return CouplingMap::linear(n_qubits);
    if (coupling_spec == "full") return CouplingMap::full(n_qubits);
    std::vector<std::pair<int, int>> edges;
    std::stringstream ss(coupling_spec);
    std::string part;
    while (std::getline(ss, part, ',')) {
        const std::vector<int> pair = parse_dash_list(trim(part), "device.coupling");
        if (pair.size() != 2) throw std::runtime_error("device.coupling: expected edges like 0-1");
        edges.emplace_back(pair[0], pair[1]);
    }
    return CouplingMap::from_edges(n_qubits, edges);
}

ExperimentPlan RunConfig::plan(std::uint64_t seed) const {
    ExperimentPlan plan;
    plan.base = protocol;
    plan.phi0_grid = phi0_grid();
    plan.noise = noise;
    plan.coupling = coupling();
    plan.shots = shots;
    plan.runs = runs;
    plan.seed = seed;
    plan.device_label = device_label;
    plan.qubit_set = device_qubits;
    return plan;
}

// ---------------------------------------------------------------------------
// Records CSV
// ---------------------------------------------------------------------------

void write_records_csv(std::ostream& out, std::span<const ExperimentRecord> records) {
    out << "device,qubits,n,epsilon,theta0,phi0,run,shots,success_count\n";
    for (const ExperimentRecord& r : records) {
        if (r.device_label.find_first_of(",\n") != std::string::npos) {
            throw std::invalid_argument("device label must not contain commas or newlines");
        }
        out << r.device_label << ',' << join_dash(r.qubit_set) << ',' << r.n_iterations << ','
            << format_angle(r.epsilon) << ',' << format_angle(r.theta0) << ','
            << format_angle(r.phi0) << ',' << r.run_index << ',' << r.shots << ','
            << r.success_count << '\n';
    }
}

std::vector<ExperimentRecord> read_records_csv(std::istream& in, const std::string& source_name) {
    std::string line;
    int line_no = 0;
    if (!std::getline(in, line)) throw std::runtime_error(source_name + ": empty file");
    ++line_no;
    if (trim(line) != "device,qubits,n,epsilon,theta0,phi0,run,shots,success_count") {
        fail_at(source_name, line_no, "unexpected header '" + trim(line) + "'");
    }
    std::vector<ExperimentRecord> records;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string part;
        while (std::getline(ss, part, ',')) fields.push_back(trim(part));
        if (fields.size() != 9) {
            fail_at(source_name, line_no,
                    "expected 9 fields, got " + std::to_string(fields.size()));
        }
        try {
            ExperimentRecord r;
            r.device_label = fields[0];
            r.qubit_set = parse_dash_list(fields[1], "qubits");
            r.n_iterations = static_cast<int>(parse_long(fields[2], "n"));
            r.epsilon = parse_double(fields[3], "epsilon");
            r.theta0 = parse_double(fields[4], "theta0");
            r.phi0 = parse_double(fields[5], "phi0");
            r.run_index = static_cast<int>(parse_long(fields[6], "run"));
            r.shots = static_cast<int>(parse_long(fields[7], "shots"));
            r.success_count = static_cast<int>(parse_long(fields[8], "success_count"));
            if (r.success_count < 0 || r.success_count > r.shots) {
                throw std::runtime_error("success_count outside [0, shots]");
            }
            records.push_back(std::move(r));
        } catch (const std::exception& e) {
            fail_at(source_name, line_no, e.what());
        }
    }
    return records;
}

// ---------------------------------------------------------------------------
// Circuit text
// ---------------------------------------------------------------------------

void write_circuit_text(std::ostream& out, const NativeCircuit& circuit) {
    out << "# nqubits " << circuit.n_qubits << '\n';
    out << "# kept " << circuit.kept_qubit << '\n';
    out << "# postselect " << join_dash(circuit.postselect_qubits) << '\n';
    out << "# swaps " << circuit.swap_count << '\n';
    for (const NativeGate& g : circuit.gates) {
        switch (g.kind) {
            case NativeKind::SqrtX:
                out << "SX " << g.q0 << '\n';
                break;
            case NativeKind::Rz:
                out << "RZ " << format_exact(g.angle) << ' ' << g.q0 << '\n';
                break;
            case NativeKind::Cr:
                out << "CR " << format_exact(g.angle) << ' ' << g.q0 << ',' << g.q1 << '\n';
                break;
            case NativeKind::SwapMarker:
                out << "SWAP " << g.q0 << ',' << g.q1 << '\n';
                break;
        }
    }
}

NativeCircuit read_circuit_text(std::istream& in, const std::string& source_name) {
    NativeCircuit circuit;
    std::string line;
    int line_no = 0;
    bool have_qubits = false;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string text = trim(line);
        if (text.empty()) continue;
        std::stringstream ss(text);
        std::string tok;
        ss >> tok;
        try {
            if (tok == "#") {
                std::string field;
                ss >> field;
                std::string rest;
                std::getline(ss, rest);
                rest = trim(rest);
                if (field == "nqubits") {
                    circuit.n_qubits = static_cast<int>(parse_long(rest, field));
                    circuit.coupling = CouplingMap::full(circuit.n_qubits);
                    have_qubits = true;
                } else if (field == "kept") {
                    circuit.kept_qubit = static_cast<int>(parse_long(rest, field));
                } else if (field == "postselect") {
                    circuit.postselect_qubits = parse_dash_list(rest, field);
                } else if (field == "swaps") {
                    circuit.swap_count = static_cast<int>(parse_long(rest, field));
                } else {
                    throw std::runtime_error("unknown header field '" + field + "'");
                }
                continue;
            }
            if (!have_qubits) throw std::runtime_error("gate line before '# nqubits' header");
            if (tok == "SX") {
                std::string q;
                ss >> q;
                circuit.gates.push_back(NativeGate::sqrt_x(static_cast<int>(parse_long(q, "SX"))));
            } else if (tok == "RZ") {
                std::string angle, q;
                ss >> angle >> q;
                circuit.gates.push_back(NativeGate::rz(parse_double(angle, "RZ"),
                                                       static_cast<int>(parse_long(q, "RZ"))));
            } else if (tok == "CR") {
                std::string angle, pair;
                ss >> angle >> pair;
                const std::vector<double> beta = {parse_double(angle, "CR")};
                std::stringstream ps(pair);
                std::string a, b;
                std::getline(ps, a, ',');
                std::getline(ps, b, ',');
                circuit.gates.push_back(NativeGate::cr(beta[0],
                                                       static_cast<int>(parse_long(a, "CR")),
                                                       static_cast<int>(parse_long(b, "CR"))));
            } else if (tok == "SWAP") {
                std::string pair;
                ss >> pair;
                std::stringstream ps(pair);
                std::string a, b;
                std::getline(ps, a, ',');
                std::getline(ps, b, ',');
                circuit.gates.push_back(
                    NativeGate::swap_marker(static_cast<int>(parse_long(a, "SWAP")),
                                            static_cast<int>(parse_long(b, "SWAP"))));
            } else {
                throw std::runtime_error("unknown gate kind '" + tok + "'");
            }
        } catch (const std::exception& e) {
            fail_at(source_name, line_no, e.what());
        }
    }
    if (!have_qubits) throw std::runtime_error(source_name + ": missing '# nqubits' header");
    return circuit;
}

// ---------------------------------------------------------------------------
// Report JSON
// ---------------------------------------------------------------------------

namespace {

ordered_json metric_to_json(const MetricReport& m) {
    ordered_json j;
    j["device"] = m.device_label;
    j["n"] = m.n_iterations;
    j["epsilon"] = m.epsilon;
    j["theta0"] = m.theta0;
    j["ps_ideal"] = m.ps_ideal;
    j["ps_exp_mean"] = m.ps_exp_mean;
    j["ratio"] = m.ratio;
    j["f"] = m.f;
    j["f_out_of_range"] = m.f_out_of_range;
    j["s"] = m.s;
    j["sigma_stat"] = m.sigma_stat;
    j["sigma_exp"] = m.sigma_exp;
    j["shots_per_point"] = m.shots_per_point;
    j["phi0"] = m.phi0;
    j["per_phi0_estimates"] = m.per_phi0_estimates;
    return j;
}

ordered_json fit_to_json(const FitResult& fit) {
    ordered_json j;
    j["shift_model"] =
        fit.shift_model == ShiftModel::Depolarizing ? "depolarizing" : "amplitude_damping";
    j["shift_param"] = fit.shift_param;
    j["alphas"] = ordered_json::array();
    for (const FittedAngle& a : fit.alphas) {
        j["alphas"].push_back({{"qubit", a.q0},
                               {"value", a.value},
                               {"bound", a.bound},
                               {"at_bound", a.at_bound}});
    }
    j["lambdas"] = ordered_json::array();
    for (const FittedAngle& l : fit.lambdas) {
        j["lambdas"].push_back({{"control", l.q0},
                                {"target", l.q1},
                                {"value", l.value},
                                {"bound", l.bound},
                                {"at_bound", l.at_bound}});
    }
    j["residual_rms"] = fit.residual_rms;
    j["phi0"] = fit.phi0;
    j["data"] = fit.data;
    j["fitted_curve"] = fit.fitted_curve;
    return j;
}

}  // namespace

std::string make_report_json(const ReportManifest& manifest,
                             std::span<const MetricReport> metrics, const FitResult* fit) {
    ordered_json j;
    j["schema_version"] = 1;
    j["manifest"] = {{"command", manifest.command},
                     {"config", manifest.config_source},
                     {"seed", manifest.seed},
                     {"out", manifest.out_dir}};
    j["metrics"] = ordered_json::array();
    for (const MetricReport& m : metrics) j["metrics"].push_back(metric_to_json(m));
    if (fit != nullptr) j["fit"] = fit_to_json(*fit);
    return j.dump(2) + "\n";
}

std::string metrics_table(std::span<const MetricReport> metrics) {
    std::vector<const MetricReport*> sorted;
    for (const MetricReport& m : metrics) sorted.push_back(&m);
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const MetricReport* a, const MetricReport* b) { return a->f > b->f; });
    char buf[160];
    std::string out = "device            n   ratio     F        S\n";
    for (const MetricReport* m : sorted) {
        std::snprintf(buf, sizeof buf, "%-16s %2d   %.3f   %.3f   %7.3f\n",
                      m->device_label.c_str(), m->n_iterations, m->ratio, m->f, m->s);
        out += buf;
    }
    return out;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
        if (!out) throw std::runtime_error("failed writing " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace qsmb
