#pragma once

#include "qsmb/analysis.hpp"
#include "qsmb/engine.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace qsmb {

/// Flat `key = value` configuration text. '#' starts a comment; keys are
/// namespaced (protocol.epsilon, noise.alpha.0); unknown keys are hard errors.
struct KvConfig {
    std::map<std::string, std::string> entries;

    static KvConfig parse(std::istream& in, const std::string& source_name);
    static KvConfig parse_file(const std::filesystem::path& path);
};

/// Fully resolved run configuration shared by simulate/sweep/fit.
struct RunConfig {
    ProtocolConfig protocol{0.973, 0.39269908169872414, 0.0, 1};  // theta0 = pi/8
    int phi0_points = 50;
    int shots = 2000;
    int runs = 5;
    std::string device_label = "sim";
    std::vector<int> device_qubits;  // reporting labels
    std::string coupling_spec = "linear";
    NoiseSpec noise;
    FitOptions fit;

    static RunConfig from_kv(const KvConfig& kv);

    std::vector<double> phi0_grid() const;
    CouplingMap coupling() const;
    ExperimentPlan plan(std::uint64_t seed) const;
};

/// Noise presets named after the tested devices, carrying the fitted error
/// parameters and tolerance bounds for demonstration runs. They are fits,
/// not ground truth.
std::vector<std::string> preset_names();
void apply_preset(RunConfig& config, const std::string& name);

// --- records CSV (header: device,qubits,n,epsilon,theta0,phi0,run,shots,success_count)
void write_records_csv(std::ostream& out, std::span<const ExperimentRecord> records);
std::vector<ExperimentRecord> read_records_csv(std::istream& in, const std::string& source_name);

// --- transpiled-circuit text (one gate per line)
void write_circuit_text(std::ostream& out, const NativeCircuit& circuit);
NativeCircuit read_circuit_text(std::istream& in, const std::string& source_name);

// --- report JSON ({schema_version, manifest, metrics[], fit?})
struct ReportManifest {
    std::string command;
    std::string config_source = "defaults";
    std::uint64_t seed = 0;
    std::string out_dir;
};
std::string make_report_json(const ReportManifest& manifest,
                             std::span<const MetricReport> metrics,
                             const FitResult* fit = nullptr);

std::string format_angle(double value);  // 12 significant digits
std::string metrics_table(std::span<const MetricReport> metrics);

/// Writes through a temp file and renames, so readers never see partial data.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace qsmb
