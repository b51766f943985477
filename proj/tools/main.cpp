// qsmb: simulate, score and fit the iterated post-selective state-matching
// benchmark. Data goes to files; diagnostics go to stderr.

#include "qsmb/analysis.hpp"
#include "qsmb/engine.hpp"
#include "qsmb/formats.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

namespace fs = std::filesystem;

struct GlobalOptions {
    std::string config_path;
    std::uint64_t seed = 1;
    std::string out_dir = ".";
    bool quiet = false;
};

qsmb::RunConfig load_config(const GlobalOptions& global) {
    if (global.config_path.empty()) return qsmb::RunConfig{};
    return qsmb::RunConfig::from_kv(qsmb::KvConfig::parse_file(global.config_path));
}

qsmb::ReportManifest make_manifest(const GlobalOptions& global, const std::string& command) {
    qsmb::ReportManifest manifest;
    manifest.command = command;
    manifest.config_source = global.config_path.empty() ? "defaults" : global.config_path;
    manifest.seed = global.seed;
    manifest.out_dir = global.out_dir;
    return manifest;
}

fs::path out_path(const GlobalOptions& global, const std::string& name) {
    fs::create_directories(global.out_dir);
    return fs::path(global.out_dir) / name;
}

void note(const GlobalOptions& global, const std::string& message) {
    if (!global.quiet) std::cerr << message << '\n';
}

std::vector<qsmb::ExperimentRecord> read_records_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open records file " + path);
    return qsmb::read_records_csv(in, path);
}

// Records grouped per (device, n); each group feeds one metric report.
std::map<std::pair<std::string, int>, std::vector<qsmb::ExperimentRecord>> group_records(
    const std::vector<qsmb::ExperimentRecord>& records) {
    std::map<std::pair<std::string, int>, std::vector<qsmb::ExperimentRecord>> groups;
    for (const qsmb::ExperimentRecord& r : records) {
        groups[{r.device_label, r.n_iterations}].push_back(r);
    }
    return groups;
}

int cmd_theory(const GlobalOptions& global, double epsilon, double theta0, int n, double phi0) {
    const double ps = qsmb::success_probability(epsilon, theta0, n);
    const qsmb::KeptQubitState state =
        qsmb::theoretical_state({epsilon, theta0, phi0, n});
    std::cout << "p_s = " << qsmb::format_angle(ps) << '\n';
    std::cout << "kept state amplitudes:\n";
    std::cout << "  |0>: " << qsmb::format_angle(state.amp0.real()) << " + "
              << qsmb::format_angle(state.amp0.imag()) << "i\n";
    std::cout << "  |1>: " << qsmb::format_angle(state.amp1.real()) << " + "
              << qsmb::format_angle(state.amp1.imag()) << "i\n";
    (void)global;
    return 0;
}

int cmd_simulate(const GlobalOptions& global) {
    const qsmb::RunConfig config = load_config(global);
    const auto records = qsmb::run_experiment(config.plan(global.seed));

    std::stringstream csv;
    qsmb::write_records_csv(csv, records);
    qsmb::write_file_atomic(out_path(global, "records.csv"), csv.str());

    const qsmb::MetricReport report = qsmb::make_metric_report(records);
    const qsmb::MetricReport reports[] = {report};
    qsmb::write_file_atomic(out_path(global, "report.json"),
                            qsmb::make_report_json(make_manifest(global, "simulate"), reports));
    note(global, "wrote records.csv (" + std::to_string(records.size()) + " rows) and report.json");
    note(global, qsmb::metrics_table(reports));
    return 0;
}

int cmd_metrics(const GlobalOptions& global, const std::string& records_path) {
    const auto records = read_records_file(records_path);
    std::vector<qsmb::MetricReport> reports;
    for (const auto& [key, group] : group_records(records)) {
        reports.push_back(qsmb::make_metric_report(group));
    }
    std::sort(reports.begin(), reports.end(),
              [](const qsmb::MetricReport& a, const qsmb::MetricReport& b) { return a.f > b.f; });
    qsmb::write_file_atomic(out_path(global, "metrics.json"),
                            qsmb::make_report_json(make_manifest(global, "metrics"), reports));
    std::cout << qsmb::metrics_table(reports);
    return 0;
}

int cmd_fit(const GlobalOptions& global, const std::string& records_path) {
    const qsmb::RunConfig config = load_config(global);
    const auto records = read_records_file(records_path);
    const auto groups = group_records(records);
    if (groups.size() != 1) {
        throw std::runtime_error("fit expects a single (device, n) group, found " +
                                 std::to_string(groups.size()));
    }
    const qsmb::FitResult fit = qsmb::fit_pipeline(groups.begin()->second, config.fit);

    qsmb::write_file_atomic(
        out_path(global, "fit.json"),
        qsmb::make_report_json(make_manifest(global, "fit"), {}, &fit));

    std::stringstream curve;
    curve << "phi0,estimate,fitted\n";
    for (std::size_t i = 0; i < fit.phi0.size(); ++i) {
        curve << qsmb::format_angle(fit.phi0[i]) << ',' << qsmb::format_angle(fit.data[i]) << ','
              << qsmb::format_angle(fit.fitted_curve[i]) << '\n';
    }
    qsmb::write_file_atomic(out_path(global, "fitted_curve.csv"), curve.str());

    note(global, "shift model: " + std::string(fit.shift_model == qsmb::ShiftModel::Depolarizing
                                                   ? "depolarizing"
                                                   : "amplitude_damping") +
                     ", parameter " + qsmb::format_angle(fit.shift_param) + ", residual rms " +
                     qsmb::format_angle(fit.residual_rms));
    return 0;
}

int cmd_sweep(const GlobalOptions& global) {
    const qsmb::RunConfig config = load_config(global);
    const auto records = qsmb::run_experiment(config.plan(global.seed));
    const qsmb::Aggregate agg = qsmb::aggregate(records);
    const double ideal = qsmb::success_probability(config.protocol.epsilon,
                                                   config.protocol.theta0,
                                                   config.protocol.n_iterations);
    const double sigma = qsmb::sigma_stat(ideal, agg.shots_per_point);

    std::stringstream csv;
    csv << "phi0,ideal,mean,band_lo,band_hi\n";
    for (std::size_t i = 0; i < agg.phi0.size(); ++i) {
        csv << qsmb::format_angle(agg.phi0[i]) << ',' << qsmb::format_angle(ideal) << ','
            << qsmb::format_angle(agg.estimates[i]) << ',' << qsmb::format_angle(ideal - sigma)
            << ',' << qsmb::format_angle(ideal + sigma) << '\n';
    }
    qsmb::write_file_atomic(out_path(global, "sweep.csv"), csv.str());
    note(global, "wrote sweep.csv (" + std::to_string(agg.phi0.size()) + " rows)");
    return 0;
}

int cmd_transpile(const GlobalOptions& global, double epsilon, double theta0, double phi0, int n,
                  const std::string& coupling_spec, const std::string& out_file) {
    qsmb::RunConfig config = load_config(global);
    config.protocol = {epsilon, theta0, phi0, n};
    config.coupling_spec = coupling_spec;
    config.protocol.validate();

    const qsmb::CircuitIR ir = qsmb::build_circuit(config.protocol);
    const qsmb::NativeCircuit native = qsmb::transpile_circuit(ir, config.coupling());

    std::stringstream text;
    qsmb::write_circuit_text(text, native);
    if (out_file.empty()) {
        std::cout << text.str();
    } else {
        qsmb::write_file_atomic(out_path(global, out_file), text.str());
        note(global, "wrote " + out_file);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"iterated post-selective state-matching benchmark toolkit"};
    app.require_subcommand(1);

    GlobalOptions global;
    app.add_option("--config", global.config_path, "key = value configuration file");
    app.add_option("--seed", global.seed, "base RNG seed (every cell derives its own stream)");
    app.add_option("--out", global.out_dir, "output directory");
    app.add_flag("--quiet", global.quiet, "suppress progress notes on stderr");

    double epsilon = 0.973;
    double theta0 = std::numbers::pi / 8.0;
    double phi0 = 0.0;
    int n = 1;

    CLI::App* theory = app.add_subcommand("theory", "print the ideal success probability");
    theory->add_option("--epsilon", epsilon, "neighbourhood radius in (0, 1]");
    theory->add_option("--theta0", theta0, "input polar angle");
    theory->add_option("--phi0", phi0, "input azimuthal angle");
    theory->add_option("--n", n, "iteration count");

    CLI::App* simulate = app.add_subcommand("simulate", "run the sweep, write records + report");
    CLI::App* sweep = app.add_subcommand("sweep", "run the sweep, write a plot-ready CSV");

    std::string records_path;
    CLI::App* metrics = app.add_subcommand("metrics", "score a records CSV");
    metrics->add_option("records", records_path, "records CSV file")->required();
    CLI::App* fit = app.add_subcommand("fit", "fit the error model to a records CSV");
    fit->add_option("records", records_path, "records CSV file")->required();

    std::string coupling_spec = "linear";
    std::string circuit_out;
    CLI::App* transpile = app.add_subcommand("transpile", "dump the transpiled circuit");
    transpile->add_option("--epsilon", epsilon, "neighbourhood radius in (0, 1]");
    transpile->add_option("--theta0", theta0, "input polar angle");
    transpile->add_option("--phi0", phi0, "input azimuthal angle");
    transpile->add_option("--n", n, "iteration count");
    transpile->add_option("--coupling", coupling_spec, "linear | full | edge list 0-1,1-2");
    transpile->add_option("--circuit-out", circuit_out, "write to file instead of stdout");

    CLI11_PARSE(app, argc, argv);

    try {
        if (theory->parsed()) return cmd_theory(global, epsilon, theta0, n, phi0);
        if (simulate->parsed()) return cmd_simulate(global);
        if (metrics->parsed()) return cmd_metrics(global, records_path);
        if (fit->parsed()) return cmd_fit(global, records_path);
        if (sweep->parsed()) return cmd_sweep(global);
        if (transpile->parsed()) {
            return cmd_transpile(global, epsilon, theta0, phi0, n, coupling_spec, circuit_out);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
