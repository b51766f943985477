#include "qsmb/formats.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

using namespace qsmb;
using doctest::Approx;

namespace {
constexpr double kPi = std::numbers::pi;

KvConfig kv_from_string(const std::string& text) {
    std::istringstream in(text);
    return KvConfig::parse(in, "test.cfg");
}
}  // namespace

TEST_CASE("KvConfig parsing") {
    const KvConfig kv = kv_from_string(
        "# comment\n"
        "protocol.epsilon = 0.95\n"
        "\n"
        "run.shots = 1234  # trailing comment\n");
    CHECK(kv.entries.at("protocol.epsilon") == "0.95");
    CHECK(kv.entries.at("run.shots") == "1234");

    CHECK_THROWS_AS(kv_from_string("not a pair\n"), std::runtime_error);
    CHECK_THROWS_AS(kv_from_string("a = 1\na = 2\n"), std::runtime_error);
}

TEST_CASE("RunConfig typed parsing and validation") {
    const RunConfig config = RunConfig::from_kv(kv_from_string(
        "protocol.epsilon = 0.9\n"
        "protocol.theta0 = 0.5\n"
        "protocol.n = 2\n"
        "sweep.phi0_points = 10\n"
        "run.shots = 100\n"
        "run.runs = 3\n"
        "device.label = bench\n"
        "device.qubits = 0-1-3-4\n"
        "device.coupling = linear\n"
        "noise.dep = 0.01,0.02\n"
        "noise.gamma = 0.005\n"
        "noise.alpha.0 = 0.03\n"
        "noise.lambda.0-1 = -0.02\n"
        "fit.model = dep\n"
        "fit.bound.default = 0.2\n"));
    CHECK(config.protocol.epsilon == 0.9);
    CHECK(config.protocol.n_iterations == 2);
    CHECK(config.phi0_points == 10);
    CHECK(config.device_qubits == std::vector<int>{0, 1, 3, 4});
    CHECK(config.noise.per_step_dep == std::vector<double>{0.01, 0.02});
    CHECK(config.noise.alpha(0) == 0.03);
    CHECK(config.noise.lambda(0, 1) == -0.02);
    CHECK((config.fit.model == ShiftModel::Depolarizing));
    CHECK(config.fit.default_bound == 0.2);
    CHECK(config.phi0_grid().size() == 10);
    CHECK(config.coupling().coupled(0, 1));
    CHECK_FALSE(config.coupling().coupled(0, 2));

    SUBCASE("unknown keys are hard errors") {
        CHECK_THROWS_WITH_AS(RunConfig::from_kv(kv_from_string("protocol.epsilen = 0.9\n")),
                             "unknown config key 'protocol.epsilen'", std::runtime_error);
    }

    SUBCASE("type errors carry the key name") {
        CHECK_THROWS_AS(RunConfig::from_kv(kv_from_string("run.shots = lots\n")),
                        std::runtime_error);
    }

    SUBCASE("explicit coupling edges") {
        const RunConfig c = RunConfig::from_kv(kv_from_string(
            "protocol.n = 2\ndevice.coupling = 0-1,1-2,2-3,0-3\n"));
        CHECK(c.coupling().coupled(0, 3));
    }
}

TEST_CASE("noise presets") {
    CHECK(preset_names().size() == 12);

    RunConfig config = RunConfig::from_kv(kv_from_string("noise.preset = nairobi-n1\n"));
    CHECK(config.protocol.n_iterations == 1);
    CHECK(config.device_label == "nairobi-n1");
    CHECK(config.noise.alpha(0) == Approx(2.83e-2));
    CHECK(config.noise.alpha(1) == Approx(4.45e-2));
    CHECK(config.noise.lambda(0, 1) == Approx(-1.78e-2));
    CHECK(config.noise.gamma == Approx(1.21e-2));
    CHECK(config.noise.per_step_dep.empty());
    CHECK(config.fit.alpha_bounds.at(0) == Approx(5.26e-2));
    CHECK((config.fit.model == ShiftModel::AmplitudeDamping));

    SUBCASE("explicit keys override the preset") {
        const RunConfig c = RunConfig::from_kv(
            kv_from_string("noise.preset = lima-n1\nnoise.gamma = 0.5\n"));
        CHECK(c.noise.gamma == 0.5);
        CHECK(c.noise.per_step_dep == std::vector<double>{1.99e-2});
    }

    SUBCASE("n = 2 preset binds four ordered lambda pairs") {
        const RunConfig c = RunConfig::from_kv(kv_from_string("noise.preset = lima-n2\n"));
        CHECK(c.protocol.n_iterations == 2);
        CHECK(c.noise.lambda(0, 1) == Approx(-4.42e-2));
        CHECK(c.noise.lambda(2, 3) == Approx(3.13e-2));
        CHECK(c.noise.lambda(1, 0) == Approx(8.44e-2));
        CHECK(c.noise.lambda(1, 2) == Approx(3.33e-2));
        CHECK(c.device_qubits == std::vector<int>{0, 1, 3, 4});
    }

    CHECK_THROWS_AS(RunConfig::from_kv(kv_from_string("noise.preset = narobi-n1\n")),
                    std::runtime_error);
}

TEST_CASE("records CSV round-trip") {
    ExperimentPlan plan;
    plan.base = {0.973, kPi / 8.0, 0.0, 1};
    for (int k = 0; k < 7; ++k) plan.phi0_grid.push_back(2.0 * kPi * k / 7.0);
    plan.shots = 500;
    plan.runs = 2;
    plan.seed = 5;
    plan.device_label = "roundtrip";
    const auto records = run_experiment(plan);

    std::stringstream first;
    write_records_csv(first, records);
    const auto parsed = read_records_csv(first, "mem.csv");
    REQUIRE(parsed.size() == records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        CHECK(parsed[i].device_label == records[i].device_label);
        CHECK(parsed[i].success_count == records[i].success_count);
        CHECK(parsed[i].shots == records[i].shots);
        CHECK(std::abs(parsed[i].phi0 - records[i].phi0) < 1e-9);
    }

    // emit(parse(emit(x))) is byte-identical: the 12-significant-digit
    // formatting is a fixed point after one round
    std::stringstream second;
    write_records_csv(second, parsed);
    CHECK(first.str() == second.str());
}

TEST_CASE("records CSV errors carry line numbers") {
    std::istringstream missing_header("a,b\n");
    CHECK_THROWS_WITH_AS(read_records_csv(missing_header, "bad.csv"),
                         "bad.csv:1: unexpected header 'a,b'", std::runtime_error);

    std::istringstream bad_row(
        "device,qubits,n,epsilon,theta0,phi0,run,shots,success_count\n"
        "dev,0-1,1,0.9,0.1,0.2,0,100,boom\n");
    try {
        read_records_csv(bad_row, "bad.csv");
        FAIL("expected an error");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find("bad.csv:2") == 0);
    }

    std::istringstream overflow(
        "device,qubits,n,epsilon,theta0,phi0,run,shots,success_count\n"
        "dev,0-1,1,0.9,0.1,0.2,0,100,200\n");
    CHECK_THROWS_AS(read_records_csv(overflow, "bad.csv"), std::runtime_error);
}

TEST_CASE("circuit text round-trip") {
    const ProtocolConfig cfg{0.973, kPi / 8.0, 0.9, 2};
    const NativeCircuit native = transpile_circuit(build_circuit(cfg), CouplingMap::linear(4));

    std::stringstream text;
    write_circuit_text(text, native);
    const NativeCircuit parsed = read_circuit_text(text, "mem.circuit");

    CHECK(parsed.n_qubits == native.n_qubits);
    CHECK(parsed.kept_qubit == native.kept_qubit);
    CHECK(parsed.postselect_qubits == native.postselect_qubits);
    CHECK(parsed.swap_count == native.swap_count);
    REQUIRE(parsed.gates.size() == native.gates.size());
    for (std::size_t i = 0; i < native.gates.size(); ++i) {
        CHECK(parsed.gates[i].kind == native.gates[i].kind);
        CHECK(parsed.gates[i].angle == native.gates[i].angle);  // %.17g is exact
        CHECK(parsed.gates[i].q0 == native.gates[i].q0);
        CHECK(parsed.gates[i].q1 == native.gates[i].q1);
    }
}

TEST_CASE("report JSON schema") {
    ExperimentPlan plan;
    plan.base = {0.973, kPi / 8.0, 0.0, 1};
    for (int k = 0; k < 5; ++k) plan.phi0_grid.push_back(2.0 * kPi * k / 5.0);
    plan.shots = 200;
    plan.runs = 2;
    const auto records = run_experiment(plan);
    const MetricReport report = make_metric_report(records);

    ReportManifest manifest;
    manifest.command = "simulate";
    manifest.seed = 7;
    manifest.out_dir = "/tmp";
    const MetricReport reports[] = {report};
    const std::string payload = make_report_json(manifest, reports);

    const auto j = nlohmann::json::parse(payload);
    CHECK(j["schema_version"] == 1);
    CHECK(j["manifest"]["command"] == "simulate");
    CHECK(j["manifest"]["seed"] == 7);
    CHECK(j["metrics"].size() == 1);
    CHECK(j["metrics"][0]["device"] == "sim");
    CHECK(j["metrics"][0]["phi0"].size() == 5);
    const bool has_fit = j.contains("fit") && !j["fit"].is_null();
    CHECK_FALSE(has_fit);

    // fit section appears when provided
    FitResult fit;
    fit.shift_model = ShiftModel::AmplitudeDamping;
    fit.shift_param = 0.0121;
    fit.alphas.push_back({0, -1, 0.0283, 0.0526, false});
    fit.phi0 = {0.0};
    fit.data = {0.9};
    fit.fitted_curve = {0.9};
    const std::string with_fit = make_report_json(manifest, reports, &fit);
    const auto j2 = nlohmann::json::parse(with_fit);
    CHECK(j2["fit"]["shift_model"] == "amplitude_damping");
    CHECK(j2["fit"]["alphas"][0]["qubit"] == 0);
}

TEST_CASE("format_angle uses 12 significant digits") {
    CHECK(format_angle(kPi / 8.0) == "0.392699081699");
    CHECK(format_angle(2.0) == "2");
}

TEST_CASE("write_file_atomic") {
    const std::filesystem::path dir =
        std::filesystem::temp_directory_path() / "qsmb_formats_test";
    std::filesystem::create_directories(dir);
    const std::filesystem::path target = dir / "data.txt";
    write_file_atomic(target, "hello\n");
    std::ifstream in(target);
    std::string line;
    std::getline(in, line);
    CHECK(line == "hello");
    CHECK_FALSE(std::filesystem::exists(target.string() + ".tmp"));
    std::filesystem::remove_all(dir);
}
