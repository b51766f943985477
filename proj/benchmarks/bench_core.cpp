#include "qsmb/analysis.hpp"
#include "qsmb/engine.hpp"
#include "qsmb/protocol.hpp"
#include "qsmb/transpile.hpp"

#include <benchmark/benchmark.h>

#include <numbers>
#include <vector>

namespace {

constexpr double kPi = std::numbers::pi;

qsmb::ProtocolConfig config_for(int n) { return {0.973, kPi / 8.0, 0.7, n}; }

void BM_BuildUEps(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(qsmb::build_u_eps(0.973));
    }
}
BENCHMARK(BM_BuildUEps);

void BM_DecomposeUEps(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(qsmb::decompose_u_eps(0.973));
    }
}
BENCHMARK(BM_DecomposeUEps);

void BM_Transpile(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const qsmb::CircuitIR ir = qsmb::build_circuit(config_for(n));
    const qsmb::CouplingMap coupling = qsmb::CouplingMap::linear(1 << n);
    for (auto _ : state) {
        benchmark::DoNotOptimize(qsmb::transpile_circuit(ir, coupling));
    }
}
BENCHMARK(BM_Transpile)->Arg(1)->Arg(2);

void BM_StatevectorIR(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const qsmb::CircuitIR ir = qsmb::build_circuit(config_for(n));
    for (auto _ : state) {
        benchmark::DoNotOptimize(qsmb::run_statevector(ir));
    }
}
BENCHMARK(BM_StatevectorIR)->Arg(1)->Arg(2)->Arg(3);

void BM_StatevectorNative(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const qsmb::NativeCircuit native =
        qsmb::transpile_circuit(qsmb::build_circuit(config_for(n)),
                                qsmb::CouplingMap::linear(1 << n));
    qsmb::NoiseSpec coherent;
    coherent.alphas[0] = 0.03;
    coherent.lambdas[{0, 1}] = -0.02;
    for (auto _ : state) {
        benchmark::DoNotOptimize(qsmb::run_statevector(native, coherent));
    }
}
BENCHMARK(BM_StatevectorNative)->Arg(1)->Arg(2);

void BM_DensityRun(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const qsmb::NativeCircuit native =
        qsmb::transpile_circuit(qsmb::build_circuit(config_for(n)),
                                qsmb::CouplingMap::linear(1 << n));
    qsmb::NoiseSpec noise;
    noise.per_step_dep = {0.02};
    noise.gamma = 0.01;
    noise.alphas[0] = 0.03;
    for (auto _ : state) {
        benchmark::DoNotOptimize(qsmb::run_density(native, noise));
    }
}
BENCHMARK(BM_DensityRun)->Arg(1)->Arg(2);

void BM_SampleShots(benchmark::State& state) {
    const int shots = static_cast<int>(state.range(0));
    std::uint64_t stream = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(qsmb::sample_shots(0.8775, shots, {1234, stream++}));
    }
    state.SetItemsProcessed(state.iterations() * shots);
}
BENCHMARK(BM_SampleShots)->Arg(2000)->Arg(100000);

void BM_ForwardModelCurve(benchmark::State& state) {
    // one full 50-point model evaluation, the hot path of the coherent fit
    qsmb::ProtocolConfig cfg = config_for(1);
    std::vector<qsmb::NativeCircuit> circuits;
    for (int k = 0; k < 50; ++k) {
        cfg.phi0 = 2.0 * kPi * k / 50.0;
        circuits.push_back(
            qsmb::transpile_circuit(qsmb::build_circuit(cfg), qsmb::CouplingMap::linear(2)));
    }
    qsmb::NoiseSpec coherent;
    coherent.alphas[0] = 0.0283;
    coherent.alphas[1] = 0.0445;
    coherent.lambdas[{0, 1}] = -0.0178;
    for (auto _ : state) {
        double acc = 0.0;
        for (const qsmb::NativeCircuit& c : circuits) {
            const auto psi = qsmb::run_statevector(c, coherent);
            acc += qsmb::success_from_unitary_column(psi, c.kept_qubit, c.postselect_qubits);
        }
        benchmark::DoNotOptimize(acc);
    }
}
BENCHMARK(BM_ForwardModelCurve);

void BM_RunExperiment(benchmark::State& state) {
    qsmb::ExperimentPlan plan;
    plan.base = config_for(1);
    for (int k = 0; k < 50; ++k) plan.phi0_grid.push_back(2.0 * kPi * k / 50.0);
    plan.shots = 2000;
    plan.runs = 5;
    plan.noise.per_step_dep = {0.02};
    for (auto _ : state) {
        benchmark::DoNotOptimize(qsmb::run_experiment(plan));
    }
}
BENCHMARK(BM_RunExperiment);

}  // namespace

BENCHMARK_MAIN();
