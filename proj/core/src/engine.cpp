#include "qsmb/engine.hpp"

#include "qsmb/gates.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace qsmb {

namespace {

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Qubit 0 is the most significant bit of the basis index.
void apply_1q(std::vector<Complex>& psi, int n_qubits, const ComplexMatrix& g, int qubit) {
    const std::size_t mask = std::size_t{1} << (n_qubits - 1 - qubit);
    for (std::size_t i = 0; i < psi.size(); ++i) {
        if (i & mask) continue;
        const std::size_t j = i | mask;
        const Complex a0 = psi[i], a1 = psi[j];
        psi[i] = g(0, 0) * a0 + g(0, 1) * a1;
        psi[j] = g(1, 0) * a0 + g(1, 1) * a1;
    }
}

void apply_2q(std::vector<Complex>& psi, int n_qubits, const ComplexMatrix& g, int qa, int qb) {
    const std::size_t ma = std::size_t{1} << (n_qubits - 1 - qa);
    const std::size_t mb = std::size_t{1} << (n_qubits - 1 - qb);
    for (std::size_t i = 0; i < psi.size(); ++i) {
        if (i & (ma | mb)) continue;
        const std::size_t idx[4] = {i, i | mb, i | ma, i | ma | mb};
        Complex in[4];
        for (int k = 0; k < 4; ++k) in[k] = psi[idx[k]];
        for (int r = 0; r < 4; ++r) {
            Complex acc = 0.0;
            for (int c = 0; c < 4; ++c) acc += g(r, c) * in[c];
            psi[idx[r]] = acc;
        }
    }
}

void check_qubit_cap(int n_qubits, int cap, const char* what) {
    if (n_qubits < 1 || n_qubits > cap) {
        throw std::invalid_argument(std::string(what) + ": qubit count " +
                                    std::to_string(n_qubits) + " exceeds the cap of " +
                                    std::to_string(cap));
    }
}

ComplexMatrix native_gate_matrix(const NativeGate& gate, const NoiseSpec& noise) {
    switch (gate.kind) {
        case NativeKind::SqrtX:
            return sqrt_x_with_error(noise.alpha(gate.q0));
        case NativeKind::Rz:
            return gates::rz(gate.angle);
        case NativeKind::Cr:
            return gates::cr(gate.angle + noise.lambda(gate.q0, gate.q1));
        case NativeKind::SwapMarker:
            break;
    }
    throw std::logic_error("native_gate_matrix: marker gates have no matrix");
}

void check_roles(int n_qubits, int kept_qubit, std::span<const int> postselect) {
    if (kept_qubit < 0 || kept_qubit >= n_qubits) {
        throw std::invalid_argument("kept qubit index out of range");
    }
    std::vector<bool> seen(n_qubits, false);
    seen[kept_qubit] = true;
    for (int q : postselect) {
        if (q < 0 || q >= n_qubits || seen[q]) {
            throw std::invalid_argument("post-selected qubits must be distinct and exclude the kept qubit");
        }
        seen[q] = true;
    }
    if (static_cast<int>(postselect.size()) + 1 != n_qubits) {
        throw std::invalid_argument("kept + post-selected qubits must cover the register");
    }
}

std::pair<std::size_t, std::size_t> success_indices(int n_qubits, int kept_qubit,
                                                    std::span<const int> postselect) {
    check_roles(n_qubits, kept_qubit, postselect);
    const std::size_t kept_mask = std::size_t{1} << (n_qubits - 1 - kept_qubit);
    return {0, kept_mask};
}

}  // namespace

RngStream::RngStream(RngSeed s) {
    state_ = mix64(s.seed) ^ mix64(s.stream ^ 0xD1B54A32D192ED03ull);
}

std::uint64_t RngStream::next_u64() {
    state_ += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

double RngStream::next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::vector<Complex> run_statevector(const CircuitIR& ir) {
    check_qubit_cap(ir.n_qubits, kMaxStatevectorQubits, "run_statevector");
    std::vector<Complex> psi(std::size_t{1} << ir.n_qubits, Complex{0.0, 0.0});
    psi[0] = 1.0;
    for (const IrOp& op : ir.ops) {
        switch (op.gate) {
            case IrGate::PrepY:
                apply_1q(psi, ir.n_qubits, gates::ry(op.param), op.q0);
                break;
            case IrGate::Phase:
                apply_1q(psi, ir.n_qubits, gates::phase(op.param), op.q0);
                break;
            case IrGate::UEps:
                apply_2q(psi, ir.n_qubits, build_u_eps(op.param), op.q0, op.q1);
                break;
        }
    }
    return psi;
}

std::vector<Complex> run_statevector(const NativeCircuit& circuit, const NoiseSpec& noise) {
    check_qubit_cap(circuit.n_qubits, kMaxStatevectorQubits, "run_statevector");
    std::vector<Complex> psi(std::size_t{1} << circuit.n_qubits, Complex{0.0, 0.0});
    psi[0] = 1.0;
    for (const NativeGate& gate : circuit.gates) {
        if (gate.kind == NativeKind::SwapMarker) continue;
        const ComplexMatrix m = native_gate_matrix(gate, noise);
        if (gate.is_two_qubit()) {
            apply_2q(psi, circuit.n_qubits, m, gate.q0, gate.q1);
        } else {
            apply_1q(psi, circuit.n_qubits, m, gate.q0);
        }
    }
    return psi;
}

double success_from_unitary_column(std::span<const Complex> amps, int kept_qubit,
                                   std::span<const int> postselect) {
    int n_qubits = 0;
    while ((std::size_t{1} << n_qubits) < amps.size()) ++n_qubits;
    if ((std::size_t{1} << n_qubits) != amps.size()) {
        throw std::invalid_argument("success_from_unitary_column: length must be a power of two");
    }
    const auto [i0, i1] = success_indices(n_qubits, kept_qubit, postselect);
    return std::norm(amps[i0]) + std::norm(amps[i1]);
}

DensityMatrix run_density(const NativeCircuit& circuit, const NoiseSpec& noise) {
    check_qubit_cap(circuit.n_qubits, kMaxDensityQubits, "run_density");
    noise.validate();

    DensityMatrix rho(circuit.n_qubits);
    for (const NativeGate& gate : circuit.gates) {
        if (gate.kind == NativeKind::SwapMarker) continue;
        const ComplexMatrix m = native_gate_matrix(gate, noise);
        if (gate.is_two_qubit()) {
            const int qs[] = {gate.q0, gate.q1};
            rho.apply_unitary(m, qs);
        } else {
            const int qs[] = {gate.q0};
            rho.apply_unitary(m, qs);
        }
    }

    // The whole-register depolarizing channel commutes with every unitary, so
    // the per-layer applications collapse exactly into one composed channel.
    const double p_dep = compose_depolarizing(noise.per_step_dep);
    if (p_dep > 0.0) rho = depolarize(rho, p_dep);

    if (noise.gamma > 0.0) {
        if (noise.damp_all_qubits) {
            for (int q = 0; q < circuit.n_qubits; ++q) {
                rho = amplitude_damp_qubit(rho, q, noise.gamma);
            }
        } else {
            for (int q : circuit.postselect_qubits) {
                rho = amplitude_damp_qubit(rho, q, noise.gamma);
            }
        }
    }
    return rho;
}

double success_from_density(const DensityMatrix& rho, int kept_qubit,
                            std::span<const int> postselect) {
    const auto [i0, i1] = success_indices(rho.n_qubits(), kept_qubit, postselect);
    return rho.basis_probability(static_cast<int>(i0)) +
           rho.basis_probability(static_cast<int>(i1));
}

int sample_shots(double p, int shots, RngSeed seed) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw std::invalid_argument("sample_shots: probability out of range");
    }
    if (shots < 0) throw std::invalid_argument("sample_shots: negative shot count");
    RngStream rng(seed);
    int successes = 0;
    for (int i = 0; i < shots; ++i) {
        if (rng.next_double() < p) ++successes;
    }
    return successes;
}

double cell_probability(const ExperimentPlan& plan, double phi0) {
    ProtocolConfig cfg = plan.base;
    cfg.phi0 = phi0;
    cfg.validate();

    const CouplingMap coupling =
        plan.coupling.n_qubits() == cfg.qubit_count() ? plan.coupling
                                                      : CouplingMap::linear(cfg.qubit_count());
    const NativeCircuit native = transpile_circuit(build_circuit(cfg), coupling);

    double p = 0.0;
    if (plan.noise.trivial()) {
        const std::vector<Complex> psi = run_statevector(native);
        p = success_from_unitary_column(psi, native.kept_qubit, native.postselect_qubits);
    } else {
        const DensityMatrix rho = run_density(native, plan.noise);
        p = success_from_density(rho, native.kept_qubit, native.postselect_qubits);
    }
    if (plan.noise.readout) {
        p = readout_flip(std::clamp(p, 0.0, 1.0), plan.noise.readout->p01, plan.noise.readout->p10,
                         static_cast<int>(native.postselect_qubits.size()));
    }
    return std::clamp(p, 0.0, 1.0);
}

std::vector<ExperimentRecord> run_experiment(const ExperimentPlan& plan) {
    if (plan.shots < 1 || plan.runs < 1) {
        throw std::invalid_argument("run_experiment: shots and runs must be positive");
    }
    std::vector<int> qubit_set = plan.qubit_set;
    if (qubit_set.empty()) {
        qubit_set.resize(plan.base.qubit_count());
        std::iota(qubit_set.begin(), qubit_set.end(), 0);
    }

    std::vector<ExperimentRecord> records;
    records.reserve(plan.phi0_grid.size() * plan.runs);
    for (std::size_t pi = 0; pi < plan.phi0_grid.size(); ++pi) {
        const double phi0 = plan.phi0_grid[pi];
        const double p = cell_probability(plan, phi0);
        for (int run = 0; run < plan.runs; ++run) {
            const std::uint64_t stream = pi * static_cast<std::uint64_t>(plan.runs) + run;
            ExperimentRecord rec;
            rec.device_label = plan.device_label;
            rec.qubit_set = qubit_set;
            rec.n_iterations = plan.base.n_iterations;
            rec.epsilon = plan.base.epsilon;
            rec.theta0 = plan.base.theta0;
            rec.phi0 = phi0;
            rec.run_index = run;
            rec.shots = plan.shots;
            rec.success_count = sample_shots(p, plan.shots, RngSeed{plan.seed, stream});
            records.push_back(std::move(rec));
        }
    }
    return records;
}

}  // namespace qsmb
