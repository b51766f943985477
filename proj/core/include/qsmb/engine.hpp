#pragma once

#include "qsmb/noise.hpp"
#include "qsmb/protocol.hpp"
#include "qsmb/transpile.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace qsmb {

inline constexpr int kMaxStatevectorQubits = 12;
inline constexpr int kMaxDensityQubits = 5;

/// (seed, stream) pair; each pair selects an independent, reproducible
/// sample sequence so sweep cells can run in any order.
struct RngSeed {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
};

/// Counter-seeded splitmix64 generator.
class RngStream {
public:
    explicit RngStream(RngSeed s);
    std::uint64_t next_u64();
    double next_double();  // uniform in [0, 1)

private:
    std::uint64_t state_;
};

/// One (phi0, run) cell of measured or simulated success counts.
struct ExperimentRecord {
    std::string device_label;
    std::vector<int> qubit_set;
    int n_iterations = 1;
    double epsilon = 0.0;
    double theta0 = 0.0;
    double phi0 = 0.0;
    int run_index = 0;
    int shots = 0;
    int success_count = 0;

    bool operator==(const ExperimentRecord&) const = default;
};

/// Exact state U|0...0> of the abstract protocol circuit.
std::vector<Complex> run_statevector(const CircuitIR& ir);

/// Exact state of a native circuit; coherent misrotations from `noise`
/// (alpha per sqrt(X) qubit, lambda per CR pair) substitute into the gates,
/// incoherent fields are ignored on this path.
std::vector<Complex> run_statevector(const NativeCircuit& circuit, const NoiseSpec& noise = {});

/// p_s = |U_11|^2 + |U_j1|^2: probability mass of the two basis states whose
/// post-selected qubits all read 0. Requires kept + postselect to cover the register.
double success_from_unitary_column(std::span<const Complex> amps, int kept_qubit,
                                   std::span<const int> postselect);

/// Density-matrix evolution with the full error model: coherent misrotations
/// substituted into the gates, the composed per-step depolarizing channel,
/// and amplitude damping on the post-selected qubits before readout.
DensityMatrix run_density(const NativeCircuit& circuit, const NoiseSpec& noise);

double success_from_density(const DensityMatrix& rho, int kept_qubit,
                            std::span<const int> postselect);

/// One binomial(shots, p) draw, deterministic for a given seed.
int sample_shots(double p, int shots, RngSeed seed);

/// Full sweep definition: a phi0 grid over one protocol configuration.
struct ExperimentPlan {
    ProtocolConfig base;  // phi0 field unused
    std::vector<double> phi0_grid;
    NoiseSpec noise;
    CouplingMap coupling;  // defaults to linear over 2^n qubits
    int shots = 2000;
    int runs = 5;
    std::uint64_t seed = 1;
    std::string device_label = "sim";
    std::vector<int> qubit_set;  // reporting labels; defaults to wire indices
};

/// True (noisy) success probability of one phi0 cell, readout flips included.
double cell_probability(const ExperimentPlan& plan, double phi0);

/// One record per (phi0, run) with a fresh RNG stream per cell; deterministic
/// for a fixed seed regardless of evaluation order.
std::vector<ExperimentRecord> run_experiment(const ExperimentPlan& plan);

}  // namespace qsmb
