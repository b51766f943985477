#pragma once

#include "qsmb/qmath.hpp"

#include <vector>

namespace qsmb {

/// One experiment definition: neighbourhood radius, input state, iteration count.
struct ProtocolConfig {
    double epsilon = 0.973;
    double theta0 = 0.0;
    double phi0 = 0.0;
    int n_iterations = 1;

    void validate() const;  // throws std::invalid_argument
    int qubit_count() const { return 1 << n_iterations; }
};

/// The two-qubit matching unitary U_eps; unitary for every epsilon in (0, 1].
ComplexMatrix build_u_eps(double epsilon);

/// The core nonlinear map z -> z^2 / epsilon on the extended complex plane.
ExtendedComplex f_map(const ExtendedComplex& z, double epsilon);

/// n-fold composition of f_map. Equals z^(2^n) / epsilon^(2^n - 1).
ExtendedComplex iterate_f(const ExtendedComplex& z, double epsilon, int n);

/// Normalized amplitudes of the final kept qubit after n successful iterations.
struct KeptQubitState {
    Complex amp0;
    Complex amp1;
};
KeptQubitState theoretical_state(const ProtocolConfig& cfg);

/// Probability that all n rounds of post-selection succeed; independent of phi0.
double success_probability(double epsilon, double theta0, int n);

// ---------------------------------------------------------------------------
// Abstract circuit representation. Gate decomposition lives in transpile.
// ---------------------------------------------------------------------------

enum class IrGate {
    PrepY,  // R_y(theta0), single qubit
    Phase,  // P(phi0), single qubit
    UEps,   // U_eps on (kept, measured), kept listed first
};

struct IrOp {
    IrGate gate;
    double param = 0.0;
    int q0 = 0;
    int q1 = -1;
};

struct CircuitIR {
    int n_qubits = 0;
    std::vector<IrOp> ops;
    std::vector<int> postselect_qubits;
    int kept_qubit = 0;
};

/// Builds the full protocol circuit on 2^n qubits: state preparation on every
/// wire, then one layer of U_eps blocks per iteration, pairing the kept qubits
/// of adjacent blocks (wires 0 and 2^(k-1) within each 2^k block). All
/// post-selection measurements are deferred to the end.
CircuitIR build_circuit(const ProtocolConfig& cfg);

}  // namespace qsmb
