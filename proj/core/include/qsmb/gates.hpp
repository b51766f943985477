#pragma once

#include "qsmb/qmath.hpp"

namespace qsmb::gates {

// Two-qubit matrices act on basis |q0 q1> with the first qubit as the most
// significant bit; the control-like qubit of cnot/cr is the first one.

ComplexMatrix identity2();
ComplexMatrix pauli_x();
ComplexMatrix pauli_y();
ComplexMatrix pauli_z();
ComplexMatrix hadamard();

ComplexMatrix rx(double theta);
ComplexMatrix ry(double theta);
ComplexMatrix rz(double theta);

/// Phase gate diag(1, e^{i*lambda}).
ComplexMatrix phase(double lambda);

ComplexMatrix sqrt_x();
ComplexMatrix sqrt_x_dag();

ComplexMatrix cnot();
ComplexMatrix swap();

/// Cross-resonance rotation exp(-i*beta * Z (x) X).
ComplexMatrix cr(double beta);

/// Controlled single-qubit gate |0><0| (x) I + |1><1| (x) u.
ComplexMatrix controlled(const ComplexMatrix& u);

/// CU3(beta, pi/2, -pi/2): controlled [[cos(b/2), i sin(b/2)], [i sin(b/2), cos(b/2)]].
ComplexMatrix cu_ix(double beta);

/// 4x4 exchange matrix J, ones on the antidiagonal.
ComplexMatrix exchange4();

}  // namespace qsmb::gates
