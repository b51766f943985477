#pragma once

#include "qsmb/protocol.hpp"
#include "qsmb/qmath.hpp"

#include <set>
#include <utility>
#include <vector>

namespace qsmb {

enum class NativeKind {
    SqrtX,       // physical sqrt(X); misrotations attach here
    Rz,          // virtual z rotation, error-free
    Cr,          // cross-resonance exp(-i*beta Z(x)X), q0 = Z side
    SwapMarker,  // bookkeeping marker preceding a 3-CNOT SWAP expansion
};

struct NativeGate {
    NativeKind kind;
    double angle = 0.0;
    int q0 = 0;
    int q1 = -1;

    static NativeGate sqrt_x(int q) { return {NativeKind::SqrtX, 0.0, q, -1}; }
    static NativeGate rz(double angle, int q) { return {NativeKind::Rz, angle, q, -1}; }
    static NativeGate cr(double beta, int control, int target) {
        return {NativeKind::Cr, beta, control, target};
    }
    static NativeGate swap_marker(int a, int b) { return {NativeKind::SwapMarker, 0.0, a, b}; }

    bool is_two_qubit() const { return kind == NativeKind::Cr; }
};

/// Undirected qubit connectivity constraint for two-qubit gates.
class CouplingMap {
public:
    CouplingMap() = default;
    static CouplingMap full(int n_qubits);
    static CouplingMap linear(int n_qubits);
    static CouplingMap from_edges(int n_qubits, const std::vector<std::pair<int, int>>& edges);

    int n_qubits() const { return n_qubits_; }
    bool all_to_all() const { return full_; }
    bool coupled(int a, int b) const;
    const std::set<std::pair<int, int>>& edges() const { return edges_; }

    /// BFS shortest path between two qubits; empty when disconnected.
    std::vector<int> shortest_path(int a, int b) const;

private:
    int n_qubits_ = 0;
    bool full_ = false;
    std::set<std::pair<int, int>> edges_;  // normalized (min, max)
};

struct NativeCircuit {
    int n_qubits = 0;
    std::vector<NativeGate> gates;
    CouplingMap coupling;
    int swap_count = 0;
    int kept_qubit = 0;
    std::vector<int> postselect_qubits;

    int cr_count() const;
    int sqrt_x_count() const;
};

/// Angles of the ZXZXZ pattern Rz(x) sqrt(X) Rz(y) sqrt(X) Rz(w).
struct EulerAngles {
    double x;
    double y;
    double w;
};

/// Two-CNOT realization of U_eps:
///   (post0 (x) post1) CNOT (Rx(rx_angle) (x) Ry(ry_angle)) CNOT (pre0 (x) pre1)
/// with both CNOTs controlled by the first (kept) qubit.
struct UEpsDecomposition {
    ComplexMatrix pre0, pre1;
    double rx_angle = 0.0;
    double ry_angle = 0.0;
    ComplexMatrix post0, post1;

    /// Re-assembled 4x4 product, for verification.
    ComplexMatrix assemble() const;
};

/// Splits U_eps into two CNOTs plus six single-qubit blocks via a magic-basis
/// canonical decomposition. The result reproduces U_eps up to global phase.
UEpsDecomposition decompose_u_eps(double epsilon);

/// ZXZXZ angles for a 2x2 unitary (up to phase); the reconstruction
/// Rz(x) sqrt(X) Rz(y) sqrt(X) Rz(w) matches the input up to global phase.
/// Diagonal and antidiagonal inputs take the dedicated y = pi / y = 0 branch.
/// Angles are normalized to (-pi, pi].
EulerAngles su2_to_native(const ComplexMatrix& a);

/// The five-gate product for a given angle triple.
ComplexMatrix euler_to_matrix(const EulerAngles& angles);

/// CNOT built from its cross-resonance realization
///   (Z1 I2)^(-1/2) (Z1 X2)^(1/2) (I1 X2)^(-1/2)
/// with the CR rotation angle beta = pi/4 + lambda_err. lambda_err = 0 gives
/// CNOT up to global phase; the whole two-qubit error sits in beta.
ComplexMatrix cnot_from_cr(double lambda_err);

/// Lowers a protocol circuit to {sqrt(X), Rz, CR-realized CNOT}. Pending
/// single-qubit products (state preparation fused with the leading U_eps
/// blocks) are emitted through su2_to_native right before each two-qubit
/// gate. SWAPs (3 alternating CNOTs) are inserted only when a U_eps pair is
/// not coupled, choosing the placement with the fewest CNOTs and breaking
/// ties by lowest qubit index.
NativeCircuit transpile_circuit(const CircuitIR& ir, const CouplingMap& coupling);

}  // namespace qsmb
