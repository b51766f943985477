#pragma once

#include "qsmb/qmath.hpp"

#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace qsmb {

/// Symmetric per-qubit readout confusion: p01 = P(read 1 | true 0), p10 = P(read 0 | true 1).
struct ReadoutError {
    double p01 = 0.0;
    double p10 = 0.0;
};

/// Full error model of one device run: per-iteration depolarizing
/// probabilities, amplitude-damping decay, per-qubit sqrt(X) misrotations,
/// per-ordered-pair CR misrotations and optional readout flips.
struct NoiseSpec {
    std::vector<double> per_step_dep;
    double gamma = 0.0;
    std::map<int, double> alphas;
    std::map<std::pair<int, int>, double> lambdas;  // keyed (control, target)
    std::optional<ReadoutError> readout;
    /// Off by default: damping acts only on the post-selected qubits.
    bool damp_all_qubits = false;

    void validate() const;
    double alpha(int qubit) const;
    double lambda(int control, int target) const;
    bool has_coherent() const;
    bool trivial() const;
};

/// Hermitian, unit-trace state of a small qubit register.
class DensityMatrix {
public:
    explicit DensityMatrix(int n_qubits);  // |0...0><0...0|
    static DensityMatrix pure(std::span<const Complex> amplitudes);
    static DensityMatrix maximally_mixed(int n_qubits);
    static DensityMatrix from_matrix(ComplexMatrix rho);

    int n_qubits() const { return n_qubits_; }
    int dim() const { return rho_.rows(); }
    const ComplexMatrix& matrix() const { return rho_; }

    double trace_real() const;
    double purity() const;  // Tr(rho^2)
    double hermiticity_error() const;
    double min_eigenvalue() const;
    double basis_probability(int index) const;

    void apply_unitary(const ComplexMatrix& gate, std::span<const int> qubits);
    void apply_kraus(std::span<const ComplexMatrix> operators, std::span<const int> qubits);

private:
    DensityMatrix(int n_qubits, ComplexMatrix rho);
    int n_qubits_;
    ComplexMatrix rho_;
};

/// Embeds a 2^k x 2^k gate on the listed qubits into the full register; the
/// first listed qubit is the most significant bit of the gate basis.
ComplexMatrix embed_gate(const ComplexMatrix& gate, std::span<const int> qubits, int n_qubits);

/// (1-p) rho + (p/D) I.
DensityMatrix depolarize(const DensityMatrix& rho, double p);

/// Effective parameter of sequential depolarizing channels:
/// sum_j p_j prod_{l>j} (1-p_l), algebraically 1 - prod_j (1-p_j).
double compose_depolarizing(std::span<const double> ps);

/// Success probability under an effective depolarizing channel:
/// (1-p_dep) ps_ideal + 2 p_dep / dim.
double analytic_ps_dep(double ps_ideal, double p_dep, int dim);

/// Zero-temperature amplitude damping on one qubit (Kraus pair E0, E1).
DensityMatrix amplitude_damp(const DensityMatrix& rho_qubit, double gamma);

/// Same channel applied to one qubit of a larger register.
DensityMatrix amplitude_damp_qubit(const DensityMatrix& rho, int qubit, double gamma);

/// gamma = 1 - e^(-t/T1).
double gamma_from_t1(double t, double t1);

/// One-iteration success probability with damping gamma on the measured
/// qubit, for input ratio z: (eps^2 + |z|^4 + 2 gamma |z|^2 + gamma(1-eps^2)) / (1+|z|^2)^2.
double analytic_ps_ad(Complex z, double epsilon, double gamma);

/// Misrotated physical sqrt(X): R_x(pi/2 + alpha).
ComplexMatrix sqrt_x_with_error(double alpha);

/// Success probability after independent per-qubit confusion on the
/// post-selected all-zeros pattern. Exact for a single post-selected qubit;
/// larger patterns approximate the failure manifold by single-excitation
/// states. The kept qubit never changes the success count (both outcomes pass).
double readout_flip(double p_success_true, double p01, double p10, int pattern_size);

}  // namespace qsmb
