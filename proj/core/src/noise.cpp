#include "qsmb/noise.hpp"

#include "qsmb/gates.hpp"

#include "jacobi.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace qsmb {

namespace {
void check_probability(double p, const char* what) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw std::invalid_argument(std::string(what) + " must lie in [0, 1], got " +
                                    std::to_string(p));
    }
}

void check_angle(double a, const char* what) {
    if (!(std::abs(a) < std::numbers::pi / 2.0)) {
        throw std::invalid_argument(std::string(what) + " magnitude must stay below pi/2");
    }
}
}  // namespace

void NoiseSpec::validate() const {
    for (double p : per_step_dep) check_probability(p, "per_step_dep entry");
    check_probability(gamma, "gamma");
    for (const auto& [q, a] : alphas) {
        if (q < 0) throw std::invalid_argument("alpha qubit index must be nonnegative");
        check_angle(a, "alpha");
    }
    for (const auto& [pair, l] : lambdas) {
        if (pair.first < 0 || pair.second < 0 || pair.first == pair.second) {
            throw std::invalid_argument("lambda pair indices must be distinct and nonnegative");
        }
        check_angle(l, "lambda");
    }
    if (readout) {
        check_probability(readout->p01, "readout p01");
        check_probability(readout->p10, "readout p10");
    }
}

double NoiseSpec::alpha(int qubit) const {
    const auto it = alphas.find(qubit);
    return it == alphas.end() ? 0.0 : it->second;
}

double NoiseSpec::lambda(int control, int target) const {
    const auto it = lambdas.find({control, target});
    return it == lambdas.end() ? 0.0 : it->second;
}

bool NoiseSpec::has_coherent() const {
    for (const auto& [q, a] : alphas)
        if (a != 0.0) return true;
    for (const auto& [pair, l] : lambdas)
        if (l != 0.0) return true;
    return false;
}

bool NoiseSpec::trivial() const {
    if (has_coherent() || gamma != 0.0) return false;
    for (double p : per_step_dep)
        if (p != 0.0) return false;
    if (readout && (readout->p01 != 0.0 || readout->p10 != 0.0)) return false;
    return true;
}

// ---------------------------------------------------------------------------
// DensityMatrix
// ---------------------------------------------------------------------------

DensityMatrix::DensityMatrix(int n_qubits) : n_qubits_(n_qubits), rho_(1 << n_qubits, 1 << n_qubits) {
    if (n_qubits < 1 || n_qubits > 6) {
        throw std::invalid_argument("DensityMatrix: qubit count out of range");
    }
    rho_(0, 0) = 1.0;
}

DensityMatrix::DensityMatrix(int n_qubits, ComplexMatrix rho)
    : n_qubits_(n_qubits), rho_(std::move(rho)) {}

DensityMatrix DensityMatrix::pure(std::span<const Complex> amplitudes) {
    const int dim = static_cast<int>(amplitudes.size());
    int n = 0;
    while ((1 << n) < dim) ++n;
    if ((1 << n) != dim || dim < 2) {
        throw std::invalid_argument("DensityMatrix::pure: length must be a power of two");
    }
    ComplexMatrix rho(dim, dim);
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c) rho(r, c) = amplitudes[r] * std::conj(amplitudes[c]);
    return DensityMatrix(n, std::move(rho));
}

DensityMatrix DensityMatrix::maximally_mixed(int n_qubits) {
    DensityMatrix rho(n_qubits);
    const int dim = rho.dim();
    rho.rho_ = Complex{1.0 / dim, 0.0} * ComplexMatrix::identity(dim);
    return rho;
}

DensityMatrix DensityMatrix::from_matrix(ComplexMatrix rho) {
    if (!rho.is_square()) throw std::invalid_argument("DensityMatrix: matrix must be square");
    const int dim = rho.rows();
    int n = 0;
    while ((1 << n) < dim) ++n;
    if ((1 << n) != dim || dim < 2) {
        throw std::invalid_argument("DensityMatrix: dimension must be a power of two");
    }
    DensityMatrix out(n, std::move(rho));
    if (std::abs(out.trace_real() - 1.0) > 1e-8 || out.hermiticity_error() > 1e-8) {
        throw std::invalid_argument("DensityMatrix: matrix is not a unit-trace Hermitian state");
    }
    return out;
}

double DensityMatrix::trace_real() const { return rho_.trace().real(); }

double DensityMatrix::purity() const { return (rho_ * rho_).trace().real(); }

double DensityMatrix::hermiticity_error() const { return rho_.max_abs_diff(rho_.dagger()); }

double DensityMatrix::min_eigenvalue() const {
    // Hermitian H maps to the real symmetric [[Re, -Im], [Im, Re]] with the
    // same spectrum (doubled), so the real Jacobi solver applies.
    const int d = dim();
    std::vector<double> a(static_cast<std::size_t>(2 * d) * (2 * d), 0.0);
    auto at = [&](int r, int c) -> double& { return a[static_cast<std::size_t>(r) * 2 * d + c]; };
    for (int r = 0; r < d; ++r) {
        for (int c = 0; c < d; ++c) {
            const Complex z = 0.5 * (rho_(r, c) + std::conj(rho_(c, r)));  // symmetrize
            at(r, c) = z.real();
            at(r + d, c + d) = z.real();
            at(r, c + d) = -z.imag();
            at(r + d, c) = z.imag();
        }
    }
    std::vector<double> vecs, vals;
    internal::jacobi_symmetric(2 * d, a, vecs, vals);
    double min = vals[0];
    for (double v : vals) min = std::min(min, v);
    return min;
}

double DensityMatrix::basis_probability(int index) const {
    if (index < 0 || index >= dim()) throw std::out_of_range("basis_probability: bad index");
    return rho_(index, index).real();
}

void DensityMatrix::apply_unitary(const ComplexMatrix& gate, std::span<const int> qubits) {
    const ComplexMatrix full = embed_gate(gate, qubits, n_qubits_);
    rho_ = full * rho_ * full.dagger();
}

void DensityMatrix::apply_kraus(std::span<const ComplexMatrix> operators,
                                std::span<const int> qubits) {
    ComplexMatrix next(dim(), dim());
    for (const ComplexMatrix& k : operators) {
        const ComplexMatrix full = embed_gate(k, qubits, n_qubits_);
        next = next + full * rho_ * full.dagger();
    }
    rho_ = std::move(next);
}

ComplexMatrix embed_gate(const ComplexMatrix& gate, std::span<const int> qubits, int n_qubits) {
    const int k = static_cast<int>(qubits.size());
    if (gate.rows() != (1 << k) || gate.cols() != (1 << k)) {
        throw std::invalid_argument("embed_gate: gate dimension does not match qubit count");
    }
    for (int q : qubits) {
        if (q < 0 || q >= n_qubits) throw std::invalid_argument("embed_gate: qubit out of range");
    }
    const int dim = 1 << n_qubits;
    ComplexMatrix full(dim, dim);
    // Qubit 0 is the most significant bit of the register index.
    auto sub_index = [&](int state) {
        int s = 0;
        for (int i = 0; i < k; ++i) {
            const int bit = (state >> (n_qubits - 1 - qubits[i])) & 1;
            s = (s << 1) | bit;
        }
        return s;
    };
    int outside_mask = dim - 1;
    for (int q : qubits) outside_mask &= ~(1 << (n_qubits - 1 - q));
    for (int r = 0; r < dim; ++r) {
        for (int c = 0; c < dim; ++c) {
            if ((r & outside_mask) != (c & outside_mask)) continue;
            full(r, c) = gate(sub_index(r), sub_index(c));
        }
    }
    return full;
}

// ---------------------------------------------------------------------------
// Channels
// ---------------------------------------------------------------------------

DensityMatrix depolarize(const DensityMatrix& rho, double p) {
    check_probability(p, "depolarizing probability");
    const int dim = rho.dim();
    ComplexMatrix mixed =
        Complex{1.0 - p, 0.0} * rho.matrix() + Complex{p / dim, 0.0} * ComplexMatrix::identity(dim);
    return DensityMatrix::from_matrix(std::move(mixed));
}

double compose_depolarizing(std::span<const double> ps) {
    double survive = 1.0;
    for (double p : ps) {
        check_probability(p, "depolarizing probability");
        survive *= 1.0 - p;
    }
    return 1.0 - survive;
}

double analytic_ps_dep(double ps_ideal, double p_dep, int dim) {
    check_probability(p_dep, "p_dep");
    if (dim < 2) throw std::invalid_argument("analytic_ps_dep: dim must be at least 2");
    return (1.0 - p_dep) * ps_ideal + 2.0 * p_dep / dim;
}

namespace {
std::pair<ComplexMatrix, ComplexMatrix> damping_kraus(double gamma) {
    ComplexMatrix e0(2, 2), e1(2, 2);
    e0(0, 0) = 1.0;
    e0(1, 1) = std::sqrt(1.0 - gamma);
    e1(0, 1) = std::sqrt(gamma);
    return {e0, e1};
}
}  // namespace

DensityMatrix amplitude_damp(const DensityMatrix& rho_qubit, double gamma) {
    if (rho_qubit.dim() != 2) {
        throw std::invalid_argument("amplitude_damp: expected a single-qubit state");
    }
    return amplitude_damp_qubit(rho_qubit, 0, gamma);
}

DensityMatrix amplitude_damp_qubit(const DensityMatrix& rho, int qubit, double gamma) {
    check_probability(gamma, "gamma");
    auto [e0, e1] = damping_kraus(gamma);
    DensityMatrix out = rho;
    const ComplexMatrix ops[] = {e0, e1};
    const int qubits[] = {qubit};
    out.apply_kraus(ops, qubits);
    return out;
}

double gamma_from_t1(double t, double t1) {
    if (t < 0.0) throw std::invalid_argument("gamma_from_t1: t must be nonnegative");
    if (!(t1 > 0.0)) throw std::invalid_argument("gamma_from_t1: T1 must be positive");
    return 1.0 - std::exp(-t / t1);
}

double analytic_ps_ad(Complex z, double epsilon, double gamma) {
    check_probability(gamma, "gamma");
    if (!(epsilon > 0.0 && epsilon <= 1.0)) {
        throw std::invalid_argument("analytic_ps_ad: epsilon must lie in (0, 1]");
    }
    const double z2 = std::norm(z);
    const double denom = (1.0 + z2) * (1.0 + z2);
    return (epsilon * epsilon + z2 * z2 + 2.0 * gamma * z2 + gamma * (1.0 - epsilon * epsilon)) /
           denom;
}

ComplexMatrix sqrt_x_with_error(double alpha) { return gates::rx(std::numbers::pi / 2.0 + alpha); }

double readout_flip(double p_success_true, double p01, double p10, int pattern_size) {
    check_probability(p_success_true, "p_success_true");
    check_probability(p01, "p01");
    check_probability(p10, "p10");
    if (pattern_size < 1) throw std::invalid_argument("readout_flip: pattern_size must be >= 1");
    const double keep = std::pow(1.0 - p01, pattern_size);
    const double leak = p10 * std::pow(1.0 - p01, pattern_size - 1);
    return p_success_true * keep + (1.0 - p_success_true) * leak;
}

}  // namespace qsmb
