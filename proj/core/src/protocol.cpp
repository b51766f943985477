#include "qsmb/protocol.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qsmb {

namespace {
void check_epsilon(double epsilon) {
    if (!(epsilon > 0.0 && epsilon <= 1.0)) {
        throw std::invalid_argument("epsilon must lie in (0, 1], got " + std::to_string(epsilon));
    }
}
}  // namespace

void ProtocolConfig::validate() const {
    check_epsilon(epsilon);
    if (n_iterations < 1) {
        throw std::invalid_argument("n_iterations must be at least 1");
    }
}

ComplexMatrix build_u_eps(double epsilon) {
    check_epsilon(epsilon);
    const double s = std::sqrt(1.0 - epsilon * epsilon);
    const double r = 1.0 / std::sqrt(2.0);
    ComplexMatrix u(4, 4);
    u(0, 0) = epsilon;
    u(0, 1) = -r * s;
    u(0, 2) = r * s;
    u(1, 1) = r;
    u(1, 2) = r;
    u(2, 3) = 1.0;
    u(3, 0) = s;
    u(3, 1) = r * epsilon;
    u(3, 2) = -r * epsilon;
    return u;
}

ExtendedComplex f_map(const ExtendedComplex& z, double epsilon) {
    check_epsilon(epsilon);
    if (z.is_infinite()) return ExtendedComplex::infinity();
    const Complex w = z.value() * z.value() / epsilon;
    // Overflow saturates to the tagged infinity; both fixed points of the map
    // (0 and infinity) are superattractive, so this is the correct limit.
    if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) {
        return ExtendedComplex::infinity();
    }
    return ExtendedComplex(w);
}

ExtendedComplex iterate_f(const ExtendedComplex& z, double epsilon, int n) {
    if (n < 1) throw std::invalid_argument("iterate_f: n must be at least 1");
    ExtendedComplex w = z;
    for (int i = 0; i < n; ++i) w = f_map(w, epsilon);
    return w;
}

KeptQubitState theoretical_state(const ProtocolConfig& cfg) {
    cfg.validate();
    const double two_n = std::ldexp(1.0, cfg.n_iterations);  // 2^n
    const double c = std::cos(cfg.theta0 / 2.0);
    const double s = std::sin(cfg.theta0 / 2.0);
    const double a0 = std::pow(cfg.epsilon, two_n - 1.0) * std::pow(c, two_n);
    const Complex a1 = std::polar(std::pow(s, two_n), two_n * cfg.phi0);
    const double norm = std::sqrt(a0 * a0 + std::norm(a1));
    // norm^2 equals the success probability, which is positive for epsilon > 0.
    return KeptQubitState{a0 / norm, a1 / norm};
}

double success_probability(double epsilon, double theta0, int n) {
    check_epsilon(epsilon);
    if (n < 1) throw std::invalid_argument("success_probability: n must be at least 1");
    const double e = std::ldexp(1.0, n + 1);  // 2^(n+1)
    const double c = std::cos(theta0 / 2.0);
    const double s = std::sin(theta0 / 2.0);
    return std::pow(epsilon, e - 2.0) * std::pow(c, e) + std::pow(s, e);
}

CircuitIR build_circuit(const ProtocolConfig& cfg) {
    cfg.validate();
    const int n_qubits = cfg.qubit_count();

    CircuitIR ir;
    ir.n_qubits = n_qubits;
    for (int q = 0; q < n_qubits; ++q) {
        ir.ops.push_back({IrGate::PrepY, cfg.theta0, q, -1});
    }
    for (int q = 0; q < n_qubits; ++q) {
        ir.ops.push_back({IrGate::Phase, cfg.phi0, q, -1});
    }
    for (int layer = 1; layer <= cfg.n_iterations; ++layer) {
        const int block = 1 << layer;
        const int offset = block / 2;
        for (int base = 0; base < n_qubits; base += block) {
            const int kept = base;
            const int measured = base + offset;
            ir.ops.push_back({IrGate::UEps, cfg.epsilon, kept, measured});
            ir.postselect_qubits.push_back(measured);
        }
    }
    ir.kept_qubit = 0;
    return ir;
}

}  // namespace qsmb
