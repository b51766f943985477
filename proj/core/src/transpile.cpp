#include "qsmb/transpile.hpp"

#include "qsmb/gates.hpp"

#include "jacobi.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <numeric>
#include <queue>
#include <random>
#include <stdexcept>
#include <string>

namespace qsmb {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr Complex kImag{0.0, 1.0};

double rem_euclid(double x, double m) {
    double r = std::fmod(x, m);
    if (r < 0.0) r += m;
    return r;
}

double normalize_angle(double a) {
    a = std::remainder(a, 2.0 * kPi);
    if (a <= -kPi) a += 2.0 * kPi;
    return a;
}

// ---------------------------------------------------------------------------
// Magic-basis canonical ("Weyl") decomposition of a two-qubit unitary:
//   u = e^{i phase} (k1l (x) k1r) exp(i(a XX + b YY + c ZZ)) (k2l (x) k2r)
// The eigenbasis of m2 = (B^-1 u B)^T (B^-1 u B) is real orthogonal; mixing
// real and imaginary parts with random coefficients handles degenerate
// spectra, retrying until the reconstruction matches.
// ---------------------------------------------------------------------------

ComplexMatrix magic_basis() {
    ComplexMatrix b(4, 4);
    b(0, 0) = 1.0;
    b(0, 1) = kImag;
    b(1, 2) = kImag;
    b(1, 3) = 1.0;
    b(2, 2) = kImag;
    b(2, 3) = -1.0;
    b(3, 0) = 1.0;
    b(3, 1) = -kImag;
    return b;
}

// B has norm sqrt(2) columns, so B^-1 = B^dag / 2.
ComplexMatrix magic_out_of(const ComplexMatrix& u) {
    static const ComplexMatrix b = magic_basis();
    static const ComplexMatrix b_inv = Complex{0.5, 0.0} * b.dagger();
    return b_inv * u * b;
}

ComplexMatrix magic_into(const ComplexMatrix& u) {
    static const ComplexMatrix b = magic_basis();
    static const ComplexMatrix b_inv = Complex{0.5, 0.0} * b.dagger();
    return b * u * b_inv;
}

ComplexMatrix exp_i_pauli_pair(double angle, const ComplexMatrix& pauli) {
    const ComplexMatrix pp = kron(pauli, pauli);
    ComplexMatrix out = std::cos(angle) * ComplexMatrix::identity(4);
    return out + (kImag * std::sin(angle)) * pp;
}

ComplexMatrix canonical_matrix(double a, double b, double c) {
    return exp_i_pauli_pair(a, gates::pauli_x()) * exp_i_pauli_pair(b, gates::pauli_y()) *
           exp_i_pauli_pair(c, gates::pauli_z());
}

struct SymmetricEig {
    ComplexMatrix p;          // real orthogonal eigenvectors
    std::array<Complex, 4> d; // unit-modulus eigenvalues
};

SymmetricEig diagonalize_complex_symmetric(const ComplexMatrix& m2) {
    std::mt19937 rng{2023};
    std::normal_distribution<double> dist;
    for (int attempt = 0; attempt < 100; ++attempt) {
        double ca = dist(rng);
        double cb = dist(rng);
        if (attempt == 0) {
            ca = 1.2602066112249388;
            cb = 0.22317849046722027;
        }
        std::vector<double> mix(16);
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c)
                mix[r * 4 + c] = ca * m2(r, c).real() + cb * m2(r, c).imag();
        std::vector<double> vecs, vals;
        internal::jacobi_symmetric(4, mix, vecs, vals);

        ComplexMatrix p(4, 4);
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c) p(r, c) = vecs[r * 4 + c];
        const ComplexMatrix diag = p.transpose() * m2 * p;
        SymmetricEig out;
        out.p = p;
        for (int i = 0; i < 4; ++i) out.d[i] = diag(i, i);

        ComplexMatrix rebuilt(4, 4);
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c)
                for (int k = 0; k < 4; ++k) rebuilt(r, c) += p(r, k) * out.d[k] * p(c, k);
        if (rebuilt.max_abs_diff(m2) < 1e-11) return out;
    }
    throw std::runtime_error("weyl: failed to diagonalize the magic-basis Gram matrix");
}

struct ProductSplit {
    ComplexMatrix left;
    ComplexMatrix right;
    double phase;
};

// Splits an exact tensor product l (x) r out of a 4x4 special unitary.
ProductSplit decompose_product_gate(const ComplexMatrix& su) {
    ComplexMatrix r(2, 2);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) r(i, j) = su(i, j);
    Complex det_r = r.determinant();
    if (std::abs(det_r) < 0.1) {
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) r(i, j) = su(2 + i, j);
        det_r = r.determinant();
    }
    if (std::abs(det_r) < 0.1) {
        throw std::runtime_error("weyl: cannot split product gate (both pivot blocks singular)");
    }
    r *= (1.0 / std::sqrt(det_r));

    const ComplexMatrix temp = su * kron(ComplexMatrix::identity(2), r.dagger());
    ComplexMatrix l(2, 2);
    l(0, 0) = temp(0, 0);
    l(0, 1) = temp(0, 2);
    l(1, 0) = temp(2, 0);
    l(1, 1) = temp(2, 2);
    const Complex det_l = l.determinant();
    if (std::abs(det_l) < 0.9) {
        throw std::runtime_error("weyl: cannot split product gate (left factor singular)");
    }
    l *= (1.0 / std::sqrt(det_l));
    return {l, r, std::arg(det_l) / 2.0};
}

struct WeylDecomposition {
    ComplexMatrix k1l, k1r;  // after the canonical gate
    ComplexMatrix k2l, k2r;  // before the canonical gate
    double a, b, c;
    double phase;
};

WeylDecomposition weyl_decompose(const ComplexMatrix& unitary) {
    if (unitary.rows() != 4 || unitary.cols() != 4) {
        throw std::invalid_argument("weyl_decompose: expected a 4x4 matrix");
    }
    const Complex det = unitary.determinant();
    ComplexMatrix u = std::pow(det, -0.25) * unitary;
    double phase = std::arg(det) / 4.0;

    const ComplexMatrix up = magic_out_of(u);
    const ComplexMatrix m2 = up.transpose() * up;
    auto eig = diagonalize_complex_symmetric(m2);

    std::array<double, 4> d_real{};
    for (int i = 0; i < 3; ++i) d_real[i] = -std::arg(eig.d[i]) / 2.0;
    d_real[3] = -d_real[0] - d_real[1] - d_real[2];

    std::array<double, 3> cs{};
    for (int i = 0; i < 3; ++i) cs[i] = rem_euclid((d_real[i] + d_real[3]) / 2.0, 2.0 * kPi);

    // Order the coordinates by distance from the nearest multiple of pi/2,
    // then rotate; this matches the canonical chamber entry used below.
    std::array<double, 3> folded{};
    for (int i = 0; i < 3; ++i) {
        const double t = rem_euclid(cs[i], kPi / 2.0);
        folded[i] = std::min(t, kPi / 2.0 - t);
    }
    std::array<int, 3> order{0, 1, 2};
    std::stable_sort(order.begin(), order.end(),
                     [&](int x, int y) { return folded[x] < folded[y]; });
    order = {order[1], order[2], order[0]};

    const std::array<double, 3> cs_old = cs;
    const std::array<double, 4> d_old = d_real;
    ComplexMatrix p = eig.p;
    for (int i = 0; i < 3; ++i) {
        cs[i] = cs_old[order[i]];
        d_real[i] = d_old[order[i]];
        for (int r = 0; r < 4; ++r) p(r, i) = eig.p(r, order[i]);
    }
    if (p.determinant().real() < 0.0) {
        for (int r = 0; r < 4; ++r) p(r, 3) = -p(r, 3);
    }

    ComplexMatrix temp(4, 4);
    for (int i = 0; i < 4; ++i) temp(i, i) = std::polar(1.0, d_real[i]);

    const ComplexMatrix k1_magic = up * p * temp;
    const ComplexMatrix k2_magic = p.transpose();
    const ComplexMatrix k1 = magic_into(k1_magic);
    const ComplexMatrix k2 = magic_into(k2_magic);

    auto s1 = decompose_product_gate(k1);
    auto s2 = decompose_product_gate(k2);
    phase += s1.phase + s2.phase;

    ComplexMatrix k1l = s1.left, k1r = s1.right;
    ComplexMatrix k2l = s2.left, k2r = s2.right;

    // Fold the coordinates into the Weyl chamber, tracking the local
    // corrections and the global phase through each reflection.
    const ComplexMatrix ipx = kImag * gates::pauli_x();
    const ComplexMatrix ipy = kImag * gates::pauli_y();
    const ComplexMatrix ipz = kImag * gates::pauli_z();

    if (cs[0] > kPi / 2.0) {
        cs[0] -= 3.0 * kPi / 2.0;
        k1l = k1l * ipy;
        k1r = k1r * ipy;
        phase += kPi / 2.0;
    }
    if (cs[1] > kPi / 2.0) {
        cs[1] -= 3.0 * kPi / 2.0;
        k1l = k1l * ipx;
        k1r = k1r * ipx;
        phase += kPi / 2.0;
    }
    int conjs = 0;
    if (cs[0] > kPi / 4.0) {
        cs[0] = kPi / 2.0 - cs[0];
        k1l = k1l * ipy;
        k2r = ipy * k2r;
        conjs += 1;
        phase -= kPi / 2.0;
    }
    if (cs[1] > kPi / 4.0) {
        cs[1] = kPi / 2.0 - cs[1];
        k1l = k1l * ipx;
        k2r = ipx * k2r;
        conjs += 1;
        phase += kPi / 2.0;
        if (conjs == 1) phase -= kPi;
    }
    if (cs[2] > kPi / 2.0) {
        cs[2] -= 3.0 * kPi / 2.0;
        k1l = k1l * ipz;
        k1r = k1r * ipz;
        phase += kPi / 2.0;
        if (conjs == 1) phase -= kPi;
    }
    if (conjs == 1) {
        cs[2] = kPi / 2.0 - cs[2];
        k1l = k1l * ipz;
        k2r = ipz * k2r;
        phase += kPi / 2.0;
    }
    if (cs[2] > kPi / 4.0) {
        cs[2] -= kPi / 2.0;
        k1l = k1l * ipz;
        k1r = k1r * ipz;
        phase -= kPi / 2.0;
    }

    WeylDecomposition out;
    out.k1l = k1l;
    out.k1r = k1r;
    out.k2l = k2l;
    out.k2r = k2r;
    out.a = cs[1];
    out.b = cs[0];
    out.c = cs[2];
    out.phase = phase;

    const ComplexMatrix rebuilt =
        std::polar(1.0, phase) *
        (kron(k1l, k1r) * canonical_matrix(out.a, out.b, out.c) * kron(k2l, k2r));
    if (rebuilt.max_abs_diff(unitary) > 1e-9) {
        throw std::runtime_error("weyl: reconstruction check failed");
    }
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// CouplingMap
// ---------------------------------------------------------------------------

CouplingMap CouplingMap::full(int n_qubits) {
    CouplingMap m;
    m.n_qubits_ = n_qubits;
    m.full_ = true;
    for (int a = 0; a < n_qubits; ++a)
        for (int b = a + 1; b < n_qubits; ++b) m.edges_.insert({a, b});
    return m;
}

CouplingMap CouplingMap::linear(int n_qubits) {
    CouplingMap m;
    m.n_qubits_ = n_qubits;
    for (int a = 0; a + 1 < n_qubits; ++a) m.edges_.insert({a, a + 1});
    return m;
}

CouplingMap CouplingMap::from_edges(int n_qubits, const std::vector<std::pair<int, int>>& edges) {
    CouplingMap m;
    m.n_qubits_ = n_qubits;
    for (auto [a, b] : edges) {
        if (a == b || a < 0 || b < 0 || a >= n_qubits || b >= n_qubits) {
            throw std::invalid_argument("CouplingMap: invalid edge " + std::to_string(a) + "-" +
                                        std::to_string(b));
        }
        m.edges_.insert({std::min(a, b), std::max(a, b)});
    }
    return m;
}

bool CouplingMap::coupled(int a, int b) const {
    if (a == b) return false;
    if (full_) return a >= 0 && b >= 0 && a < n_qubits_ && b < n_qubits_;
    return edges_.count({std::min(a, b), std::max(a, b)}) > 0;
}

std::vector<int> CouplingMap::shortest_path(int a, int b) const {
    if (a == b) return {a};
    std::vector<int> prev(n_qubits_, -1);
    std::queue<int> frontier;
    frontier.push(a);
    prev[a] = a;
    while (!frontier.empty()) {
        const int q = frontier.front();
        frontier.pop();
        for (int next = 0; next < n_qubits_; ++next) {
            if (prev[next] != -1 || !coupled(q, next)) continue;
            prev[next] = q;
            if (next == b) {
                std::vector<int> path{b};
                int at = b;
                while (at != a) {
                    at = prev[at];
                    path.push_back(at);
                }
                std::reverse(path.begin(), path.end());
                return path;
            }
            frontier.push(next);
        }
    }
    return {};
}

int NativeCircuit::cr_count() const {
    return static_cast<int>(
        std::count_if(gates.begin(), gates.end(),
                      [](const NativeGate& g) { return g.kind == NativeKind::Cr; }));
}

int NativeCircuit::sqrt_x_count() const {
    return static_cast<int>(
        std::count_if(gates.begin(), gates.end(),
                      [](const NativeGate& g) { return g.kind == NativeKind::SqrtX; }));
}

// ---------------------------------------------------------------------------
// U_eps decomposition
// ---------------------------------------------------------------------------

ComplexMatrix UEpsDecomposition::assemble() const {
    const ComplexMatrix cnot = gates::cnot();
    return kron(post0, post1) * cnot * kron(gates::rx(rx_angle), gates::ry(ry_angle)) * cnot *
           kron(pre0, pre1);
}

UEpsDecomposition decompose_u_eps(double epsilon) {
    const ComplexMatrix u = build_u_eps(epsilon);
    const WeylDecomposition w = weyl_decompose(u);
    if (std::abs(w.c) > 1e-9) {
        throw std::runtime_error("decompose_u_eps: canonical ZZ coordinate is not zero");
    }

    // can(a, b, 0) = (Rx(-pi/2) (x) I) . CNOT (Rx(-2a) (x) Ry(-2b)) CNOT . (Rx(pi/2) (x) I)
    UEpsDecomposition dec;
    dec.rx_angle = -2.0 * w.a;
    dec.ry_angle = -2.0 * w.b;
    dec.pre0 = gates::rx(kPi / 2.0) * w.k2l;
    dec.pre1 = w.k2r;
    dec.post0 = std::polar(1.0, w.phase) * (w.k1l * gates::rx(-kPi / 2.0));
    dec.post1 = w.k1r;

    if (!equal_up_to_global_phase(dec.assemble(), u, 1e-10)) {
        throw std::runtime_error("decompose_u_eps: reassembled product does not match U_eps");
    }
    return dec;
}

// ---------------------------------------------------------------------------
// Single-qubit lowering
// ---------------------------------------------------------------------------

EulerAngles su2_to_native(const ComplexMatrix& a) {
    if (a.rows() != 2 || a.cols() != 2) {
        throw std::invalid_argument("su2_to_native: expected a 2x2 matrix");
    }
    if (!is_unitary(a, 1e-10)) {
        throw std::invalid_argument("su2_to_native: input is not unitary");
    }

    // Scale to determinant -1, the natural range of the ZXZXZ product:
    //   [[e^{-i(x+w)/2} sin(y/2),  e^{-i(x-w)/2} cos(y/2)],
    //    [e^{ i(x-w)/2} cos(y/2), -e^{ i(x+w)/2} sin(y/2)]]
    const Complex det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    const ComplexMatrix m = (kImag / std::sqrt(det)) * a;

    const double s = std::abs(m(0, 0));
    const double c = std::abs(m(1, 0));
    constexpr double kDegenerate = 1e-12;

    double y = 2.0 * std::atan2(s, c);
    double sum;   // x + w
    double diff;  // x - w
    if (c <= kDegenerate) {
        // diagonal input: the sqrt(X) pair cancels against Rz(pi)
        y = kPi;
        sum = -2.0 * std::arg(m(0, 0));
        diff = sum;
    } else if (s <= kDegenerate) {
        // antidiagonal input
        y = 0.0;
        diff = 2.0 * std::arg(m(1, 0));
        sum = diff;
    } else {
        sum = -2.0 * std::arg(m(0, 0));
        diff = 2.0 * std::arg(m(1, 0));
    }
    return EulerAngles{normalize_angle(0.5 * (sum + diff)), y,
                       normalize_angle(0.5 * (sum - diff))};
}

ComplexMatrix euler_to_matrix(const EulerAngles& angles) {
    return gates::rz(angles.x) * gates::sqrt_x() * gates::rz(angles.y) * gates::sqrt_x() *
           gates::rz(angles.w);
}

ComplexMatrix cnot_from_cr(double lambda_err) {
    const double beta = kPi / 4.0 + lambda_err;
    // exp(-i beta Z(x)X) through the exchange-matrix product J Cu(-2b) J Cu(2b).
    const ComplexMatrix j = gates::exchange4();
    const ComplexMatrix u_cr = j * gates::cu_ix(-2.0 * beta) * j * gates::cu_ix(2.0 * beta);
    return kron(gates::phase(-kPi / 2.0), gates::identity2()) * u_cr *
           kron(gates::identity2(), gates::sqrt_x_dag());
}

// ---------------------------------------------------------------------------
// Circuit lowering
// ---------------------------------------------------------------------------

namespace {

class Lowering {
public:
    Lowering(const CircuitIR& ir, const CouplingMap& coupling) : ir_(ir) {
        if (coupling.n_qubits() != ir.n_qubits) {
            throw std::invalid_argument("transpile_circuit: coupling map size does not match circuit");
        }
        out_.n_qubits = ir.n_qubits;
        out_.coupling = coupling;
        perm_.resize(ir.n_qubits);
        std::iota(perm_.begin(), perm_.end(), 0);
        pending_.assign(ir.n_qubits, ComplexMatrix::identity(2));
        dirty_.assign(ir.n_qubits, false);
    }

    NativeCircuit run() {
        for (const IrOp& op : ir_.ops) {
            switch (op.gate) {
                case IrGate::PrepY:
                    push(perm_[op.q0], gates::ry(op.param));
                    break;
                case IrGate::Phase:
                    push(perm_[op.q0], gates::phase(op.param));
                    break;
                case IrGate::UEps:
                    apply_u_eps(op);
                    break;
            }
        }
        for (int w = 0; w < out_.n_qubits; ++w) flush(w);
        out_.kept_qubit = perm_[ir_.kept_qubit];
        for (int q : ir_.postselect_qubits) out_.postselect_qubits.push_back(perm_[q]);
        return std::move(out_);
    }

private:
    void push(int wire, const ComplexMatrix& g) {
        pending_[wire] = g * pending_[wire];
        dirty_[wire] = true;
    }

    void flush(int wire) {
        if (!dirty_[wire]) return;
        const ComplexMatrix& g = pending_[wire];
        const double off = std::max(std::abs(g(0, 1)), std::abs(g(1, 0)));
        if (off < 1e-14) {
            // Rz is enough for a diagonal leftover; drop pure global phases.
            const double angle = normalize_angle(std::arg(g(1, 1) / g(0, 0)));
            if (std::abs(angle) > 1e-14) {
                out_.gates.push_back(NativeGate::rz(angle, wire));
            }
        } else {
            const EulerAngles e = su2_to_native(g);
            out_.gates.push_back(NativeGate::rz(e.w, wire));
            out_.gates.push_back(NativeGate::sqrt_x(wire));
            out_.gates.push_back(NativeGate::rz(e.y, wire));
            out_.gates.push_back(NativeGate::sqrt_x(wire));
            out_.gates.push_back(NativeGate::rz(e.x, wire));
        }
        pending_[wire] = ComplexMatrix::identity(2);
        dirty_[wire] = false;
    }

    void emit_cnot(int control, int target) {
        flush(control);
        flush(target);
        // sxdg = Rz(pi) sqrt(X) Rz(pi) up to phase; p1(-pi/2) = Rz(-pi/2) up to phase.
        out_.gates.push_back(NativeGate::rz(kPi, target));
        out_.gates.push_back(NativeGate::sqrt_x(target));
        out_.gates.push_back(NativeGate::rz(kPi, target));
        out_.gates.push_back(NativeGate::cr(kPi / 4.0, control, target));
        out_.gates.push_back(NativeGate::rz(-kPi / 2.0, control));
    }

    void emit_swap(int a, int b) {
        flush(a);
        flush(b);
        out_.gates.push_back(NativeGate::swap_marker(a, b));
        emit_cnot(a, b);
        emit_cnot(b, a);
        emit_cnot(a, b);
        out_.swap_count += 1;
        const auto ia = std::find(perm_.begin(), perm_.end(), a);
        const auto ib = std::find(perm_.begin(), perm_.end(), b);
        std::iter_swap(ia, ib);
    }

    void route(int la, int lb) {
        while (!out_.coupling.coupled(perm_[la], perm_[lb])) {
            const std::vector<int> path = out_.coupling.shortest_path(perm_[la], perm_[lb]);
            if (path.size() < 2) {
                throw std::runtime_error("transpile_circuit: qubits " + std::to_string(perm_[la]) +
                                         " and " + std::to_string(perm_[lb]) +
                                         " are disconnected in the coupling map");
            }
            const auto front = std::minmax(path[0], path[1]);
            const auto back = std::minmax(path[path.size() - 2], path.back());
            if (front <= back) {
                emit_swap(path[0], path[1]);
            } else {
                emit_swap(path[path.size() - 2], path.back());
            }
        }
    }

    void apply_u_eps(const IrOp& op) {
        route(op.q0, op.q1);
        const int pa = perm_[op.q0];
        const int pb = perm_[op.q1];
        const UEpsDecomposition dec = decompose_u_eps(op.param);
        push(pa, dec.pre0);
        push(pb, dec.pre1);
        emit_cnot(pa, pb);
        push(pa, gates::rx(dec.rx_angle));
        push(pb, gates::ry(dec.ry_angle));
        emit_cnot(pa, pb);
        push(pa, dec.post0);
        push(pb, dec.post1);
    }

    const CircuitIR& ir_;
    NativeCircuit out_;
    std::vector<int> perm_;  // logical -> physical wire
    std::vector<ComplexMatrix> pending_;
    std::vector<bool> dirty_;
};

}  // namespace

NativeCircuit transpile_circuit(const CircuitIR& ir, const CouplingMap& coupling) {
    return Lowering(ir, coupling).run();
}

}  // namespace qsmb
