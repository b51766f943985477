#include "qsmb/qmath.hpp"

#include "qsmb/gates.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>

namespace qsmb {

namespace {
void check_same_shape(const ComplexMatrix& a, const ComplexMatrix& b, const char* what) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw std::invalid_argument(std::string(what) + ": dimension mismatch (" +
                                    std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                                    " vs " + std::to_string(b.rows()) + "x" +
                                    std::to_string(b.cols()) + ")");
    }
}
}  // namespace

ComplexMatrix::ComplexMatrix(int rows, int cols)
    : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols) {
    if (rows <= 0 || cols <= 0) {
        throw std::invalid_argument("ComplexMatrix: dimensions must be positive");
    }
}

ComplexMatrix::ComplexMatrix(int rows, int cols, std::vector<Complex> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
    if (rows <= 0 || cols <= 0 ||
        data_.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols)) {
        throw std::invalid_argument("ComplexMatrix: entry count does not match dimensions");
    }
}

ComplexMatrix ComplexMatrix::identity(int n) {
    ComplexMatrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

ComplexMatrix ComplexMatrix::dagger() const {
    ComplexMatrix m(cols_, rows_);
    for (int r = 0; r < rows_; ++r)
        for (int c = 0; c < cols_; ++c) m(c, r) = std::conj((*this)(r, c));
    return m;
}

ComplexMatrix ComplexMatrix::transpose() const {
    ComplexMatrix m(cols_, rows_);
    for (int r = 0; r < rows_; ++r)
        for (int c = 0; c < cols_; ++c) m(c, r) = (*this)(r, c);
    return m;
}

ComplexMatrix ComplexMatrix::conjugate() const {
    ComplexMatrix m(rows_, cols_);
    for (int r = 0; r < rows_; ++r)
        for (int c = 0; c < cols_; ++c) m(r, c) = std::conj((*this)(r, c));
    return m;
}

Complex ComplexMatrix::trace() const {
    if (!is_square()) throw std::invalid_argument("trace: matrix must be square");
    Complex t = 0.0;
    for (int i = 0; i < rows_; ++i) t += (*this)(i, i);
    return t;
}

Complex ComplexMatrix::determinant() const {
    if (!is_square()) throw std::invalid_argument("determinant: matrix must be square");
    const int n = rows_;
    std::vector<Complex> a = data_;
    auto at = [&](int r, int c) -> Complex& { return a[static_cast<std::size_t>(r) * n + c]; };
    Complex det = 1.0;
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(at(r, col)) > std::abs(at(pivot, col))) pivot = r;
        if (std::abs(at(pivot, col)) == 0.0) return 0.0;
        if (pivot != col) {
            for (int c = 0; c < n; ++c) std::swap(at(pivot, c), at(col, c));
            det = -det;
        }
        det *= at(col, col);
        for (int r = col + 1; r < n; ++r) {
            const Complex f = at(r, col) / at(col, col);
            for (int c = col; c < n; ++c) at(r, c) -= f * at(col, c);
        }
    }
    return det;
}

double ComplexMatrix::max_abs() const {
    double m = 0.0;
    for (const Complex& z : data_) m = std::max(m, std::abs(z));
    return m;
}

double ComplexMatrix::max_abs_diff(const ComplexMatrix& other) const {
    check_same_shape(*this, other, "max_abs_diff");
    double m = 0.0;
    for (std::size_t i = 0; i < data_.size(); ++i)
        m = std::max(m, std::abs(data_[i] - other.data_[i]));
    return m;
}

bool ComplexMatrix::all_finite() const {
    for (const Complex& z : data_)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    return true;
}

std::vector<Complex> ComplexMatrix::apply(std::span<const Complex> v) const {
    if (static_cast<int>(v.size()) != cols_)
        throw std::invalid_argument("apply: vector length does not match columns");
    std::vector<Complex> out(rows_, Complex{0.0, 0.0});
    for (int r = 0; r < rows_; ++r) {
        Complex acc = 0.0;
        for (int c = 0; c < cols_; ++c) acc += (*this)(r, c) * v[c];
        out[r] = acc;
    }
    return out;
}

ComplexMatrix& ComplexMatrix::operator*=(Complex scalar) {
    for (Complex& z : data_) z *= scalar;
    return *this;
}

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.cols() != b.rows())
        throw std::invalid_argument("operator*: inner dimensions do not match");
    ComplexMatrix out(a.rows(), b.cols());
    for (int r = 0; r < a.rows(); ++r) {
        for (int k = 0; k < a.cols(); ++k) {
            const Complex f = a(r, k);
            if (f == Complex{0.0, 0.0}) continue;
            for (int c = 0; c < b.cols(); ++c) out(r, c) += f * b(k, c);
        }
    }
    return out;
}

ComplexMatrix operator*(Complex scalar, ComplexMatrix m) {
    m *= scalar;
    return m;
}

ComplexMatrix operator+(const ComplexMatrix& a, const ComplexMatrix& b) {
    check_same_shape(a, b, "operator+");
    ComplexMatrix out = a;
    for (int r = 0; r < a.rows(); ++r)
        for (int c = 0; c < a.cols(); ++c) out(r, c) += b(r, c);
    return out;
}

ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b) {
    check_same_shape(a, b, "operator-");
    ComplexMatrix out = a;
    for (int r = 0; r < a.rows(); ++r)
        for (int c = 0; c < a.cols(); ++c) out(r, c) -= b(r, c);
    return out;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (int ra = 0; ra < a.rows(); ++ra)
        for (int ca = 0; ca < a.cols(); ++ca) {
            const Complex f = a(ra, ca);
            for (int rb = 0; rb < b.rows(); ++rb)
                for (int cb = 0; cb < b.cols(); ++cb)
                    out(ra * b.rows() + rb, ca * b.cols() + cb) = f * b(rb, cb);
        }
    return out;
}

bool is_unitary(const ComplexMatrix& u, double tol) {
    if (!u.is_square()) throw std::invalid_argument("is_unitary: matrix must be square");
    const ComplexMatrix product = u.dagger() * u;
    return product.max_abs_diff(ComplexMatrix::identity(u.rows())) <= tol;
}

bool equal_up_to_global_phase(const ComplexMatrix& u, const ComplexMatrix& v, double tol) {
    check_same_shape(u, v, "equal_up_to_global_phase");
    // Fix the phase from the largest-magnitude entry of v.
    int br = 0, bc = 0;
    double best = -1.0;
    for (int r = 0; r < v.rows(); ++r)
        for (int c = 0; c < v.cols(); ++c)
            if (std::abs(v(r, c)) > best) {
                best = std::abs(v(r, c));
                br = r;
                bc = c;
            }
    Complex phase{1.0, 0.0};
    if (best > 0.0 && std::abs(u(br, bc)) > 0.0) {
        phase = (u(br, bc) / v(br, bc));
        phase /= std::abs(phase);
    }
    double m = 0.0;
    for (int r = 0; r < v.rows(); ++r)
        for (int c = 0; c < v.cols(); ++c) m = std::max(m, std::abs(u(r, c) - phase * v(r, c)));
    return m <= tol;
}

BlochAngles::BlochAngles(double theta_in, double phi_in) : theta(theta_in), phi(phi_in) {
    constexpr double pi = std::numbers::pi;
    if (!(theta >= -1e-12 && theta <= pi + 1e-12)) {
        throw std::invalid_argument("BlochAngles: theta must lie in [0, pi]");
    }
    theta = std::clamp(theta, 0.0, pi);
    phi = std::fmod(phi, 2.0 * pi);
    if (phi < 0.0) phi += 2.0 * pi;
}

ExtendedComplex::ExtendedComplex(Complex z) : value_(z) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
        infinite_ = true;
        value_ = Complex{0.0, 0.0};
    }
}

ExtendedComplex ExtendedComplex::infinity() {
    ExtendedComplex z;
    z.infinite_ = true;
    return z;
}

Complex ExtendedComplex::value() const {
    if (infinite_) throw std::domain_error("ExtendedComplex: value() of the point at infinity");
    return value_;
}

bool ExtendedComplex::approx_equal(const ExtendedComplex& other, double tol) const {
    if (infinite_ || other.infinite_) return infinite_ == other.infinite_;
    return std::abs(value_ - other.value_) <= tol;
}

ExtendedComplex bloch_to_z(const BlochAngles& angles) {
    constexpr double pi = std::numbers::pi;
    if (angles.theta == pi) return ExtendedComplex::infinity();
    const Complex direction = std::polar(1.0, angles.phi);
    return ExtendedComplex(direction * std::tan(angles.theta / 2.0));
}

namespace gates {

namespace {
ComplexMatrix make2(Complex a, Complex b, Complex c, Complex d) {
    return ComplexMatrix(2, 2, {a, b, c, d});
}
constexpr Complex kI{0.0, 1.0};
}  // namespace

ComplexMatrix identity2() { return ComplexMatrix::identity(2); }
ComplexMatrix pauli_x() { return make2(0, 1, 1, 0); }
ComplexMatrix pauli_y() { return make2(0, -kI, kI, 0); }
ComplexMatrix pauli_z() { return make2(1, 0, 0, -1); }

ComplexMatrix hadamard() {
    const double s = 1.0 / std::sqrt(2.0);
    return make2(s, s, s, -s);
}

ComplexMatrix rx(double theta) {
    const double c = std::cos(theta / 2.0), s = std::sin(theta / 2.0);
    return make2(c, -kI * s, -kI * s, c);
}

ComplexMatrix ry(double theta) {
    const double c = std::cos(theta / 2.0), s = std::sin(theta / 2.0);
    return make2(c, -s, s, c);
}

ComplexMatrix rz(double theta) {
    return make2(std::polar(1.0, -theta / 2.0), 0, 0, std::polar(1.0, theta / 2.0));
}

ComplexMatrix phase(double lambda) { return make2(1, 0, 0, std::polar(1.0, lambda)); }

ComplexMatrix sqrt_x() {
    return make2(0.5 * Complex{1, 1}, 0.5 * Complex{1, -1}, 0.5 * Complex{1, -1},
                 0.5 * Complex{1, 1});
}

ComplexMatrix sqrt_x_dag() { return sqrt_x().dagger(); }

ComplexMatrix cnot() {
    ComplexMatrix m(4, 4);
    m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1.0;
    return m;
}

ComplexMatrix swap() {
    ComplexMatrix m(4, 4);
    m(0, 0) = m(1, 2) = m(2, 1) = m(3, 3) = 1.0;
    return m;
}

ComplexMatrix cr(double beta) {
    // exp(-i*beta Z(x)X) = cos(beta) I - i sin(beta) Z(x)X
    const double c = std::cos(beta), s = std::sin(beta);
    ComplexMatrix m(4, 4);
    m(0, 0) = m(1, 1) = m(2, 2) = m(3, 3) = c;
    m(0, 1) = m(1, 0) = -kI * s;
    m(2, 3) = m(3, 2) = kI * s;
    return m;
}

ComplexMatrix controlled(const ComplexMatrix& u) {
    if (u.rows() != 2 || u.cols() != 2)
        throw std::invalid_argument("controlled: expected a 2x2 matrix");
    ComplexMatrix m(4, 4);
    m(0, 0) = m(1, 1) = 1.0;
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) m(2 + r, 2 + c) = u(r, c);
    return m;
}

ComplexMatrix cu_ix(double beta) {
    const double c = std::cos(beta / 2.0), s = std::sin(beta / 2.0);
    return controlled(make2(c, kI * s, kI * s, c));
}

ComplexMatrix exchange4() {
    ComplexMatrix m(4, 4);
    for (int i = 0; i < 4; ++i) m(i, 3 - i) = 1.0;
    return m;
}

}  // namespace gates
}  // namespace qsmb
