#pragma once

#include <complex>
#include <span>
#include <vector>

namespace qsmb {

using Complex = std::complex<double>;

/// Default comparison tolerance. Protocol dimensions never exceed 16, so
/// double-precision accumulation error stays far below this.
inline constexpr double kDefaultTol = 1e-10;

/// Dense complex matrix, row-major. Small fixed sizes only (dim <= 64).
class ComplexMatrix {
public:
    ComplexMatrix() = default;
    ComplexMatrix(int rows, int cols);
    ComplexMatrix(int rows, int cols, std::vector<Complex> entries);

    static ComplexMatrix identity(int n);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    bool is_square() const { return rows_ == cols_ && rows_ > 0; }

    Complex& operator()(int r, int c) { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
    const Complex& operator()(int r, int c) const {
        return data_[static_cast<std::size_t>(r) * cols_ + c];
    }

    ComplexMatrix dagger() const;
    ComplexMatrix transpose() const;
    ComplexMatrix conjugate() const;
    Complex trace() const;

    /// Determinant by LU with partial pivoting.
    Complex determinant() const;

    double max_abs() const;
    double max_abs_diff(const ComplexMatrix& other) const;
    bool all_finite() const;

    std::vector<Complex> apply(std::span<const Complex> v) const;

    ComplexMatrix& operator*=(Complex scalar);
    friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
    friend ComplexMatrix operator*(Complex scalar, ComplexMatrix m);
    friend ComplexMatrix operator+(const ComplexMatrix& a, const ComplexMatrix& b);
    friend ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b);

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<Complex> data_;
};

/// Kronecker product; dimensions multiply.
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

/// True iff the max-norm of U^dag U - I is at most tol. Throws on non-square input.
bool is_unitary(const ComplexMatrix& u, double tol = kDefaultTol);

/// True iff u == c*v entrywise within tol for some unit-modulus scalar c.
/// c is fixed from the largest-magnitude entry of v.
bool equal_up_to_global_phase(const ComplexMatrix& u, const ComplexMatrix& v,
                              double tol = kDefaultTol);

/// Bloch-sphere coordinates of a qubit state: theta in [0, pi], phi in [0, 2*pi).
/// phi is wrapped into range on construction; theta outside [0, pi] throws.
struct BlochAngles {
    BlochAngles(double theta, double phi);
    double theta;
    double phi;
};

/// One point of the extended complex plane (C plus the point at infinity).
/// Infinity is a tagged value, never a floating-point overflow artifact.
class ExtendedComplex {
public:
    ExtendedComplex() = default;
    ExtendedComplex(Complex z);  // NOLINT(google-explicit-constructor)
    static ExtendedComplex infinity();

    bool is_infinite() const { return infinite_; }
    Complex value() const;  // throws if infinite

    bool approx_equal(const ExtendedComplex& other, double tol = kDefaultTol) const;

private:
    Complex value_{0.0, 0.0};
    bool infinite_ = false;
};

/// Stereographic amplitude ratio z = e^{i*phi} * tan(theta/2); the south pole
/// (theta = pi) maps to the point at infinity.
ExtendedComplex bloch_to_z(const BlochAngles& angles);

}  // namespace qsmb
