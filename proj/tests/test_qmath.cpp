#include "qsmb/gates.hpp"
#include "qsmb/qmath.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace qsmb;
using doctest::Approx;

namespace {
constexpr double kPi = std::numbers::pi;

ComplexMatrix diag2(Complex a, Complex b) { return ComplexMatrix(2, 2, {a, 0, 0, b}); }
}  // namespace

TEST_CASE("kron identity and diagonal cases") {
    const ComplexMatrix i2 = ComplexMatrix::identity(2);
    CHECK(kron(i2, i2).max_abs_diff(ComplexMatrix::identity(4)) == 0.0);

    const ComplexMatrix d = kron(diag2(1.0, 2.0), i2);
    ComplexMatrix expected(4, 4);
    expected(0, 0) = 1.0;
    expected(1, 1) = 1.0;
    expected(2, 2) = 2.0;
    expected(3, 3) = 2.0;
    CHECK(d.max_abs_diff(expected) == 0.0);
}

TEST_CASE("kron mixed-product identity on random 2x2 inputs") {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        const ComplexMatrix a = oracle::random_unitary(2, rng);
        const ComplexMatrix b = oracle::random_unitary(2, rng);
        const ComplexMatrix c = oracle::random_unitary(2, rng);
        const ComplexMatrix d = oracle::random_unitary(2, rng);
        const ComplexMatrix lhs = kron(a, b) * kron(c, d);
        const ComplexMatrix rhs = kron(a * c, b * d);
        CHECK(lhs.max_abs_diff(rhs) < 1e-13);
    }

    const ComplexMatrix x = gates::pauli_x();
    const ComplexMatrix z = gates::pauli_z();
    const ComplexMatrix xz = kron(x, z);
    CHECK(xz(0, 2) == Complex{1.0, 0.0});
    CHECK(xz(1, 3) == Complex{-1.0, 0.0});
    CHECK(xz(2, 0) == Complex{1.0, 0.0});
    CHECK(xz(0, 0) == Complex{0.0, 0.0});
}

TEST_CASE("kron associativity within 1e-13") {
    std::mt19937 rng(11);
    const ComplexMatrix a = oracle::random_unitary(2, rng);
    const ComplexMatrix b = oracle::random_unitary(2, rng);
    const ComplexMatrix c = oracle::random_unitary(2, rng);
    CHECK(kron(kron(a, b), c).max_abs_diff(kron(a, kron(b, c))) < 1e-13);
}

TEST_CASE("is_unitary") {
    CHECK(is_unitary(ComplexMatrix::identity(4), 1e-12));
    CHECK_FALSE(is_unitary(2.0 * ComplexMatrix::identity(2), 1e-12));

    // U_eps for eps = 0.5 written out from its matrix elements.
    const double eps = 0.5;
    const double s = std::sqrt(1.0 - eps * eps);
    const double r = 1.0 / std::sqrt(2.0);
    const ComplexMatrix u(4, 4,
                          {eps, -r * s, r * s, 0,  //
                           0, r, r, 0,             //
                           0, 0, 0, 1,             //
                           s, r * eps, -r * eps, 0});
    CHECK(is_unitary(u, 1e-12));

    CHECK_THROWS_AS(is_unitary(ComplexMatrix(2, 3), 1e-12), std::invalid_argument);
}

TEST_CASE("is_unitary is phase invariant") {
    std::mt19937 rng(3);
    const ComplexMatrix u = oracle::random_unitary(4, rng);
    CHECK(is_unitary(u, 1e-12));
    CHECK(is_unitary(std::polar(1.0, 1.234) * u, 1e-12));
}

TEST_CASE("equal_up_to_global_phase") {
    std::mt19937 rng(5);
    const ComplexMatrix u = oracle::random_unitary(4, rng);
    CHECK(equal_up_to_global_phase(std::polar(1.0, kPi / 7.0) * u, u, 1e-12));

    const ComplexMatrix perturbed = u + Complex{0.1, 0.0} * ComplexMatrix::identity(4);
    CHECK_FALSE(equal_up_to_global_phase(perturbed, u, 1e-9));

    CHECK_THROWS_AS(equal_up_to_global_phase(ComplexMatrix(2, 2), ComplexMatrix(4, 4), 1e-9),
                    std::invalid_argument);
}

TEST_CASE("bloch_to_z") {
    CHECK(bloch_to_z({0.0, 1.7}).value() == Complex{0.0, 0.0});

    const Complex z = bloch_to_z({kPi / 2.0, 0.0}).value();
    CHECK(z.real() == Approx(1.0).epsilon(1e-12));
    CHECK(z.imag() == Approx(0.0).epsilon(1e-12));

    const Complex expected = std::polar(std::tan(kPi / 16.0), kPi / 3.0);
    CHECK(std::abs(bloch_to_z({kPi / 8.0, kPi / 3.0}).value() - expected) < 1e-14);

    CHECK(bloch_to_z({kPi, 0.3}).is_infinite());
}

TEST_CASE("bloch_to_z is 2*pi periodic in phi") {
    const BlochAngles a(0.7, 1.1);
    const BlochAngles b(0.7, 1.1 + 2.0 * kPi);
    CHECK(bloch_to_z(a).approx_equal(bloch_to_z(b), 1e-14));
}

TEST_CASE("BlochAngles validates theta") {
    CHECK_THROWS_AS(BlochAngles(-0.5, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(BlochAngles(kPi + 0.5, 0.0), std::invalid_argument);
}

TEST_CASE("ExtendedComplex infinity is tagged") {
    const ExtendedComplex inf = ExtendedComplex::infinity();
    CHECK(inf.is_infinite());
    CHECK_THROWS_AS(inf.value(), std::domain_error);
    CHECK(inf.approx_equal(ExtendedComplex::infinity()));
    CHECK_FALSE(inf.approx_equal(ExtendedComplex(Complex{1.0, 0.0})));
}

TEST_CASE("determinant and trace on small matrices") {
    const ComplexMatrix m(2, 2, {Complex{1, 1}, 2, 3, Complex{0, -2}});
    const Complex det = m.determinant();
    // (1+i)(-2i) - 6 = -2i + 2 - 6
    CHECK(std::abs(det - Complex{-4.0, -2.0}) < 1e-14);
    CHECK(std::abs(m.trace() - Complex{1.0, -1.0}) < 1e-14);

    std::mt19937 rng(17);
    const ComplexMatrix u = oracle::random_unitary(4, rng);
    CHECK(std::abs(std::abs(u.determinant()) - 1.0) < 1e-12);
}
