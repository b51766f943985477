#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace qsmb::internal {

/// Cyclic Jacobi eigensolver for small real symmetric matrices.
/// `a` is row-major n*n and gets destroyed. On return `v` holds the
/// orthogonal eigenvector matrix (columns are eigenvectors) and
/// `eigenvalues[i]` the eigenvalue of column i.
inline void jacobi_symmetric(int n, std::vector<double>& a, std::vector<double>& v,
                             std::vector<double>& eigenvalues) {
    auto A = [&](int r, int c) -> double& { return a[static_cast<std::size_t>(r) * n + c]; };
    auto V = [&](int r, int c) -> double& { return v[static_cast<std::size_t>(r) * n + c]; };

    v.assign(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) V(i, i) = 1.0;

    double scale = 0.0;
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) scale = std::max(scale, std::abs(A(r, c)));
    if (scale == 0.0) scale = 1.0;

    for (int sweep = 0; sweep < 128; ++sweep) {
        double off = 0.0;
        for (int r = 0; r < n; ++r)
            for (int c = r + 1; c < n; ++c) off = std::max(off, std::abs(A(r, c)));
        if (off <= 1e-15 * scale) break;

        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                if (std::abs(A(p, q)) <= 1e-18 * scale) continue;
                const double tau = (A(q, q) - A(p, p)) / (2.0 * A(p, q));
                const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;

                const double app = A(p, p), aqq = A(q, q), apq = A(p, q);
                A(p, p) = c * c * app - 2.0 * s * c * apq + s * s * aqq;
                A(q, q) = s * s * app + 2.0 * s * c * apq + c * c * aqq;
                A(p, q) = 0.0;
                A(q, p) = 0.0;
                for (int k = 0; k < n; ++k) {
                    if (k == p || k == q) continue;
                    const double akp = A(k, p), akq = A(k, q);
                    A(k, p) = c * akp - s * akq;
                    A(p, k) = A(k, p);
                    A(k, q) = s * akp + c * akq;
                    A(q, k) = A(k, q);
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = V(k, p), vkq = V(k, q);
                    V(k, p) = c * vkp - s * vkq;
                    V(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    eigenvalues.assign(n, 0.0);
    for (int i = 0; i < n; ++i) eigenvalues[i] = A(i, i);
}

}  // namespace qsmb::internal
