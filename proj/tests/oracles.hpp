#pragma once

// Independent closed-form and Bloch-decomposition references.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;
constexpr double two_pi = 2.0 * std::numbers::pi;

/// -2 cos(2 pi k1 / L1) - 2 cos(2 pi k2 / L2) over the torus momentum grid.
inline std::vector<double> free_dispersion(int l1, int l2) {
    std::vector<double> e;
    for (int a = 0; a < l1; ++a)
        for (int b = 0; b < l2; ++b)
            e.push_back(-2.0 * std::cos(two_pi * a / l1) - 2.0 * std::cos(two_pi * b / l2));
    std::sort(e.begin(), e.end());
    return e;
}

/**
 q x q Harper block for flux p/q with x1 momentum k1 and magnetic-cell
 momentum kk along x2. Row j is the site x2 = j + 1, matching a patch that
 starts at x2 = 1.
 */
inline Eigen::MatrixXcd harper_block(int p, int q, double k1, double kk) {
    const double phi = double(p) / q;
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(q, q);
    for (int j = 0; j < q; ++j)
        h(j, j) += -2.0 * std::cos(k1 + two_pi * phi * (j + 1));
    for (int j = 0; j + 1 < q; ++j) {
        h(j + 1, j) += -1.0;
        h(j, j + 1) += -1.0;
    }
    h(q - 1, 0) += -std::polar(1.0, kk);
    h(0, q - 1) += -std::polar(1.0, -kk);
    return h;
}

/// Torus spectrum from the Harper blocks; l2 must be a multiple of q.
inline std::vector<double> harper_torus_spectrum(int p, int q, int l1, int l2) {
    std::vector<double> e;
    const int cells = l2 / q;
    for (int a = 0; a < l1; ++a)
        for (int b = 0; b < cells; ++b) {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> s(
                harper_block(p, q, two_pi * a / l1, two_pi * b / cells));
            for (int i = 0; i < q; ++i)
                e.push_back(s.eigenvalues()(i));
        }
    std::sort(e.begin(), e.end());
    return e;
}

/**
 Lattice Chern number of the lowest `bands` Harper bands (Fukui-Hatsugai-
 Suzuki link variables on an n x n grid, k1 first, kk second).
 */
inline int harper_chern(int p, int q, int bands, int n = 24) {
    std::vector<Eigen::MatrixXcd> u(std::size_t(n * n));
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> s(
                harper_block(p, q, two_pi * a / n, two_pi * b / n));
            u[std::size_t(a * n + b)] = s.eigenvectors().leftCols(bands);
        }
    const auto at = [&](int a, int b) -> const Eigen::MatrixXcd& {
        return u[std::size_t(((a % n + n) % n) * n + (b % n + n) % n)];
    };
    const auto link = [](const Eigen::MatrixXcd& x, const Eigen::MatrixXcd& y) {
        const cplx d = (x.adjoint() * y).determinant();
        return d / std::abs(d);
    };
    double total = 0.0;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            const cplx f = link(at(a, b), at(a + 1, b)) * link(at(a + 1, b), at(a + 1, b + 1)) *
                           std::conj(link(at(a, b + 1), at(a + 1, b + 1))) *
                           std::conj(link(at(a, b), at(a, b + 1)));
            total += std::arg(f);
        }
    return int(std::lround(total / two_pi));
}

/// 2x2 pair: P = |e1><e1|, U the swap; D = diag(1, -1).
struct TwoByTwoPair {
    Eigen::MatrixXcd p;
    Eigen::MatrixXcd u;
    TwoByTwoPair() : p(Eigen::MatrixXcd::Zero(2, 2)), u(Eigen::MatrixXcd::Zero(2, 2)) {
        p(0, 0) = 1.0;
        u(0, 1) = 1.0;
        u(1, 0) = 1.0;
    }
};

} // namespace oracle
