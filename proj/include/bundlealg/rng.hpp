#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "bundlealg/types.hpp"

namespace bundlealg {

// Deterministic random source. Uniform and Gaussian draws are built directly
// on top of mt19937_64 output instead of std::*_distribution, whose sequences
// are implementation-defined; fixed seeds must reproduce byte-identical
// reports across toolchains.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    // Uniform in [0, 1) with 53-bit resolution.
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    // Standard normal via Box-Muller; the spare draw is cached.
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform(), u2 = uniform();
        while (u1 == 0.0) u1 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double t = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(t);
        have_spare_ = true;
        return r * std::cos(t);
    }

    cplx gaussian_cplx() {
        const double re = gaussian();
        return {re, gaussian()};
    }

    // Unit-modulus value with uniformly distributed argument.
    cplx unimodular() { return std::polar(1.0, 2.0 * std::numbers::pi * uniform()); }

    std::uint64_t raw() { return gen_(); }

private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// Haar-like random unitary: QR of a complex Gaussian matrix with the R
// diagonal phases absorbed so the distribution does not depend on the QR
// sign conventions.
inline Matrix random_unitary(int n, Rng& rng) {
    Matrix g(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g(i, j) = rng.gaussian_cplx();
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ();
    const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < n; ++j) {
        const cplx d = r(j, j);
        const cplx phase = (std::abs(d) == 0.0) ? cplx(1, 0) : d / std::abs(d);
        q.col(j) *= phase;
    }
    return q;
}

// Random unitary with prescribed spectrum: S diag(a) S* for Haar-like S.
inline Matrix random_unitary_with_spectrum(const Vector& eigenvalues, Rng& rng) {
    const int n = static_cast<int>(eigenvalues.size());
    const Matrix s = random_unitary(n, rng);
    return s * eigenvalues.asDiagonal() * s.adjoint();
}

} // namespace bundlealg
