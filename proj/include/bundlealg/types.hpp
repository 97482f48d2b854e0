#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>

#include "bundlealg/errors.hpp"

namespace bundlealg {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;

// Default thresholds shared across the library. Kept in one place so the
// CLI and tests reference the same numbers.
namespace defaults {
inline constexpr double unitarity_tol = 1e-10;  // ||A A* - I|| bound for accepting a unitary
inline constexpr double decision_tol = 1e-7;    // spectral-certificate comparison bound
inline constexpr double cluster_tol = 1e-8;     // eigenvalue gap below which a cluster is one eigenspace
inline constexpr double residual_tol = 1e-9;    // verification residual bound (concomitance, charts)
inline constexpr double frame_match_tol = 1e-7; // frame-alignment bound for induced maps
} // namespace defaults

inline bool is_finite(const Matrix& m) {
    return m.allFinite();
}

inline void require_square(const Matrix& m, const std::string& who) {
    if (m.rows() != m.cols() || m.rows() < 1)
        throw validation_error(who + ": expected a nonempty square matrix, got " +
                               std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    if (!is_finite(m))
        throw validation_error(who + ": matrix has non-finite entries");
}

} // namespace bundlealg
