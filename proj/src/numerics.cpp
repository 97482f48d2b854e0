#include "bundlealg/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace bundlealg {

using std::numbers::pi;

double unitary_defect(const Matrix& m) {
    if (m.rows() != m.cols() || m.rows() < 1) return std::numeric_limits<double>::infinity();
    if (!is_finite(m)) return std::numeric_limits<double>::infinity();
    const Matrix d = m * m.adjoint() - Matrix::Identity(m.rows(), m.rows());
    return operator_norm(d);
}

bool check_unitary(const Matrix& m, double tol) {
    if (!(tol > 0.0)) throw validation_error("check_unitary: tolerance must be positive");
    if (m.rows() != m.cols() || m.rows() < 1 || !is_finite(m)) return false;
    return unitary_defect(m) <= tol;
}

UnitaryMatrix UnitaryMatrix::checked(Matrix m, double tol) {
    require_square(m, "UnitaryMatrix");
    const double defect = unitary_defect(m);
    if (!(defect <= tol))
        throw validation_error("UnitaryMatrix: ||M M* - I|| = " + std::to_string(defect) +
                               " exceeds tolerance " + std::to_string(tol));
    return UnitaryMatrix(std::move(m));
}

double operator_norm(const Matrix& m) {
    if (m.size() == 0) throw validation_error("operator_norm: empty matrix");
    if (!is_finite(m)) throw validation_error("operator_norm: non-finite entries");
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues()(0);
}

double argument_sort_key(cplx a) {
    double t = std::arg(a);
    if (t > pi - 1e-9) t -= 2.0 * pi;
    return t;
}

namespace detail {

int dominant_index(const Vector& v) {
    const double top = v.cwiseAbs().maxCoeff();
    for (int i = 0; i < v.size(); ++i)
        if (std::abs(v(i)) >= top - 1e-12) return i;
    return 0;
}

void canonicalize_column_phases(Matrix& basis) {
    for (int j = 0; j < basis.cols(); ++j) {
        const int d = dominant_index(basis.col(j));
        const cplx lead = basis(d, j);
        if (std::abs(lead) > 0.0) basis.col(j) *= std::conj(lead) / std::abs(lead);
    }
}

void refine_clusters(Matrix& basis, ClusterRanges& ranges, const Matrix& herm, double gap_tol) {
    ClusterRanges next;
    next.reserve(ranges.size());
    for (const auto& [lo, hi] : ranges) {
        const int len = hi - lo;
        if (len <= 1) {
            next.emplace_back(lo, hi);
            continue;
        }
        const Matrix block = basis.middleCols(lo, len);
        Matrix proj = block.adjoint() * herm * block;
        proj = 0.5 * (proj + proj.adjoint()).eval();
        Eigen::SelfAdjointEigenSolver<Matrix> es(proj);
        if (es.info() != Eigen::Success)
            throw numerical_error("refine_clusters: Hermitian eigensolver failed");
        basis.middleCols(lo, len) = block * es.eigenvectors();
        const auto& vals = es.eigenvalues();
        int start = lo;
        for (int i = 1; i < len; ++i) {
            if (vals(i) - vals(i - 1) > gap_tol) {
                next.emplace_back(start, lo + i);
                start = lo + i;
            }
        }
        next.emplace_back(start, hi);
    }
    ranges = std::move(next);
}

} // namespace detail

UnitarySpectrum eig_unitary(const Matrix& u, const EigOptions& opts) {
    require_square(u, "eig_unitary");
    const double defect = unitary_defect(u);
    if (!(defect <= opts.unitarity_tol))
        throw validation_error("eig_unitary: input is not unitary within tolerance (defect " +
                               std::to_string(defect) + ")");
    const int n = static_cast<int>(u.rows());

    const Matrix h1 = 0.5 * (u + u.adjoint());
    const Matrix h2 = cplx(0, -0.5) * (u - u.adjoint());

    Matrix basis = Matrix::Identity(n, n);
    detail::ClusterRanges ranges{{0, n}};
    // Coarse sweep: keeps eigenvector mixing at eps/1e-4, confines every
    // surviving cluster to a short arc. Fine sweep: on a short arc one of
    // cos/sin separates at full strength, so cluster_tol gaps resolve.
    const double coarse = std::max(1e-4, opts.cluster_tol);
    detail::refine_clusters(basis, ranges, h1, coarse);
    detail::refine_clusters(basis, ranges, h2, coarse);
    detail::refine_clusters(basis, ranges, h1, opts.cluster_tol);
    detail::refine_clusters(basis, ranges, h2, opts.cluster_tol);

    Vector vals(n);
    for (int j = 0; j < n; ++j) {
        const cplx r = basis.col(j).dot(u * basis.col(j)); // Rayleigh quotient
        vals(j) = (std::abs(r) > 0.0) ? r / std::abs(r) : cplx(1, 0);
    }

    // Global order: argument key ascending; inside a cluster of equal
    // eigenvalues, order columns by first dominant component index.
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return argument_sort_key(vals(a)) < argument_sort_key(vals(b));
    });
    for (int lo = 0; lo < n;) {
        int hi = lo + 1;
        while (hi < n && std::abs(vals(order[hi]) - vals(order[hi - 1])) < opts.cluster_tol) ++hi;
        std::stable_sort(order.begin() + lo, order.begin() + hi, [&](int a, int b) {
            return detail::dominant_index(basis.col(a)) < detail::dominant_index(basis.col(b));
        });
        lo = hi;
    }

    UnitarySpectrum spec;
    spec.eigenvalues.resize(n);
    spec.vectors.resize(n, n);
    for (int j = 0; j < n; ++j) {
        spec.eigenvalues(j) = vals(order[j]);
        spec.vectors.col(j) = basis.col(order[j]);
    }
    detail::canonicalize_column_phases(spec.vectors);

    const Matrix recon =
        spec.vectors.adjoint() * u * spec.vectors - Matrix(spec.eigenvalues.asDiagonal());
    const double residual = operator_norm(recon);
    if (!(residual <= 1e-9))
        throw numerical_error("eig_unitary: reconstruction residual " + std::to_string(residual) +
                              " exceeds 1e-9; input is not numerically normal");
    return spec;
}

std::vector<double> canonical_phase_form(const std::vector<cplx>& values, double modulus_tol) {
    if (values.empty()) throw validation_error("canonical_phase_form: empty input");
    for (const cplx& v : values)
        if (std::abs(std::abs(v) - 1.0) > modulus_tol)
            throw validation_error("canonical_phase_form: value off the unit circle");

    const std::size_t n = values.size();
    std::vector<double> best;
    std::vector<double> cand(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) {
                cand[j] = 0.0; // the base value rotates to argument zero exactly
                continue;
            }
            double t = std::arg(values[j] * std::conj(values[i]));
            if (t < 0.0) t += 2.0 * pi;
            cand[j] = t;
        }
        std::sort(cand.begin(), cand.end());
        if (best.empty() || std::lexicographical_compare(cand.begin(), cand.end(),
                                                         best.begin(), best.end()))
            best = cand;
    }
    return best;
}

double phase_form_distance(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = std::abs(a[i] - b[i]);
        d = std::min(d, 2.0 * pi - d);
        worst = std::max(worst, d);
    }
    return worst;
}

} // namespace bundlealg
