#pragma once

/*
 * Spectral kernel for unitary matrices.
 *
 * Everything downstream leans on three facts about a unitary U:
 *
 *   1. U is normal, so it has an orthonormal eigenbasis and its Hermitian
 *      parts H1 = (U + U*)/2, H2 = (U - U*)/2i commute and share that basis.
 *   2. Eigenvalues lie on the unit circle; we order them by principal
 *      argument with pi folded to -pi (ascending over [-pi, pi)).
 *   3. Within an eigenvalue cluster (gap below cluster_tol) only the
 *      invariant subspace is well defined; any orthonormal basis of it is
 *      acceptable and callers must not rely on a particular one.
 *
 * eig_unitary avoids the general nonsymmetric solver: it splits the basis by
 * H1 and H2 at a coarse gap first (eigenvector mixing error eps/gap stays
 * negligible), which confines each remaining cluster to a short arc of the
 * circle, where at least one of cos/sin separates points at full strength;
 * a second pass at cluster_tol then resolves the fine structure. The result
 * is an orthonormal-by-construction basis with reconstruction residual near
 * machine precision even for adversarially close eigenvalues.
 */

#include <vector>

#include "bundlealg/types.hpp"

namespace bundlealg {

// Largest singular value deviation of M M* from the identity.
double unitary_defect(const Matrix& m);

// True when ||M M* - I|| <= tol. tol must be positive.
bool check_unitary(const Matrix& m, double tol = defaults::unitarity_tol);

// Value type certifying the unitarity check was run.
class UnitaryMatrix {
public:
    static UnitaryMatrix checked(Matrix m, double tol = defaults::unitarity_tol);

    const Matrix& get() const { return m_; }
    int dim() const { return static_cast<int>(m_.rows()); }

private:
    explicit UnitaryMatrix(Matrix m) : m_(std::move(m)) {}
    Matrix m_;
};

// Orthonormal eigendecomposition of a unitary matrix.
// Invariants: |eigenvalues[i]| = 1 to a few ulp, columns of vectors are
// orthonormal, ||vectors* U vectors - diag(eigenvalues)|| <= 1e-9.
struct UnitarySpectrum {
    Vector eigenvalues; // unit modulus, sorted by the argument key below
    Matrix vectors;     // orthonormal columns, phase-normalized
};

// Sort key: principal argument with +pi treated as -pi so that -1 orders
// before 1. Arguments within 1e-9 of +pi are folded to keep clusters that
// straddle the branch cut together.
double argument_sort_key(cplx a);

struct EigOptions {
    double unitarity_tol = defaults::unitarity_tol;
    double cluster_tol = defaults::cluster_tol;
};

UnitarySpectrum eig_unitary(const Matrix& u, const EigOptions& opts = {});

// Largest singular value.
double operator_norm(const Matrix& m);

// Rotation-invariant certificate of a unit-modulus multiset: for each value
// b in the input, divide through by b, reduce arguments to [0, 2pi), sort
// ascending; return the lexicographically smallest of the n candidates.
// Two inputs equal up to one global phase produce equal forms.
std::vector<double> canonical_phase_form(const std::vector<cplx>& values,
                                         double modulus_tol = 1e-6);

// Sup distance between two forms with each coordinate compared on the
// circle (2pi-periodic), so near-wrap entries of a degenerate spectrum do
// not inflate the distance.
double phase_form_distance(const std::vector<double>& a, const std::vector<double>& b);

namespace detail {

// Contiguous column ranges [begin, end) partitioning a basis.
using ClusterRanges = std::vector<std::pair<int, int>>;

// One refinement sweep: inside every current cluster, diagonalize the
// projected Hermitian matrix, rotate the columns into its eigenbasis, and
// split the cluster at eigenvalue gaps larger than gap_tol. `herm` need not
// be exactly Hermitian; its Hermitian part is used.
void refine_clusters(Matrix& basis, ClusterRanges& ranges, const Matrix& herm, double gap_tol);

// Rotate each column so its first dominant component is real positive;
// makes decompositions of already-diagonal inputs come out as the identity.
void canonicalize_column_phases(Matrix& basis);

// Index of the first component of largest magnitude (1e-12 slack).
int dominant_index(const Vector& v);

} // namespace detail

} // namespace bundlealg
