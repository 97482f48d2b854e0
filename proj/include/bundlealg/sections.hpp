#pragma once

/*
 * Holomorphic matrix sections of a flat bundle, in concomitant form.
 *
 * A section is a holomorphic F on the strip cover with
 *
 *     F(z + 2 pi i k) = A^k F(z) A^{-k},
 *
 * stored in an eigenbasis frame S of the generator: F(z) = S f(z) S* where
 * the entry functions are finite sums
 *
 *     f[j][k](z) = sum_m c_m e^{(K[j][k] + m) z},
 *
 * with K the bundle's exponent table. Each entry then picks up exactly the
 * factor a_j / a_k per deck step, which is the (j,k) component of Ad(A), so
 * the concomitant identity holds by construction. |f[j][k]| is invariant
 * under deck steps and descends to the annulus.
 *
 * The two constructor families: family_d is the constant-diagonal sections
 * (entrywise D in the frame), family_c the single-exponential off-diagonal
 * family C[j][k] e^{K[j][k] z} with zero diagonal. scalar_section embeds a
 * Laurent polynomial p as p(e^z) I, the center of the algebra.
 *
 * Products of entries drift by integer exponents only: K[j][q] + K[q][k]
 * differs from K[j][k] by an element of {-1, 0, 1} because all three
 * exponentiate to ratios of the same eigenvalues. multiply folds that drift
 * into Laurent indices, so results satisfy the entry invariants exactly.
 */

#include <map>
#include <vector>

#include "bundlealg/bundle.hpp"
#include "bundlealg/types.hpp"

namespace bundlealg {

// One modulus-automorphic entry: e^{K z} times a Laurent polynomial in e^z.
struct ModAutoEntry {
    double K = 0.0;
    std::map<int, cplx> laurent; // index m -> coefficient of e^{(K + m) z}

    cplx eval(cplx z) const;
    bool is_zero() const { return laurent.empty(); }
    // Shift every Laurent index by d and compensate K by -d; the function
    // is unchanged, only the bookkeeping moves.
    ModAutoEntry rebased(double new_K, int shift) const;
};

// Drops exact-zero coefficients so the zero entry has an empty map.
void prune(ModAutoEntry& e);

struct Section {
    BundlePtr bundle;
    Matrix frame;                     // unitary; columns = eigenbasis of the generator
    std::vector<ModAutoEntry> entries; // n*n, row-major

    int dim() const { return bundle ? bundle->dim() : 0; }
    const ModAutoEntry& entry(int j, int k) const {
        return entries[static_cast<std::size_t>(j * dim() + k)];
    }
    ModAutoEntry& entry(int j, int k) { return entries[static_cast<std::size_t>(j * dim() + k)]; }
};

// Assembles a section with all entries at the bundle's exponents and the
// bundle's own frame; used by the constructors below and by loaders.
Section empty_section(BundlePtr bundle);

// Constant diagonal section: f = diag(d_1..d_n) in the frame.
Section family_d(BundlePtr bundle, const Vector& d);

// Zero-diagonal single-exponential family: entry (j,k) = C(j,k) e^{K[j][k] z}.
// The diagonal of C must be exactly zero.
Section family_c(BundlePtr bundle, const Matrix& c);

// Center element p(e^z) I for a Laurent polynomial p (index -> coefficient).
Section scalar_section(BundlePtr bundle, const std::map<int, cplx>& p);

// Every entry gets seeded Gaussian coefficients for indices |m| <= degree.
Section random_section(BundlePtr bundle, int degree, std::uint64_t seed);

// Value on the strip cover; z must satisfy 0 <= Re z <= ln r1.
Matrix eval_strip(const Section& s, cplx z);

// Pointwise adjoint of the value; the algebra itself excludes adjoints,
// this exists for norm experiments only.
Matrix eval_adjoint(const Section& s, cplx z);

// Value over an annulus point through a chart branch: F(log_chart(w)).
Matrix eval_annulus(const Section& s, cplx w, const Chart& chart);

Section add(const Section& a, const Section& b);
Section scale(const Section& a, cplx c);
Section multiply(const Section& a, const Section& b);

// Max over a strip grid and deck steps |k| <= k_range of
// ||F(z + 2 pi i k) - A^k F(z) A^{-k}||.
double concomitant_residual(const Section& s, int re_samples = 8, int im_samples = 8,
                            int k_range = 3);

struct MultiplierCheck {
    double residual = 0.0;         // max |f(z + 2 pi i) - expected f(z)|
    double modulus_residual = 0.0; // max | |f(z + 2 pi i)| - |f(z)| |
};

// Checks one entry against its expected deck multiplier on a strip grid.
MultiplierCheck multiplier_check(const ModAutoEntry& entry, cplx expected, double re_hi,
                                 int re_samples = 8, int im_samples = 8);

// Conjugated section: values T* F(z) T over the bundle generated by T* A T.
// The target bundle reuses the source spectrum (columns T* S), so exponent
// tables carry over bitwise.
Section to_frame(const Section& s, const Matrix& t,
                 double unitarity_tol = defaults::unitarity_tol);

// Evenly spaced strip sample points: Re over [0, ln r1] inclusive, Im over
// [0, 2 pi) half-open.
std::vector<cplx> strip_grid(const Annulus& ann, int re_samples, int im_samples);

} // namespace bundlealg
