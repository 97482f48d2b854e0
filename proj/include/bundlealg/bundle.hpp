#pragma once

/*
 * Flat projective-unitary bundles over a closed annulus.
 *
 * The annulus is 1 <= |w| <= r1 with r1 > 1. Its universal cover is the
 * strip {0 <= Re z <= ln r1} under w = e^z, with deck transformation
 * z -> z + 2 pi i. A flat PU_n bundle is determined by the holonomy of the
 * positively oriented generator loop, represented by a unitary A acting by
 * conjugation; A is stored together with its spectral data.
 *
 * Exponent table: with eigenvalues a_1..a_n of A, the entry K[j][k] is the
 * number in (-1/2, 1/2] with e^{2 pi i K[j][k]} = a_j / a_k. The table is
 * exactly antisymmetric; at the half-integer boundary (a_j/a_k = -1) the
 * value +1/2 is assigned to the j < k slot. K[j][k] is the fundamental
 * exponent of matrix-section entries in the eigenbasis frame: a function
 * e^{(K[j][k] + m) z} picks up the factor a_j/a_k under one deck step, which
 * is exactly the (j,k) component of conjugation by A.
 *
 * Equivalence: two bundles are restricted-flat-equivalent iff the generator
 * spectra agree as multisets up to one global unimodular rotation (plain
 * unitary conjugacy when the rotation is pinned to 1). The decision compares
 * rotation-invariant canonical phase forms; a witness (V, lambda) with
 * ||V A V* - lambda B|| <= tol is produced on success.
 */

#include <memory>
#include <optional>
#include <vector>

#include "bundlealg/numerics.hpp"
#include "bundlealg/types.hpp"

namespace bundlealg {

struct Annulus {
    double r1 = 2.0; // outer radius; inner radius is fixed at 1

    explicit Annulus(double outer) : r1(outer) {
        if (!(r1 > 1.0) || !std::isfinite(r1))
            throw validation_error("Annulus: outer radius must satisfy r1 > 1");
    }
    double log_r1() const { return std::log(r1); }

    // Closed strip membership, with slack for boundary arithmetic.
    bool contains_strip(cplx z, double tol = 1e-12) const {
        return z.real() >= -tol && z.real() <= log_r1() + tol && std::isfinite(z.imag());
    }
    bool contains(cplx w, double tol = 1e-9) const {
        const double r = std::abs(w);
        return r >= 1.0 - tol && r <= r1 + tol;
    }
};

// Deck transformation of the strip cover: z + 2 pi i k.
cplx deck(const Annulus& ann, cplx z, long k);

class FlatBundle;
using BundlePtr = std::shared_ptr<const FlatBundle>;

class FlatBundle {
public:
    // Validates unitarity, diagonalizes, builds the exponent table.
    static BundlePtr create(const Matrix& a, double r1,
                            double unitarity_tol = defaults::unitarity_tol);

    const Annulus& annulus() const { return annulus_; }
    int dim() const { return static_cast<int>(generator_.rows()); }
    const Matrix& generator() const { return generator_; }
    const UnitarySpectrum& spectrum() const { return spectrum_; }
    const RealMatrix& exponents() const { return exponents_; }
    double exponent(int j, int k) const { return exponents_(j, k); }

    // A^k through the spectral decomposition, so powers stay exactly normal.
    Matrix deck_matrix(long k) const;

    // Bundle generated by t* A t, reusing this spectrum (eigenvalues bitwise,
    // eigenbasis t* S) and exponent table instead of re-diagonalizing; frame
    // changes must not perturb section exponents.
    BundlePtr conjugated(const Matrix& t, double unitarity_tol = defaults::unitarity_tol) const;

    // Content equality at the precision JSON round trips preserve.
    bool same_as(const FlatBundle& other, double tol = 1e-12) const;

private:
    FlatBundle(Annulus ann, Matrix a, UnitarySpectrum spec, RealMatrix expo)
        : annulus_(ann), generator_(std::move(a)), spectrum_(std::move(spec)),
          exponents_(std::move(expo)) {}

    Annulus annulus_;
    Matrix generator_;
    UnitarySpectrum spectrum_;
    RealMatrix exponents_;
};

BundlePtr make_bundle(const Matrix& a, double r1,
                      double unitarity_tol = defaults::unitarity_tol);

// Angular chart of the annulus. The open interval (theta_lo, theta_hi) lives
// on the real line (width < 2 pi), so it fixes a branch of the logarithm:
// log_chart(w) = ln|w| + i (t + 2 pi branch_offset) where t is the unique
// representative of arg w in the interval.
struct Chart {
    int index = 0;
    double theta_lo = 0.0;
    double theta_hi = 0.0;
    int branch_offset = 0;

    bool covers_angle(double theta) const;
    // The representative of arg w in (theta_lo, theta_hi); throws when w is
    // outside the chart or the annulus.
    double angle_in(const Annulus& ann, cplx w) const;
    cplx log_in(const Annulus& ann, cplx w) const;
};

// m >= 3 overlapping sectors of width (2 pi / m) * 5/4 centered at
// 2 pi q / m. Consecutive charts overlap in a sector of width (2 pi / m)/4;
// non-consecutive charts are disjoint. Walking the full cycle of transitions
// winds once around the annulus (one deck step).
std::vector<Chart> atlas(const Annulus& ann, int sectors = 4);

// Deck step between two branches at a common point: integer k with
// log_U(w) - log_V(w) = 2 pi i k. The transition acts on fibres by Ad(A^k).
long transition(const FlatBundle& bundle, const Chart& u, const Chart& v, cplx w);

enum class Verdict { equivalent, not_equivalent };

// Outcome of an equivalence decision. When verdict == equivalent the
// witness satisfies ||V A V* - lambda B|| = residual <= decision tolerance;
// invariantA/invariantB are the canonical phase forms that were compared.
struct EquivalenceReport {
    Verdict verdict = Verdict::not_equivalent;
    cplx lambda{1.0, 0.0};
    std::optional<Matrix> witness;
    double residual = 0.0;
    std::vector<double> invariantA;
    std::vector<double> invariantB;
};

struct DecisionOptions {
    double tol = defaults::decision_tol;
    bool strict = false; // pin lambda = 1 (plain unitary conjugacy)
};

EquivalenceReport pu_equivalent(const FlatBundle& a, const FlatBundle& b,
                                const DecisionOptions& opts = {});
EquivalenceReport strictly_conjugate(const FlatBundle& a, const FlatBundle& b,
                                     double tol = defaults::decision_tol);

} // namespace bundlealg
