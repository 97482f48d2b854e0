#pragma once

/*
 * Induced isomorphisms between section algebras.
 *
 * A witness (V, lambda) with V A V* = lambda B induces the completely
 * isometric algebra isomorphism F -> V F V* (the scalar cancels under
 * conjugation, so concomitance with respect to B is automatic). In the
 * eigenbasis frames the map is combinatorial: M = S_B* V S_A is unitary and
 * supported on pairs (k, j) with b_k ~ a_j conj(lambda), so for simple
 * spectra M is a permutation times diagonal phases and the map permutes
 * entries, multiplies coefficients by phi_j conj(phi_k), and shifts Laurent
 * indices by the integer exponent drift K_A[j][k] - K_B[pi(j)][pi(k)].
 *
 * With degenerate eigenvalues an external witness may rotate inside an
 * eigenspace, leaving M block-unitary instead of permutation-like. The map
 * then realigns the target frame: each cluster block of M is replaced by
 * its polar unitary factor and the corresponding target frame columns are
 * rotated to match, which is again an eigenbasis of B. Mapped sections
 * carry the realigned frame.
 *
 * The map preserves the center pointwise (scalar entries sit on the
 * diagonal where the phases cancel exactly) and preserves complete norms at
 * every matrix level (values are conjugated by the fixed unitary I_m x V).
 */

#include <vector>

#include "bundlealg/norms.hpp"
#include "bundlealg/sections.hpp"

namespace bundlealg {

struct InducedMapOptions {
    double decision_tol = defaults::decision_tol; // witness residual bound
    double frame_tol = defaults::frame_match_tol; // permutation extraction bound
    double cluster_tol = defaults::cluster_tol;
};

struct InducedMap {
    BundlePtr source;
    BundlePtr target;
    Matrix witness;            // V
    cplx lambda{1.0, 0.0};     // V A V* = lambda B
    std::vector<int> perm;     // j -> pi(j), frame index permutation
    std::vector<cplx> phases;  // phi_j, unit modulus
    Matrix target_frame;       // eigenbasis of B the images are expressed in
    double witness_residual = 0.0;
    double alignment_residual = 0.0; // max entry |S_B^realigned* V S_A - P Phi|
    bool realigned = false;
};

InducedMap induced_map(BundlePtr source, BundlePtr target, const Matrix& v, cplx lambda,
                       const InducedMapOptions& opts = {});

// Image section: values V F(z) V* over the target bundle.
Section apply(const InducedMap& map, const Section& s);

// Per-level deviation |complete_norm(mapped block) - complete_norm(block)|
// for seeded random blocks, levels 1..levels, on one fixed grid (grid's
// boundary sample count, no refinement, so both sides see identical points).
std::vector<double> verify_isometry(const InducedMap& map, int levels, const GridSpec& grid = {},
                                    std::uint64_t seed = 0);

// Max over a default family of Laurent polynomials p and strip samples of
// ||apply(map, p(e^z) I) - p(e^z) I||; the center must be fixed pointwise.
double verify_center(const InducedMap& map, int re_samples = 8, int im_samples = 8);

struct ClassifyOptions {
    double tol = defaults::decision_tol;
    double unitarity_tol = defaults::unitarity_tol;
    bool strict = false;
    std::uint64_t seed = 0;
    int levels = 3;
    GridSpec grid{};
};

struct ClassificationReport {
    EquivalenceReport equivalence;
    bool strict_mode = false;
    // Populated only on an equivalent verdict:
    std::vector<double> isometry_deviation;
    double center_residual = 0.0;
    double mapped_concomitant_residual = 0.0;
};

// Full pipeline: decide equivalence of the bundles generated by a and b
// over the annulus of outer radius r1; on success, build the induced map
// and verify isometry, center preservation, and concomitance of images.
ClassificationReport classify_pair(const Matrix& a, const Matrix& b, double r1,
                                   const ClassifyOptions& opts = {});

} // namespace bundlealg
