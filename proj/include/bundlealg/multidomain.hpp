#pragma once

/*
 * Commuting holonomy tuples (higher-genus boundary data).
 *
 * A domain with b boundary circles has free fundamental group on b - 1
 * generators; a flat PU_n structure whose holonomies commute is represented
 * by a tuple of commuting unitaries (A_1, ..., A_{b-1}). Commuting normal
 * matrices share an orthonormal eigenbasis; each basis vector carries a
 * joint eigenvalue vector (one unimodular value per generator).
 *
 * simultaneous_diagonalize splits a basis by a random-weight Hermitian
 * combination of the generators first (generic weights separate everything
 * that can be separated), then refines surviving clusters sequentially with
 * the Hermitian parts of each generator, coarse gaps before cluster-level
 * gaps, mirroring eig_unitary. A single-generator tuple takes the identical
 * code path as eig_unitary.
 *
 * Tuple equivalence asks for one unitary V and per-generator phases with
 * V A_i V* = lambda_i B_i for all i simultaneously. The decision matches
 * the first joint eigenvalue vector of A against each joint vector of B to
 * enumerate candidate phase vectors, requires a single permutation aligning
 * the full joint multisets, and verifies every generator with the one V.
 */

#include <vector>

#include "bundlealg/bundle.hpp"
#include "bundlealg/numerics.hpp"

namespace bundlealg {

struct CommutingTuple {
    std::vector<Matrix> generators;

    int dim() const { return generators.empty() ? 0 : static_cast<int>(generators[0].rows()); }
    int size() const { return static_cast<int>(generators.size()); }
};

// Max over pairs of ||A_i A_j - A_j A_i||.
double check_commuting(const CommutingTuple& tuple);

struct JointSpectrum {
    Matrix vectors;                       // shared orthonormal eigenbasis
    std::vector<Vector> joint_values;     // per basis column: one value per generator
    int generators = 0;

    cplx value(int column, int generator) const {
        return joint_values[static_cast<std::size_t>(column)](generator);
    }
};

struct JointDiagOptions {
    double unitarity_tol = defaults::unitarity_tol;
    double commuting_tol = 1e-9;
    double cluster_tol = defaults::cluster_tol;
    std::uint64_t weight_seed = 0x9e3779b97f4a7c15ULL; // fixed: results are deterministic
};

JointSpectrum simultaneous_diagonalize(const CommutingTuple& tuple,
                                       const JointDiagOptions& opts = {});

// Extends the single-generator report with one phase per generator; the
// witness satisfies ||V A_i V* - lambdas[i] B_i|| <= tol for every i.
struct TupleEquivalenceReport {
    Verdict verdict = Verdict::not_equivalent;
    std::vector<cplx> lambdas;
    std::optional<Matrix> witness;
    double residual = 0.0; // max over generators
    std::vector<std::vector<double>> invariantA; // canonical phase form per generator
    std::vector<std::vector<double>> invariantB;
};

TupleEquivalenceReport tuple_pu_equivalent(const CommutingTuple& a, const CommutingTuple& b,
                                           const DecisionOptions& opts = {});

} // namespace bundlealg
