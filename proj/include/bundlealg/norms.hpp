#pragma once

/*
 * Sup-norms of holomorphic matrix sections.
 *
 * The pointwise operator norm of a holomorphic section is subharmonic, so
 * its sup over the closed annulus is attained on the two boundary circles;
 * sup_norm therefore samples only |w| = 1 and |w| = r1. Sampling a finite
 * grid gives a certified lower bound of the true sup; the grid is refined
 * by an integer factor (old sample angles stay in the refined grid, so the
 * reported value is non-decreasing) until the relative change drops below
 * epsilon or the refinement budget is exhausted.
 *
 * complete_norm applies the same protocol to an m x m block of sections
 * assembled into one (m n) x (m n) value; with m = 1 it is sup_norm. This
 * is the matrix-level norm structure under which the induced isomorphisms
 * are complete isometries.
 */

#include <vector>

#include "bundlealg/sections.hpp"
#include "bundlealg/types.hpp"

namespace bundlealg {

struct GridSpec {
    int boundary_samples = 512; // per circle, >= 16
    int interior_radial = 16;   // strictly interior radii for the max-principle check
    int interior_angular = 64;  // should divide boundary_samples so angles nest
    int refine_factor = 2;      // >= 2
    double epsilon = 1e-8;      // relative convergence threshold
    int max_refinements = 6;

    void validate() const;
};

struct NormResult {
    double value = 0.0;      // certified lower bound of the boundary sup
    double last_delta = 0.0; // value change contributed by the final refinement
    int samples = 0;         // boundary samples per circle actually used
    bool converged = false;  // relative change fell below epsilon
};

NormResult sup_norm(const Section& s, const GridSpec& grid = {});

// Interior grid max minus boundary grid max; subharmonicity keeps this
// non-positive up to discretization (<= 1e-6 with nested angular grids).
double boundary_dominates(const Section& s, const GridSpec& grid = {});

// blocks is row-major m x m, all sharing one bundle and frame.
NormResult complete_norm(const std::vector<std::vector<Section>>& blocks,
                         const GridSpec& grid = {});

} // namespace bundlealg
