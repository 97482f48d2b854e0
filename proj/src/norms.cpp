#include "bundlealg/norms.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

namespace bundlealg {

using std::numbers::pi;

void GridSpec::validate() const {
    if (boundary_samples < 16) throw validation_error("GridSpec: need at least 16 boundary samples");
    if (interior_radial < 1 || interior_angular < 1)
        throw validation_error("GridSpec: interior grid counts must be positive");
    if (refine_factor < 2) throw validation_error("GridSpec: refinement factor must be >= 2");
    if (!(epsilon > 0.0)) throw validation_error("GridSpec: epsilon must be positive");
    if (max_refinements < 0) throw validation_error("GridSpec: negative refinement budget");
}

namespace {

// Max of the pointwise value norm over both boundary circles at n angles.
double boundary_max(const std::function<double(cplx)>& norm_at, double log_r1, int n) {
    double worst = 0.0;
    for (int j = 0; j < n; ++j) {
        const double theta = 2.0 * pi * j / n;
        worst = std::max(worst, norm_at(cplx(0.0, theta)));
        worst = std::max(worst, norm_at(cplx(log_r1, theta)));
    }
    return worst;
}

NormResult refine_boundary_sup(const std::function<double(cplx)>& norm_at, double log_r1,
                               const GridSpec& grid) {
    grid.validate();
    NormResult out;
    int n = grid.boundary_samples;
    double value = boundary_max(norm_at, log_r1, n);
    double delta = 0.0;
    bool converged = false;
    for (int pass = 0; pass < grid.max_refinements; ++pass) {
        const int refined = n * grid.refine_factor;
        const double next = boundary_max(norm_at, log_r1, refined);
        delta = next - value; // >= 0: the refined grid contains the old angles
        value = next;
        n = refined;
        if (delta <= grid.epsilon * std::max(value, 1e-300)) {
            converged = true;
            break;
        }
    }
    out.value = value;
    out.last_delta = delta;
    out.samples = n;
    out.converged = converged;
    return out;
}

} // namespace

NormResult sup_norm(const Section& s, const GridSpec& grid) {
    if (!s.bundle) throw validation_error("sup_norm: null bundle");
    const double log_r1 = s.bundle->annulus().log_r1();
    return refine_boundary_sup([&](cplx z) { return operator_norm(eval_strip(s, z)); }, log_r1,
                               grid);
}

double boundary_dominates(const Section& s, const GridSpec& grid) {
    if (!s.bundle) throw validation_error("boundary_dominates: null bundle");
    grid.validate();
    const double log_r1 = s.bundle->annulus().log_r1();
    const auto norm_at = [&](cplx z) { return operator_norm(eval_strip(s, z)); };

    const double boundary = boundary_max(norm_at, log_r1, grid.boundary_samples);
    double interior = 0.0;
    for (int i = 1; i <= grid.interior_radial; ++i) {
        const double x = log_r1 * i / (grid.interior_radial + 1); // strictly inside
        for (int j = 0; j < grid.interior_angular; ++j)
            interior = std::max(interior, norm_at(cplx(x, 2.0 * pi * j / grid.interior_angular)));
    }
    return interior - boundary;
}

NormResult complete_norm(const std::vector<std::vector<Section>>& blocks, const GridSpec& grid) {
    const std::size_t m = blocks.size();
    if (m == 0) throw validation_error("complete_norm: empty block matrix");
    for (const auto& row : blocks)
        if (row.size() != m) throw validation_error("complete_norm: block matrix must be square");
    const Section& first = blocks[0][0];
    if (!first.bundle) throw validation_error("complete_norm: null bundle");
    for (const auto& row : blocks)
        for (const Section& s : row) {
            if (!s.bundle || (s.bundle != first.bundle && !s.bundle->same_as(*first.bundle)))
                throw validation_error("complete_norm: blocks live over different bundles");
            if ((s.frame - first.frame).cwiseAbs().maxCoeff() > 1e-12)
                throw validation_error("complete_norm: blocks use different frames");
        }

    const int n = first.dim();
    const int mn = static_cast<int>(m) * n;
    const double log_r1 = first.bundle->annulus().log_r1();
    const auto norm_at = [&](cplx z) {
        Matrix big(mn, mn);
        for (std::size_t p = 0; p < m; ++p)
            for (std::size_t q = 0; q < m; ++q)
                big.block(static_cast<int>(p) * n, static_cast<int>(q) * n, n, n) =
                    eval_strip(blocks[p][q], z);
        return operator_norm(big);
    };
    return refine_boundary_sup(norm_at, log_r1, grid);
}

} // namespace bundlealg
