#include "bundlealg/isomorphism.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include <Eigen/SVD>

#include "bundlealg/rng.hpp"

namespace bundlealg {

using std::numbers::pi;

namespace {

// Index clusters of a sorted unit-modulus spectrum, grouped at gap_tol by
// chordal distance; the first and last runs merge when the spectrum wraps
// across the argument branch cut.
std::vector<std::vector<int>> spectrum_clusters(const Vector& evals, double gap_tol) {
    const int n = static_cast<int>(evals.size());
    std::vector<std::vector<int>> groups;
    for (int i = 0; i < n; ++i) {
        if (!groups.empty() &&
            std::abs(evals(i) - evals(groups.back().back())) < gap_tol)
            groups.back().push_back(i);
        else
            groups.push_back({i});
    }
    if (groups.size() > 1 &&
        std::abs(evals(groups.front().front()) - evals(groups.back().back())) < gap_tol) {
        for (int idx : groups.back()) groups.front().push_back(idx);
        groups.pop_back();
    }
    return groups;
}

struct Extraction {
    std::vector<int> perm;
    std::vector<cplx> phases;
    double residual = 0.0;
};

// Reads a permutation-times-phases structure off a unitary M, or reports
// the worst deviation when M has none within tol.
std::optional<Extraction> extract_permutation(const Matrix& m, double tol) {
    const int n = static_cast<int>(m.rows());
    Extraction out;
    out.perm.assign(n, -1);
    out.phases.assign(n, cplx(1.0, 0.0));
    std::vector<bool> used(n, false);
    for (int j = 0; j < n; ++j) {
        int top = 0;
        for (int k = 1; k < n; ++k)
            if (std::abs(m(k, j)) > std::abs(m(top, j))) top = k;
        if (used[top] || std::abs(std::abs(m(top, j)) - 1.0) > tol) return std::nullopt;
        used[top] = true;
        out.perm[j] = top;
        out.phases[j] = m(top, j) / std::abs(m(top, j));
        for (int k = 0; k < n; ++k) {
            const double dev = (k == top) ? std::abs(m(k, j) - out.phases[j]) : std::abs(m(k, j));
            out.residual = std::max(out.residual, dev);
        }
        if (out.residual > tol) return std::nullopt;
    }
    return out;
}

} // namespace

InducedMap induced_map(BundlePtr source, BundlePtr target, const Matrix& v, cplx lambda,
                       const InducedMapOptions& opts) {
    if (!source || !target) throw validation_error("induced_map: null bundle");
    if (source->dim() != target->dim())
        throw validation_error("induced_map: bundles have different fibre dimensions");
    if (source->annulus().r1 != target->annulus().r1)
        throw validation_error("induced_map: bundles live over different annuli");
    UnitaryMatrix vu = UnitaryMatrix::checked(v);
    if (vu.dim() != source->dim())
        throw validation_error("induced_map: witness dimension does not match the bundles");
    if (std::abs(std::abs(lambda) - 1.0) > 1e-9)
        throw validation_error("induced_map: lambda must be unimodular");

    InducedMap map;
    map.source = source;
    map.target = target;
    map.witness = vu.get();
    map.lambda = lambda;
    map.witness_residual =
        operator_norm(map.witness * source->generator() * map.witness.adjoint() -
                      lambda * target->generator());
    if (!(map.witness_residual <= opts.decision_tol))
        throw validation_error("induced_map: witness residual " +
                               std::to_string(map.witness_residual) +
                               " exceeds the decision tolerance");

    map.target_frame = target->spectrum().vectors;
    Matrix m = map.target_frame.adjoint() * map.witness * source->spectrum().vectors;

    auto extracted = extract_permutation(m, opts.frame_tol);
    if (!extracted) {
        // Degenerate-eigenspace misalignment: rotate the target frame inside
        // each eigenvalue cluster by the polar factor of the witness block.
        map.realigned = true;
        const auto clusters = spectrum_clusters(source->spectrum().eigenvalues, opts.cluster_tol);
        const int n = source->dim();
        for (const auto& cluster : clusters) {
            if (cluster.size() < 2) continue;
            const int len = static_cast<int>(cluster.size());
            Matrix cols(n, len);
            for (int i = 0; i < len; ++i) cols.col(i) = m.col(cluster[static_cast<std::size_t>(i)]);
            // Rows carrying the image of this eigenspace: the |cluster|
            // largest row masses of the block.
            std::vector<int> rows(n);
            std::iota(rows.begin(), rows.end(), 0);
            std::stable_sort(rows.begin(), rows.end(), [&](int p, int q) {
                return cols.row(p).squaredNorm() > cols.row(q).squaredNorm();
            });
            rows.resize(static_cast<std::size_t>(len));
            std::sort(rows.begin(), rows.end());
            Matrix block(len, len);
            for (int i = 0; i < len; ++i) block.row(i) = cols.row(rows[static_cast<std::size_t>(i)]);
            Eigen::JacobiSVD<Matrix> svd(block, Eigen::ComputeFullU | Eigen::ComputeFullV);
            const Matrix q = svd.matrixU() * svd.matrixV().adjoint(); // polar unitary factor
            for (int i = 0; i < len; ++i) {
                Vector combo = Vector::Zero(n);
                for (int t = 0; t < len; ++t)
                    combo += q(t, i) * map.target_frame.col(rows[static_cast<std::size_t>(t)]);
                // placed back below through a temp to avoid aliasing
                cols.col(i) = combo;
            }
            for (int i = 0; i < len; ++i)
                map.target_frame.col(rows[static_cast<std::size_t>(i)]) = cols.col(i);
        }
        m = map.target_frame.adjoint() * map.witness * source->spectrum().vectors;
        extracted = extract_permutation(m, opts.frame_tol);
        if (!extracted)
            throw numerical_error(
                "induced_map: frame alignment failed even after cluster realignment");
    }
    map.perm = extracted->perm;
    map.phases = extracted->phases;
    map.alignment_residual = extracted->residual;
    return map;
}

Section apply(const InducedMap& map, const Section& s) {
    if (!s.bundle) throw validation_error("apply: section has no bundle");
    if (s.bundle != map.source && !s.bundle->same_as(*map.source))
        throw validation_error("apply: section lives over a different bundle than the map source");
    if ((s.frame - map.source->spectrum().vectors).cwiseAbs().maxCoeff() > 1e-9)
        throw validation_error("apply: section frame does not match the map's source frame");

    const int n = map.source->dim();
    Section out = empty_section(map.target);
    out.frame = map.target_frame;
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
            const ModAutoEntry& e = s.entry(j, k);
            if (e.is_zero()) continue;
            const int pj = map.perm[static_cast<std::size_t>(j)];
            const int pk = map.perm[static_cast<std::size_t>(k)];
            const double target_K = map.target->exponent(pj, pk);
            const double drift = e.K - target_K;
            const long d = std::lround(drift);
            if (std::abs(drift - static_cast<double>(d)) > 1e-9)
                throw numerical_error("apply: non-integer exponent drift between the bundles");
            ModAutoEntry moved = e.rebased(target_K, static_cast<int>(d));
            const cplx factor = map.phases[static_cast<std::size_t>(j)] *
                                std::conj(map.phases[static_cast<std::size_t>(k)]);
            for (auto& [mm, cc] : moved.laurent) cc *= factor;
            prune(moved);
            out.entry(pj, pk) = std::move(moved);
        }
    return out;
}

std::vector<double> verify_isometry(const InducedMap& map, int levels, const GridSpec& grid,
                                    std::uint64_t seed) {
    if (levels < 1) throw validation_error("verify_isometry: levels must be >= 1");
    GridSpec fixed = grid;
    fixed.max_refinements = 0; // both norms must see the identical grid
    std::vector<double> deviations;
    deviations.reserve(static_cast<std::size_t>(levels));
    std::uint64_t stream = seed;
    for (int level = 1; level <= levels; ++level) {
        std::vector<std::vector<Section>> block, mapped;
        for (int p = 0; p < level; ++p) {
            block.emplace_back();
            mapped.emplace_back();
            for (int q = 0; q < level; ++q) {
                Section s = random_section(map.source, 2, stream++);
                mapped.back().push_back(apply(map, s));
                block.back().push_back(std::move(s));
            }
        }
        const double orig = complete_norm(block, fixed).value;
        const double image = complete_norm(mapped, fixed).value;
        deviations.push_back(std::abs(image - orig));
    }
    return deviations;
}

double verify_center(const InducedMap& map, int re_samples, int im_samples) {
    // p = 1, w, w^2, 1/w, 3w^2 - w^{-1} + 2
    const std::vector<std::map<int, cplx>> polys = {
        {{0, {1.0, 0.0}}},
        {{1, {1.0, 0.0}}},
        {{2, {1.0, 0.0}}},
        {{-1, {1.0, 0.0}}},
        {{2, {3.0, 0.0}}, {-1, {-1.0, 0.0}}, {0, {2.0, 0.0}}},
    };
    const int n = map.source->dim();
    const Matrix eye = Matrix::Identity(n, n);
    const auto pts = strip_grid(map.source->annulus(), re_samples, im_samples);
    double worst = 0.0;
    for (const auto& p : polys) {
        const Section image = apply(map, scalar_section(map.source, p));
        for (const cplx& z : pts) {
            cplx pz(0.0, 0.0);
            for (const auto& [m, c] : p) pz += c * std::exp(static_cast<double>(m) * z);
            worst = std::max(worst, operator_norm(eval_strip(image, z) - pz * eye));
        }
    }
    return worst;
}

ClassificationReport classify_pair(const Matrix& a, const Matrix& b, double r1,
                                   const ClassifyOptions& opts) {
    BundlePtr source = make_bundle(a, r1, opts.unitarity_tol);
    BundlePtr target = make_bundle(b, r1, opts.unitarity_tol);

    DecisionOptions dec;
    dec.tol = opts.tol;
    dec.strict = opts.strict;

    ClassificationReport report;
    report.strict_mode = opts.strict;
    report.equivalence = pu_equivalent(*source, *target, dec);
    if (report.equivalence.verdict != Verdict::equivalent) return report;

    InducedMapOptions mopts;
    mopts.decision_tol = std::max(opts.tol, report.equivalence.residual * 2.0);
    const InducedMap map = induced_map(source, target, *report.equivalence.witness,
                                       report.equivalence.lambda, mopts);

    report.isometry_deviation = verify_isometry(map, opts.levels, opts.grid, opts.seed);
    report.center_residual = verify_center(map);

    double conc = 0.0;
    for (int i = 0; i < 3; ++i) {
        const Section s = random_section(source, 2, opts.seed + 101 + static_cast<std::uint64_t>(i));
        conc = std::max(conc, concomitant_residual(apply(map, s)));
    }
    report.mapped_concomitant_residual = conc;
    return report;
}

} // namespace bundlealg
