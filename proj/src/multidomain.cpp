#include "bundlealg/multidomain.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bundlealg/rng.hpp"

namespace bundlealg {

double check_commuting(const CommutingTuple& tuple) {
    if (tuple.generators.empty()) throw validation_error("check_commuting: empty tuple");
    for (const Matrix& g : tuple.generators) {
        require_square(g, "check_commuting");
        if (g.rows() != tuple.dim())
            throw validation_error("check_commuting: generators have mixed dimensions");
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < tuple.generators.size(); ++i)
        for (std::size_t j = i + 1; j < tuple.generators.size(); ++j) {
            const Matrix& a = tuple.generators[i];
            const Matrix& b = tuple.generators[j];
            worst = std::max(worst, operator_norm(a * b - b * a));
        }
    return worst;
}

JointSpectrum simultaneous_diagonalize(const CommutingTuple& tuple, const JointDiagOptions& opts) {
    if (tuple.generators.empty())
        throw validation_error("simultaneous_diagonalize: empty tuple");
    const int n = tuple.dim();
    const int g = tuple.size();
    for (const Matrix& gen : tuple.generators)
        if (!check_unitary(gen, opts.unitarity_tol))
            throw validation_error("simultaneous_diagonalize: generator is not unitary");
    if (g > 1) {
        const double comm = check_commuting(tuple);
        if (!(comm <= opts.commuting_tol))
            throw validation_error("simultaneous_diagonalize: generators do not commute (defect " +
                                   std::to_string(comm) + ")");
    }

    std::vector<Matrix> re(static_cast<std::size_t>(g)), im(static_cast<std::size_t>(g));
    for (int i = 0; i < g; ++i) {
        const Matrix& a = tuple.generators[static_cast<std::size_t>(i)];
        re[static_cast<std::size_t>(i)] = 0.5 * (a + a.adjoint());
        im[static_cast<std::size_t>(i)] = cplx(0, -0.5) * (a - a.adjoint());
    }

    Matrix basis = Matrix::Identity(n, n);
    detail::ClusterRanges ranges{{0, n}};
    const double coarse = std::max(1e-4, opts.cluster_tol);
    if (g > 1) {
        // Generic random-weight combination splits everything separable in
        // one sweep; the per-generator sweeps below are the certified part.
        Rng rng(opts.weight_seed);
        Matrix mix = Matrix::Zero(n, n);
        for (int i = 0; i < g; ++i)
            mix += rng.gaussian() * re[static_cast<std::size_t>(i)] +
                   rng.gaussian() * im[static_cast<std::size_t>(i)];
        detail::refine_clusters(basis, ranges, mix, coarse);
    }
    for (int i = 0; i < g; ++i) {
        detail::refine_clusters(basis, ranges, re[static_cast<std::size_t>(i)], coarse);
        detail::refine_clusters(basis, ranges, im[static_cast<std::size_t>(i)], coarse);
    }
    for (int i = 0; i < g; ++i) {
        detail::refine_clusters(basis, ranges, re[static_cast<std::size_t>(i)], opts.cluster_tol);
        detail::refine_clusters(basis, ranges, im[static_cast<std::size_t>(i)], opts.cluster_tol);
    }

    std::vector<Vector> joint(static_cast<std::size_t>(n), Vector(g));
    for (int c = 0; c < n; ++c)
        for (int i = 0; i < g; ++i) {
            const cplx r = basis.col(c).dot(tuple.generators[static_cast<std::size_t>(i)] * basis.col(c));
            joint[static_cast<std::size_t>(c)](i) = (std::abs(r) > 0.0) ? r / std::abs(r) : cplx(1, 0);
        }

    // Order columns lexicographically by per-generator argument keys;
    // inside a run of joint-equal columns (every generator within the
    // cluster tolerance) order by dominant-component index, the same
    // tie-break as eig_unitary.
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        for (int i = 0; i < g; ++i) {
            const double ka = argument_sort_key(joint[static_cast<std::size_t>(a)](i));
            const double kb = argument_sort_key(joint[static_cast<std::size_t>(b)](i));
            if (ka != kb) return ka < kb;
        }
        return false;
    });
    const auto joint_close = [&](int a, int b) {
        for (int i = 0; i < g; ++i)
            if (std::abs(joint[static_cast<std::size_t>(a)](i) -
                         joint[static_cast<std::size_t>(b)](i)) >= opts.cluster_tol)
                return false;
        return true;
    };
    for (int lo = 0; lo < n;) {
        int hi = lo + 1;
        while (hi < n && joint_close(order[static_cast<std::size_t>(hi)],
                                     order[static_cast<std::size_t>(hi - 1)]))
            ++hi;
        std::stable_sort(order.begin() + lo, order.begin() + hi, [&](int a, int b) {
            return detail::dominant_index(basis.col(a)) < detail::dominant_index(basis.col(b));
        });
        lo = hi;
    }

    JointSpectrum spec;
    spec.generators = g;
    spec.vectors.resize(n, n);
    spec.joint_values.resize(static_cast<std::size_t>(n));
    for (int c = 0; c < n; ++c) {
        spec.vectors.col(c) = basis.col(order[static_cast<std::size_t>(c)]);
        spec.joint_values[static_cast<std::size_t>(c)] =
            joint[static_cast<std::size_t>(order[static_cast<std::size_t>(c)])];
    }
    detail::canonicalize_column_phases(spec.vectors);

    for (int i = 0; i < g; ++i) {
        Vector diag(n);
        for (int c = 0; c < n; ++c) diag(c) = spec.joint_values[static_cast<std::size_t>(c)](i);
        const double residual = operator_norm(
            spec.vectors.adjoint() * tuple.generators[static_cast<std::size_t>(i)] * spec.vectors -
            Matrix(diag.asDiagonal()));
        if (!(residual <= 1e-8))
            throw numerical_error("simultaneous_diagonalize: residual " + std::to_string(residual) +
                                  " exceeds 1e-8 for generator " + std::to_string(i));
    }
    return spec;
}

namespace {

// Greedy alignment of the full joint multisets under a fixed phase vector:
// j matches the unused column minimizing the worst per-generator distance.
std::optional<std::vector<int>> match_joint(const JointSpectrum& a, const JointSpectrum& b,
                                            const Vector& rot, double tol) {
    const int n = static_cast<int>(a.joint_values.size());
    const int g = a.generators;
    std::vector<int> perm(static_cast<std::size_t>(n), -1);
    std::vector<bool> used(static_cast<std::size_t>(n), false);
    for (int j = 0; j < n; ++j) {
        int best = -1;
        double best_d = tol;
        for (int k = 0; k < n; ++k) {
            if (used[static_cast<std::size_t>(k)]) continue;
            double d = 0.0;
            for (int i = 0; i < g; ++i)
                d = std::max(d, std::abs(rot(i) * a.value(j, i) - b.value(k, i)));
            // Strict improvement keeps the first unused column on ties, so
            // identical joint spectra map by the identity permutation.
            if (best < 0 ? d <= best_d : d < best_d) {
                best_d = d;
                best = k;
            }
        }
        if (best < 0) return std::nullopt;
        used[static_cast<std::size_t>(best)] = true;
        perm[static_cast<std::size_t>(j)] = best;
    }
    return perm;
}

} // namespace

TupleEquivalenceReport tuple_pu_equivalent(const CommutingTuple& a, const CommutingTuple& b,
                                           const DecisionOptions& opts) {
    if (a.size() != b.size())
        throw validation_error("tuple_pu_equivalent: tuples have different lengths");
    if (a.size() == 0) throw validation_error("tuple_pu_equivalent: empty tuples");
    if (!(opts.tol > 0.0)) throw validation_error("tuple_pu_equivalent: tolerance must be positive");

    JointDiagOptions jopts;
    const JointSpectrum ja = simultaneous_diagonalize(a, jopts);
    const JointSpectrum jb = simultaneous_diagonalize(b, jopts);

    TupleEquivalenceReport report;
    const int g = a.size();
    const auto per_generator_form = [&](const CommutingTuple& t) {
        std::vector<std::vector<double>> forms;
        for (const Matrix& gen : t.generators) {
            const UnitarySpectrum s = eig_unitary(gen);
            forms.push_back(canonical_phase_form({s.eigenvalues.data(),
                                                  s.eigenvalues.data() + s.eigenvalues.size()}));
        }
        return forms;
    };
    report.invariantA = per_generator_form(a);
    report.invariantB = per_generator_form(b);

    if (a.dim() != b.dim()) {
        report.verdict = Verdict::not_equivalent;
        return report;
    }
    const int n = a.dim();
    const double match_tol = 4.0 * opts.tol;

    for (int k = 0; k < n; ++k) {
        Vector rot(g);
        for (int i = 0; i < g; ++i) {
            if (opts.strict) {
                rot(i) = cplx(1.0, 0.0);
            } else {
                rot(i) = jb.value(k, i) / ja.value(0, i);
            }
        }
        const auto perm = match_joint(ja, jb, rot, match_tol);
        if (!perm) {
            if (opts.strict) break; // one candidate only
            continue;
        }
        Matrix v = Matrix::Zero(n, n);
        for (int j = 0; j < n; ++j)
            v += jb.vectors.col((*perm)[static_cast<std::size_t>(j)]) *
                 ja.vectors.col(j).adjoint();

        std::vector<cplx> lambdas(static_cast<std::size_t>(g));
        double residual = 0.0;
        for (int i = 0; i < g; ++i) {
            const cplx lam = std::conj(rot(i)); // V A_i V* = conj(rot_i) B_i on the matched basis
            lambdas[static_cast<std::size_t>(i)] = lam;
            residual = std::max(
                residual,
                operator_norm(v * a.generators[static_cast<std::size_t>(i)] * v.adjoint() -
                              lam * b.generators[static_cast<std::size_t>(i)]));
        }
        if (residual <= opts.tol) {
            report.verdict = Verdict::equivalent;
            report.lambdas = std::move(lambdas);
            report.witness = std::move(v);
            report.residual = residual;
            return report;
        }
        if (opts.strict) break;
    }
    report.verdict = Verdict::not_equivalent;
    return report;
}

} // namespace bundlealg
