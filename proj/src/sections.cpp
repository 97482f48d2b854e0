#include "bundlealg/sections.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "bundlealg/rng.hpp"

namespace bundlealg {

using std::numbers::pi;

cplx ModAutoEntry::eval(cplx z) const {
    cplx acc(0.0, 0.0);
    for (const auto& [m, c] : laurent) acc += c * std::exp((K + static_cast<double>(m)) * z);
    return acc;
}

ModAutoEntry ModAutoEntry::rebased(double new_K, int shift) const {
    ModAutoEntry out;
    out.K = new_K;
    for (const auto& [m, c] : laurent) out.laurent[m + shift] = c;
    return out;
}

void prune(ModAutoEntry& e) {
    for (auto it = e.laurent.begin(); it != e.laurent.end();) {
        if (it->second == cplx(0.0, 0.0))
            it = e.laurent.erase(it);
        else
            ++it;
    }
}

namespace {

void require_bundle(const BundlePtr& b, const char* who) {
    if (!b) throw validation_error(std::string(who) + ": null bundle");
}

void require_compatible(const Section& a, const Section& b, const char* who) {
    require_bundle(a.bundle, who);
    require_bundle(b.bundle, who);
    if (a.bundle != b.bundle && !a.bundle->same_as(*b.bundle))
        throw validation_error(std::string(who) + ": sections live over different bundles");
    if (a.frame.rows() != b.frame.rows() ||
        (a.frame - b.frame).cwiseAbs().maxCoeff() > 1e-12)
        throw validation_error(std::string(who) + ": sections are expressed in different frames");
}

} // namespace

Section empty_section(BundlePtr bundle) {
    require_bundle(bundle, "empty_section");
    Section s;
    s.frame = bundle->spectrum().vectors;
    const int n = bundle->dim();
    s.entries.resize(static_cast<std::size_t>(n) * n);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) s.entries[static_cast<std::size_t>(j * n + k)].K = bundle->exponent(j, k);
    s.bundle = std::move(bundle);
    return s;
}

Section family_d(BundlePtr bundle, const Vector& d) {
    require_bundle(bundle, "family_d");
    if (d.size() != bundle->dim())
        throw validation_error("family_d: diagonal length does not match the bundle dimension");
    if (!d.allFinite()) throw validation_error("family_d: non-finite diagonal");
    Section s = empty_section(std::move(bundle));
    for (int i = 0; i < d.size(); ++i) {
        if (d(i) != cplx(0.0, 0.0)) s.entry(i, i).laurent[0] = d(i);
    }
    return s;
}

Section family_c(BundlePtr bundle, const Matrix& c) {
    require_bundle(bundle, "family_c");
    const int n = bundle->dim();
    if (c.rows() != n || c.cols() != n)
        throw validation_error("family_c: coefficient matrix does not match the bundle dimension");
    if (!is_finite(c)) throw validation_error("family_c: non-finite coefficients");
    for (int i = 0; i < n; ++i)
        if (c(i, i) != cplx(0.0, 0.0))
            throw validation_error("family_c: diagonal coefficients must be zero");
    Section s = empty_section(std::move(bundle));
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
            if (j == k || c(j, k) == cplx(0.0, 0.0)) continue;
            s.entry(j, k).laurent[0] = c(j, k);
        }
    return s;
}

Section scalar_section(BundlePtr bundle, const std::map<int, cplx>& p) {
    require_bundle(bundle, "scalar_section");
    Section s = empty_section(std::move(bundle));
    const int n = s.dim();
    for (int i = 0; i < n; ++i) {
        s.entry(i, i).laurent = p;
        prune(s.entry(i, i));
    }
    return s;
}

Section random_section(BundlePtr bundle, int degree, std::uint64_t seed) {
    require_bundle(bundle, "random_section");
    if (degree < 0) throw validation_error("random_section: degree must be nonnegative");
    Section s = empty_section(std::move(bundle));
    Rng rng(seed);
    const int n = s.dim();
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
            for (int m = -degree; m <= degree; ++m) s.entry(j, k).laurent[m] = rng.gaussian_cplx();
    return s;
}

Matrix eval_strip(const Section& s, cplx z) {
    require_bundle(s.bundle, "eval_strip");
    if (!s.bundle->annulus().contains_strip(z, 1e-9))
        throw validation_error("eval_strip: point is outside the strip 0 <= Re z <= ln r1");
    const int n = s.dim();
    Matrix f(n, n);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) f(j, k) = s.entry(j, k).eval(z);
    return s.frame * f * s.frame.adjoint();
}

Matrix eval_adjoint(const Section& s, cplx z) {
    return eval_strip(s, z).adjoint();
}

Matrix eval_annulus(const Section& s, cplx w, const Chart& chart) {
    require_bundle(s.bundle, "eval_annulus");
    cplx z = chart.log_in(s.bundle->annulus(), w);
    // |w| may sit a rounding error outside [1, r1]; the chart already
    // accepted it, so clamp the real part onto the closed strip.
    const double hi = s.bundle->annulus().log_r1();
    z = {std::clamp(z.real(), 0.0, hi), z.imag()};
    return eval_strip(s, z);
}

Section add(const Section& a, const Section& b) {
    require_compatible(a, b, "add");
    Section out = a;
    const int n = out.dim();
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
            const ModAutoEntry& eb = b.entry(j, k);
            ModAutoEntry& ea = out.entry(j, k);
            if (!eb.is_zero()) {
                if (ea.is_zero())
                    ea.K = eb.K;
                else if (std::abs(ea.K - eb.K) > 1e-12)
                    throw validation_error("add: entry exponents disagree");
                for (const auto& [m, c] : eb.laurent) ea.laurent[m] += c;
            }
            prune(ea);
        }
    return out;
}

Section scale(const Section& a, cplx c) {
    require_bundle(a.bundle, "scale");
    Section out = a;
    for (ModAutoEntry& e : out.entries) {
        for (auto& [m, coef] : e.laurent) coef *= c;
        prune(e);
    }
    return out;
}

Section multiply(const Section& a, const Section& b) {
    require_compatible(a, b, "multiply");
    Section out = empty_section(a.bundle);
    out.frame = a.frame;
    const int n = out.dim();
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
            ModAutoEntry& acc = out.entry(j, k);
            for (int q = 0; q < n; ++q) {
                const ModAutoEntry& fa = a.entry(j, q);
                const ModAutoEntry& fb = b.entry(q, k);
                if (fa.is_zero() || fb.is_zero()) continue;
                // K[j][q] + K[q][k] - K[j][k] is an integer in exact
                // arithmetic; fold it into the Laurent index.
                const double drift = fa.K + fb.K - acc.K;
                const long d = std::lround(drift);
                if (std::abs(drift - static_cast<double>(d)) > 1e-9)
                    throw validation_error(
                        "multiply: non-integer exponent discrepancy (corrupted section data)");
                for (const auto& [m1, c1] : fa.laurent)
                    for (const auto& [m2, c2] : fb.laurent)
                        acc.laurent[m1 + m2 + static_cast<int>(d)] += c1 * c2;
            }
            prune(acc);
        }
    return out;
}

std::vector<cplx> strip_grid(const Annulus& ann, int re_samples, int im_samples) {
    if (re_samples < 1 || im_samples < 1)
        throw validation_error("strip_grid: sample counts must be positive");
    std::vector<cplx> pts;
    pts.reserve(static_cast<std::size_t>(re_samples) * im_samples);
    const double hi = ann.log_r1();
    for (int i = 0; i < re_samples; ++i) {
        const double x = (re_samples == 1) ? 0.0 : hi * i / (re_samples - 1);
        for (int j = 0; j < im_samples; ++j)
            pts.emplace_back(x, 2.0 * pi * j / im_samples);
    }
    return pts;
}

double concomitant_residual(const Section& s, int re_samples, int im_samples, int k_range) {
    require_bundle(s.bundle, "concomitant_residual");
    if (k_range < 0) throw validation_error("concomitant_residual: k_range must be nonnegative");
    const auto pts = strip_grid(s.bundle->annulus(), re_samples, im_samples);
    std::vector<Matrix> values;
    values.reserve(pts.size());
    for (const cplx& z : pts) values.push_back(eval_strip(s, z));

    double worst = 0.0;
    for (int k = -k_range; k <= k_range; ++k) {
        if (k == 0) continue;
        const Matrix ak = s.bundle->deck_matrix(k);
        const Matrix ak_inv = ak.adjoint();
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const Matrix shifted = eval_strip(s, pts[i] + cplx(0.0, 2.0 * pi * k));
            worst = std::max(worst, operator_norm(shifted - ak * values[i] * ak_inv));
        }
    }
    return worst;
}

MultiplierCheck multiplier_check(const ModAutoEntry& entry, cplx expected, double re_hi,
                                 int re_samples, int im_samples) {
    if (!(re_hi >= 0.0) || !std::isfinite(re_hi))
        throw validation_error("multiplier_check: invalid strip width");
    if (re_samples < 1 || im_samples < 1)
        throw validation_error("multiplier_check: sample counts must be positive");
    MultiplierCheck out;
    const cplx step(0.0, 2.0 * pi);
    for (int i = 0; i < re_samples; ++i) {
        const double x = (re_samples == 1) ? 0.0 : re_hi * i / (re_samples - 1);
        for (int j = 0; j < im_samples; ++j) {
            const cplx z(x, 2.0 * pi * j / im_samples);
            const cplx v0 = entry.eval(z);
            const cplx v1 = entry.eval(z + step);
            out.residual = std::max(out.residual, std::abs(v1 - expected * v0));
            out.modulus_residual =
                std::max(out.modulus_residual, std::abs(std::abs(v1) - std::abs(v0)));
        }
    }
    return out;
}

Section to_frame(const Section& s, const Matrix& t, double unitarity_tol) {
    require_bundle(s.bundle, "to_frame");
    Section out;
    out.bundle = s.bundle->conjugated(t, unitarity_tol);
    out.frame = UnitaryMatrix::checked(t, unitarity_tol).get().adjoint() * s.frame;
    out.entries = s.entries;
    return out;
}

} // namespace bundlealg
