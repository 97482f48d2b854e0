#include "doctest.h"

#include <cmath>
#include <numbers>

#include "bundlealg/rng.hpp"
#include "bundlealg/sections.hpp"

using namespace bundlealg;

namespace {

constexpr double pi = std::numbers::pi;

Matrix diag2(cplx a, cplx b) {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = a;
    m(1, 1) = b;
    return m;
}

BundlePtr bundle_1i() { return make_bundle(diag2(1.0, cplx(0, 1)), 2.0); }

// Reference check used throughout: section operations must agree with the
// plain matrix operations on evaluated values.
void check_pointwise(const Section& got, const Section& a, const Section& b,
                     Matrix (*op)(const Matrix&, const Matrix&)) {
    for (const cplx z : strip_grid(got.bundle->annulus(), 4, 5)) {
        const Matrix want = op(eval_strip(a, z), eval_strip(b, z));
        CHECK(operator_norm(eval_strip(got, z) - want) <= 1e-10);
    }
}

Matrix mat_add(const Matrix& x, const Matrix& y) { return x + y; }
Matrix mat_mul(const Matrix& x, const Matrix& y) { return x * y; }

} // namespace

TEST_CASE("modulus-automorphic entries evaluate Laurent sums") {
    ModAutoEntry e;
    e.K = -0.25;
    e.laurent[0] = 1.0;
    const cplx z(std::log(2.0), 0.7);
    CHECK(std::abs(e.eval(z) - std::exp(-0.25 * z)) <= 1e-14);

    // Rebasing moves bookkeeping, not the function.
    const ModAutoEntry shifted = e.rebased(e.K - 1.0, 1);
    CHECK(shifted.K == doctest::Approx(-1.25));
    CHECK(std::abs(shifted.eval(z) - e.eval(z)) <= 1e-13);

    ModAutoEntry zero;
    zero.K = 0.5;
    CHECK(zero.is_zero());
    CHECK(std::abs(zero.eval(z)) == 0.0);

    ModAutoEntry padded;
    padded.laurent[2] = 0.0;
    padded.laurent[-1] = 1.0;
    prune(padded);
    CHECK(padded.laurent.size() == 1);
}

TEST_CASE("empty section sits at the bundle exponents") {
    const auto b = bundle_1i();
    const Section s = empty_section(b);
    CHECK(s.dim() == 2);
    for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k) {
            CHECK(s.entry(j, k).is_zero());
            CHECK(s.entry(j, k).K == b->exponent(j, k));
        }
    CHECK(operator_norm(eval_strip(s, cplx(0.1, 0.2))) == 0.0);
}

TEST_CASE("diagonal family is constant") {
    const auto b = bundle_1i();
    Vector d(2);
    d << cplx(2, 0), cplx(3, 0);
    const Section s = family_d(b, d);
    const Matrix at0 = eval_strip(s, cplx(0, 0));
    const Matrix at1 = eval_strip(s, cplx(0.3, 5.0));
    CHECK(operator_norm(at0 - at1) <= 1e-14);
    CHECK(concomitant_residual(s) <= 1e-9);

    Vector wrong(3);
    wrong << cplx(1, 0), cplx(1, 0), cplx(1, 0);
    CHECK_THROWS_AS(family_d(b, wrong), validation_error);
}

TEST_CASE("single-exponential family: fixed entry function") {
    const auto b = bundle_1i();
    Matrix c = Matrix::Zero(2, 2);
    c(0, 1) = 1.0;
    const Section s = family_c(b, c);

    // Exponent table says entry (0,1) carries e^{-z/4}.
    CHECK(s.entry(0, 1).K == doctest::Approx(-0.25));
    const cplx z(std::log(2.0), 0.0);
    const Matrix f = eval_strip(s, z);
    CHECK(std::abs(f(0, 1) - std::pow(2.0, -0.25)) <= 1e-12);
    CHECK(std::abs(f(0, 0)) == 0.0);
    CHECK(std::abs(f(1, 0)) == 0.0);
    CHECK(concomitant_residual(s) <= 1e-9);

    Matrix bad = Matrix::Identity(2, 2);
    CHECK_THROWS_AS(family_c(b, bad), validation_error);
}

TEST_CASE("scalar sections are central and equal p(w) I") {
    const auto b = bundle_1i();
    const std::map<int, cplx> p{{1, cplx(1, 0)}, {-1, cplx(0.5, 0)}, {0, cplx(0, 2)}};
    const Section s = scalar_section(b, p);
    for (const cplx z : strip_grid(b->annulus(), 3, 4)) {
        const cplx w = std::exp(z);
        const cplx want = w + 0.5 / w + cplx(0, 2);
        CHECK(operator_norm(eval_strip(s, z) - want * Matrix::Identity(2, 2)) <= 1e-12);
    }
    // Central: commutes with a non-scalar section.
    const Section other = random_section(b, 2, 99);
    const Section left = multiply(s, other);
    const Section right = multiply(other, s);
    for (const cplx z : strip_grid(b->annulus(), 3, 3))
        CHECK(operator_norm(eval_strip(left, z) - eval_strip(right, z)) <= 1e-10);
}

TEST_CASE("random sections are reproducible and concomitant") {
    const auto b = bundle_1i();
    const Section s1 = random_section(b, 3, 42);
    const Section s2 = random_section(b, 3, 42);
    const Section s3 = random_section(b, 3, 43);
    for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k) {
            CHECK(s1.entry(j, k).K == s2.entry(j, k).K);
            CHECK(s1.entry(j, k).laurent == s2.entry(j, k).laurent);
        }
    bool any_diff = false;
    for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k)
            if (s1.entry(j, k).laurent != s3.entry(j, k).laurent) any_diff = true;
    CHECK(any_diff);
    CHECK(concomitant_residual(s1) <= 1e-9);
}

TEST_CASE("concomitant identity holds across dimensions and families") {
    for (int n = 1; n <= 4; ++n) {
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            Rng rng(seed * 1000 + static_cast<std::uint64_t>(n));
            const auto b = make_bundle(random_unitary(n, rng), 2.0);
            CAPTURE(n);
            CAPTURE(seed);

            Vector d(n);
            for (int i = 0; i < n; ++i) d(i) = rng.gaussian_cplx();
            CHECK(concomitant_residual(family_d(b, d)) <= 1e-9);

            Matrix c(n, n);
            for (int r = 0; r < n; ++r)
                for (int cc = 0; cc < n; ++cc) c(r, cc) = r == cc ? cplx(0, 0) : rng.gaussian_cplx();
            CHECK(concomitant_residual(family_c(b, c)) <= 1e-9);

            CHECK(concomitant_residual(random_section(b, 3, seed)) <= 1e-9);
        }
    }
}

TEST_CASE("algebra operations match pointwise matrix operations") {
    Rng rng(77);
    const auto b = make_bundle(random_unitary(3, rng), 2.0);
    const Section x = random_section(b, 2, 7);
    const Section y = random_section(b, 2, 8);

    check_pointwise(add(x, y), x, y, mat_add);
    check_pointwise(multiply(x, y), x, y, mat_mul);

    const Section sx = scale(x, cplx(0, 2));
    for (const cplx z : strip_grid(b->annulus(), 3, 3))
        CHECK(operator_norm(eval_strip(sx, z) - cplx(0, 2) * eval_strip(x, z)) <= 1e-12);
}

TEST_CASE("products conform to the exponent table exactly") {
    // Spectrum chosen so some entry chains drift by a full integer.
    Vector eigs(3);
    eigs << std::polar(1.0, 0.9 * pi), std::polar(1.0, -0.9 * pi), cplx(1.0, 0.0);
    Rng rng(13);
    const auto b = make_bundle(random_unitary_with_spectrum(eigs, rng), 2.0);
    const Section x = random_section(b, 2, 21);
    const Section y = random_section(b, 2, 22);
    const Section p = multiply(x, y);
    for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) CHECK(p.entry(j, k).K == b->exponent(j, k));
    CHECK(concomitant_residual(p) <= 1e-9);
    check_pointwise(p, x, y, mat_mul);
}

TEST_CASE("sections over different bundles or frames do not mix") {
    Rng rng(31);
    const auto b1 = make_bundle(random_unitary(2, rng), 2.0);
    const auto b2 = make_bundle(random_unitary(2, rng), 2.0);
    CHECK_THROWS_AS(add(random_section(b1, 1, 1), random_section(b2, 1, 1)),
                    validation_error);
    CHECK_THROWS_AS(multiply(random_section(b1, 1, 1), random_section(b2, 1, 1)),
                    validation_error);
}

TEST_CASE("corrupted exponents are detected, not silently folded") {
    const auto b = bundle_1i();
    Section s = random_section(b, 1, 5);
    s.entry(0, 1).K += 0.3; // no longer an integer away from the table
    CHECK_THROWS_AS(multiply(s, s), validation_error);
}

TEST_CASE("deck multiplier checks") {
    const auto b = bundle_1i();
    Matrix c = Matrix::Zero(2, 2);
    c(0, 1) = cplx(1.5, -0.5);
    const Section s = family_c(b, c);
    const Vector& a = b->spectrum().eigenvalues;

    const auto good = multiplier_check(s.entry(0, 1), a(0) * std::conj(a(1)),
                                       b->annulus().log_r1());
    CHECK(good.residual <= 1e-12);
    CHECK(good.modulus_residual <= 1e-12);

    ModAutoEntry corrupted = s.entry(0, 1);
    corrupted.K += 0.1;
    const auto bad = multiplier_check(corrupted, a(0) * std::conj(a(1)),
                                      b->annulus().log_r1());
    CHECK(bad.residual > 1e-2);
    CHECK(bad.modulus_residual <= 1e-12); // modulus is automorphic regardless
}

TEST_CASE("frame changes conjugate values and preserve concomitance") {
    Rng rng(17);
    const auto b = make_bundle(random_unitary(3, rng), 2.0);
    const Matrix t = random_unitary(3, rng);
    const Section s = random_section(b, 2, 3);
    const Section moved = to_frame(s, t);

    CHECK(moved.bundle->same_as(*b->conjugated(t)));
    for (const cplx z : strip_grid(b->annulus(), 3, 4))
        CHECK(operator_norm(eval_strip(moved, z) -
                            t.adjoint() * eval_strip(s, z) * t) <= 1e-10);
    CHECK(concomitant_residual(moved) <= 1e-9);
}

TEST_CASE("annulus evaluation goes through chart branches") {
    const auto b = bundle_1i();
    const Section s = random_section(b, 2, 11);
    const auto charts = atlas(b->annulus(), 4);

    const cplx w1 = std::polar(1.5, 0.1);
    CHECK(operator_norm(eval_annulus(s, w1, charts[0]) -
                        eval_strip(s, std::log(w1))) <= 1e-12);

    // Same point through two overlapping charts: values agree after the
    // transition action (here chart 3 vs chart 0 across the cut).
    const cplx w2 = std::polar(1.2, 7.0 * pi / 4.0);
    const long k = transition(*b, charts[3], charts[0], w2);
    REQUIRE(k == 1);
    const Matrix ak = b->deck_matrix(k);
    CHECK(operator_norm(eval_annulus(s, w2, charts[3]) -
                        ak * eval_annulus(s, w2, charts[0]) * ak.adjoint()) <= 1e-10);

    CHECK_THROWS_AS(eval_annulus(s, cplx(10.0, 0.0), charts[0]), validation_error);
}

TEST_CASE("strip grid shape") {
    const Annulus ann(2.0);
    const auto g = strip_grid(ann, 3, 4);
    REQUIRE(g.size() == 12);
    CHECK(g.front().real() == doctest::Approx(0.0));
    // Re endpoints inclusive, Im half-open.
    double max_re = 0.0, max_im = 0.0;
    for (const cplx z : g) {
        max_re = std::max(max_re, z.real());
        max_im = std::max(max_im, z.imag());
    }
    CHECK(max_re == doctest::Approx(std::log(2.0)));
    CHECK(max_im == doctest::Approx(2.0 * pi * 3.0 / 4.0));
    CHECK_THROWS_AS(strip_grid(ann, 0, 4), validation_error);
}

TEST_CASE("evaluation outside the strip is rejected") {
    const auto b = bundle_1i();
    const Section s = family_d(b, Vector::Ones(2));
    CHECK_THROWS_AS(eval_strip(s, cplx(1.0, 0.0)), validation_error);
    CHECK_THROWS_AS(eval_strip(s, cplx(-0.1, 0.0)), validation_error);
}
