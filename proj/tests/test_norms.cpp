#include "doctest.h"

#include <cmath>

#include "bundlealg/norms.hpp"
#include "bundlealg/rng.hpp"

using namespace bundlealg;

namespace {

Matrix diag2(cplx a, cplx b) {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = a;
    m(1, 1) = b;
    return m;
}

BundlePtr bundle_1i() { return make_bundle(diag2(1.0, cplx(0, 1)), 2.0); }

} // namespace

TEST_CASE("grid spec validation") {
    GridSpec g;
    CHECK_NOTHROW(g.validate());
    g.boundary_samples = 8;
    CHECK_THROWS_AS(g.validate(), validation_error);
    g = GridSpec{};
    g.refine_factor = 1;
    CHECK_THROWS_AS(g.validate(), validation_error);
    g = GridSpec{};
    g.epsilon = 0.0;
    CHECK_THROWS_AS(g.validate(), validation_error);
}

TEST_CASE("sup norm fixed values") {
    const auto b = bundle_1i();
    SUBCASE("scalar w attains r1") {
        const Section s = scalar_section(b, {{1, cplx(1, 0)}});
        const NormResult r = sup_norm(s);
        CHECK(r.value == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(r.converged);
    }
    SUBCASE("constant diagonal attains its largest entry") {
        Vector d(2);
        d << cplx(2, 0), cplx(3, 0);
        const NormResult r = sup_norm(family_d(b, d));
        CHECK(r.value == doctest::Approx(3.0).epsilon(1e-12));
        CHECK(r.converged);
    }
    SUBCASE("decaying exponential entry attains the inner circle") {
        // Entry function e^{-z/4}: modulus e^{-Re z/4}, largest at Re z = 0.
        Matrix c = Matrix::Zero(2, 2);
        c(0, 1) = 1.0;
        const NormResult r = sup_norm(family_c(b, c));
        CHECK(r.value == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("w + 1/w peaks at the outer circle's real axis") {
        const Section s = scalar_section(b, {{1, cplx(1, 0)}, {-1, cplx(1, 0)}});
        const NormResult r = sup_norm(s);
        CHECK(r.value == doctest::Approx(2.5).epsilon(1e-12));
    }
}

TEST_CASE("refinement is monotone from nested grids") {
    const auto b = bundle_1i();
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
        const Section s = random_section(b, 3, seed);
        GridSpec coarse;
        coarse.boundary_samples = 32;
        coarse.max_refinements = 0;
        GridSpec fine = coarse;
        fine.max_refinements = 4;
        const NormResult r0 = sup_norm(s, coarse);
        const NormResult r4 = sup_norm(s, fine);
        CAPTURE(seed);
        CHECK(r4.value >= r0.value);
        CHECK(r4.last_delta >= 0.0);
        CHECK(r4.samples >= r0.samples);
    }
}

TEST_CASE("norms are frame independent") {
    Rng rng(55);
    const auto b = make_bundle(random_unitary(3, rng), 2.0);
    const Matrix t = random_unitary(3, rng);
    const Section s = random_section(b, 2, 9);
    const Section moved = to_frame(s, t);
    const double lhs = sup_norm(s).value;
    const double rhs = sup_norm(moved).value;
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
}

TEST_CASE("boundary dominates interior for holomorphic sections") {
    for (std::uint64_t seed = 20; seed < 35; ++seed) {
        Rng rng(seed);
        const int n = 1 + static_cast<int>(rng.raw() % 4);
        const auto b = make_bundle(random_unitary(n, rng), 2.0);
        const Section s = random_section(b, 3, seed);
        CAPTURE(seed);
        CAPTURE(n);
        CHECK(boundary_dominates(s) <= 1e-6);
    }
}

TEST_CASE("complete norm block patterns") {
    const auto b = bundle_1i();
    const Section s = random_section(b, 2, 123);
    const Section zero = scale(s, 0.0);
    const double base = sup_norm(s).value;

    SUBCASE("diagonal direct sum keeps the level-1 norm") {
        const std::vector<std::vector<Section>> blocks{{s, zero}, {zero, s}};
        CHECK(complete_norm(blocks).value == doctest::Approx(base).epsilon(1e-12));
    }
    SUBCASE("scaling one block scales the norm") {
        const Section twice = scale(s, 2.0);
        const std::vector<std::vector<Section>> blocks{{zero, twice}, {zero, zero}};
        CHECK(complete_norm(blocks).value == doctest::Approx(2.0 * base).epsilon(1e-12));
    }
    SUBCASE("level 1 block equals sup_norm") {
        const std::vector<std::vector<Section>> blocks{{s}};
        CHECK(complete_norm(blocks).value == doctest::Approx(base).epsilon(1e-14));
    }
}

TEST_CASE("complete norm validates its block matrix") {
    const auto b = bundle_1i();
    const Section s = random_section(b, 1, 1);
    CHECK_THROWS_AS(complete_norm({}), validation_error);
    CHECK_THROWS_AS(complete_norm({{s}, {s}}), validation_error);

    Rng rng(2);
    const auto other = make_bundle(random_unitary(2, rng), 2.0);
    const Section t = random_section(other, 1, 1);
    CHECK_THROWS_AS(complete_norm({{s, t}, {t, s}}), validation_error);
}
