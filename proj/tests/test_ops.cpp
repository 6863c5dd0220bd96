#include <doctest.h>

#include <cmath>

#include "muskat/fields.hpp"
#include "muskat/ops.hpp"
#include "muskat/spectral.hpp"

using namespace muskat;

namespace {
const Grid g(64, 32.0);
const QuadratureSpec q = reference_quadrature();

RealField minus_D(const RealField& f) {
    return -1.0 * inverse(apply_multiplier(transform(f), abs_xi_power(f.grid, 1.0)));
}
double rel(const RealField& a, const RealField& b) { return l2_norm(a - b) / l2_norm(b); }
}  // namespace

TEST_CASE("finite differences") {
    const RealField f = gaussian(g, 1.0, 2.0, {16.0, 16.0});
    const Vec2 a{1.5, -0.5};
    const RealField d = delta(f, a);
    const RealField back = inverse(shift(transform(f), a));
    CHECK(max_abs(d - (f - back)) < 1e-14);
    CHECK(max_abs(slope(f, a) - (1.0 / std::hypot(1.5, 0.5)) * d) < 1e-14);
}

TEST_CASE("the nonlinearity linearizes to <D>") {
    const RealField f = gaussian(g, 1e-6, 2.0, {16.0, 16.0});
    const FieldResult r = muskat_rhs(f, q);
    CHECK(rel(r.value, minus_D(f)) < 1e-3);
    CHECK_FALSE(r.flags.flagged);
}

TEST_CASE("the right-hand side vanishes on zero data") {
    CHECK(max_abs(muskat_rhs(RealField(g), q).value) == 0.0);
}

TEST_CASE("decomposition closes") {
    const auto fam = random_family(g, 2, 7);
    for (const auto& f : fam) {
        const MuskatDecomposition d = decomposition(f, f, q);
        CHECK(d.residual < 1e-3);
        CHECK(rel(d.total, -1.0 * muskat_rhs(f, q).value) < 1e-12);
    }
}

TEST_CASE("remainder bound holds pointwise") {
    const BoundAudit a = remainder_bound_audit(random_family(g, 1, 11)[0], q);
    CHECK(a.samples > 0);
    CHECK(a.violations == 0);
}

TEST_CASE("divergence identity for the kernel") {
    const RealField f = gaussian(g, 1.0, 2.0, {16.0, 16.0});
    for (const Vec2 z : {Vec2{0.0, 0.0}, Vec2{1.0, 0.0}, Vec2{0.7, -0.7}})
        CHECK(kernel_identity_check(z, f, q).relerr < 1e-3);
}

TEST_CASE("weighted finite-difference Laplacian matches the spectral one for kappa = 1") {
    const RealField f = gaussian(g, 1.0, 2.0, {16.0, 16.0});
    const auto phi = PhiTable::for_grid(Weight::unit(), g);
    const RealField s = inverse(apply_multiplier(transform(f), phi->symbol(g, 1.5, 1)));
    CHECK(rel(weighted_fd_laplacian(f, Weight::unit(), q), s) < 1e-4);
}

TEST_CASE("Gagliardo seminorm of a single mode") {
    // m(xi) = 4 pi |xi| for s = 1/2; |cos(k.x)|^2 integrates to l^2 / 2
    RealField f(g);
    const double k = 2 * 3.141592653589793 * 2 / g.l;
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j) f(i, j) = std::cos(k * j * g.h());
    const double expect = std::sqrt(4 * 3.141592653589793 * k * g.l * g.l / 2);
    CHECK(gagliardo_seminorm(f, 0.5, q).value == doctest::Approx(expect).epsilon(1e-3));
}

TEST_CASE("discrete Leibniz rule") {
    const auto fam = random_family(g, 2, 3);
    CHECK(leibniz_audit(fam[0], fam[1], {0.37, -0.81}) < 1e-12);
}

TEST_CASE("drift is even and the equation is translation equivariant") {
    const RealField f = random_family(g, 1, 5)[0];
    const DriftResult a = drift(f, q), b = drift(-1.0 * f, q);
    CHECK(max_abs(a.v[0] - b.v[0]) <= 1e-12 * max_abs(a.v[0]));
    const Vec2 beta{4 * g.h(), -2 * g.h()};   // even shifts land on the padded lattice
    const RealField lhs = muskat_rhs(inverse(shift(transform(f), beta)), q).value;
    const RealField rhs = inverse(shift(transform(muskat_rhs(f, q).value), beta));
    CHECK(max_abs(lhs - rhs) < 1e-10 * max_abs(rhs));
}

TEST_CASE("quadrature spec validation names the field") {
    QuadratureSpec bad;
    bad.n_r = 2;
    CHECK_THROWS_WITH_AS(bad.validate(g), doctest::Contains("quad.n_r"), std::invalid_argument);
}
