#include <doctest.h>

#include <cmath>

#include "muskat/diagnostics.hpp"
#include "muskat/fields.hpp"
#include "muskat/ops.hpp"

using namespace muskat;

namespace {
const Grid g(64, 32.0);
const QuadratureSpec q = reference_quadrature();

double constant(DifferenceOrder o, double b, const Vec2& xi = {0.8, -0.6}) {
    KernelSpec k;
    k.order = o;
    k.b = b;
    const double r = std::hypot(xi[0], xi[1]);
    return difference_kernel_multiplier(k, xi).m / std::pow(r, 2.0 * b);
}
}  // namespace

TEST_CASE("unweighted kernel multipliers match closed forms") {
    // Gamma-function closed forms of the radial integrals times int |cos|^{2b}
    CHECK(constant(DifferenceOrder::First, 0.5) == doctest::Approx(12.566370614359173).epsilon(1e-9));
    CHECK(constant(DifferenceOrder::First, 0.75) == doctest::Approx(11.684486405863888).epsilon(1e-9));
    CHECK(constant(DifferenceOrder::Second, 1.0) == doctest::Approx(8.7103443612144085).epsilon(1e-9));
    CHECK(constant(DifferenceOrder::Second, 1.5) == doctest::Approx(5.5850536063818546).epsilon(1e-9));
    CHECK(constant(DifferenceOrder::TaylorRemoved, 1.5) == doctest::Approx(2.7925268031909273).epsilon(1e-9));
}

TEST_CASE("kernel multipliers are direction independent") {
    const double a = constant(DifferenceOrder::Second, 1.5, {2.0, 0.0});
    const double b = constant(DifferenceOrder::Second, 1.5, {-1.2, 1.6});
    CHECK(a == doctest::Approx(b).epsilon(1e-10));
}

TEST_CASE("kernel spec parsing and ranges") {
    const KernelSpec k = KernelSpec::parse("order=second,b=1.5,gamma=2");
    CHECK(k.order == DifferenceOrder::Second);
    CHECK(k.kappa_power == 2);
    CHECK(KernelSpec::parse(k.spec()).spec() == k.spec());
    CHECK_THROWS_AS(KernelSpec::parse("order=first,b=1.2"), std::invalid_argument);
    CHECK_THROWS_AS(KernelSpec::parse("order=taylor,b=0.5"), std::invalid_argument);
    CHECK_THROWS_AS(KernelSpec::parse("order=first,gamma=3"), std::invalid_argument);
    CHECK_THROWS_AS(KernelSpec::parse("size=3"), std::invalid_argument);
}

TEST_CASE("records of zero data") {
    const DiagnosticsRecord r = record(RealField(g), Weight::unit(), q, 0.5);
    CHECK(r.t == 0.5);
    CHECK(r.A_phi == 0.0);
    CHECK(r.mu_phi == 1.0);
    CHECK(r.dissipation == 0.0);
}

TEST_CASE("csv rows carry every record field") {
    const DiagnosticsRecord r = record(gaussian(g, 0.01, 2.0, {16.0, 16.0}), Weight::unit(), q);
    auto count = [](const std::string& s) { return int(std::count(s.begin(), s.end(), ',')) + 1; };
    CHECK(csv_columns() == 18);
    CHECK(count(csv_header()) == csv_columns());
    CHECK(count(csv_row(r)) == csv_columns());
}

TEST_CASE("energies of a Gaussian scale quadratically") {
    const auto phi = PhiTable::for_grid(Weight::log_pow(0.375), g);
    const RealField f = gaussian(g, 0.01, 2.0, {16.0, 16.0});
    const RealField rhs(g);
    const DiagnosticsRecord a = record(f, *phi, q, 0.0, &rhs), b = record(2.0 * f, *phi, q, 0.0, &rhs);
    CHECK(b.A_phi == doctest::Approx(4.0 * a.A_phi).epsilon(1e-12));
    CHECK(b.B_phi == doctest::Approx(4.0 * a.B_phi).epsilon(1e-12));
    CHECK(a.mu_phi <= 1.0 / phi->phi0() * (1.0 + 1e-12));
}

TEST_CASE("dissipation pairing at small amplitude equals B_phi") {
    const auto phi = PhiTable::for_grid(Weight::unit(), g);
    const RealField f = gaussian(g, 1e-5, 2.0, {16.0, 16.0});
    const Pairing p = dissipation_pairing(f, *phi, q);
    const DiagnosticsRecord r = record(f, *phi, q);
    CHECK(p.value / r.B_phi == doctest::Approx(1.0).epsilon(1e-2));
    CHECK(std::abs(p.split - p.value) <= 1e-10 * std::abs(p.value));
}

TEST_CASE("unit interpolation ratio never exceeds one") {
    const auto phi = PhiTable::for_grid(Weight::unit(), g);
    for (const auto& f : random_family(g, 3, 9))
        for (double s : {2.125, 2.25, 25.0 / 12.0}) CHECK(interpolation_probe(f, *phi, s) <= 1.0 + 1e-9);
    CHECK_THROWS(interpolation_probe(random_family(g, 1, 9)[0], *phi, 2.6));
}

TEST_CASE("Lipschitz probe reads the weight exponent") {
    const auto phi = PhiTable::for_grid(Weight::log_pow(0.375), g);
    const LipschitzReport r = lipschitz_probe(gaussian(g, 0.1, 2.0, {16.0, 16.0}), *phi);
    CHECK(r.lip == doctest::Approx(0.1 * std::exp(-0.5) / 2.0).epsilon(1e-8));
    CHECK(r.ratio == doctest::Approx(r.lip / r.bound));
}
