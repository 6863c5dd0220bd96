#include <doctest.h>

#include <cmath>

#include "muskat/weights.hpp"

using namespace muskat;

TEST_CASE("phi at zero for the unit weight") {
    // 4 pi Gamma(-3/2) cos(3 pi / 4) with the sign folded in
    CHECK(phi_unit() == doctest::Approx(20.999479927629893).epsilon(1e-10));
}

TEST_CASE("phi for a log-power weight") {
    const Weight w = Weight::log_pow(0.375);
    CHECK(phi_value(w, 10.0).phi == doctest::Approx(32.823133005828225).epsilon(1e-8));
    CHECK(phi_value(w, 1000.0).phi == doctest::Approx(44.98764461976248).epsilon(1e-8));
    CHECK_FALSE(phi_value(w, 10.0).flagged);
}

TEST_CASE("phi table interpolates its nodes") {
    const Weight w = Weight::log_pow(0.375);
    const PhiTable t(w, PhiTable::log_nodes(20, 1e-2, 1e4));
    CHECK(t(10.0) == doctest::Approx(32.823133005828225).epsilon(1e-6));
    CHECK(t.phi0() == doctest::Approx(phi_value(w, 0.0).phi));
    CHECK_FALSE(t.any_flagged());
}

TEST_CASE("admissibility of standard weights") {
    for (const Weight& w : {Weight::unit(), Weight::log_pow(0.375), Weight::log_pow(0.5)}) {
        const ValidationReport v = validate_admissible(w, default_radii());
        CHECK(v.pass());
        CHECK(v.c0 <= 2.0);
    }
}

TEST_CASE("a power-law weight fails the logarithmic bound") {
    std::vector<double> r, e;
    for (int k = 0; k <= 12; ++k) {
        r.push_back(std::pow(10.0, k - 3));
        e.push_back(std::pow(10.0, 0.2 * (k - 3)));
    }
    const ValidationReport v = validate_admissible(Weight::tail_built_unchecked(r, e), default_radii());
    CHECK(v.monotone);
    CHECK_FALSE(v.log_bounded);
    CHECK_THROWS_AS(Weight::tail_built(r, e), std::domain_error);
}

TEST_CASE("weight specs round trip") {
    for (const Weight& w : {Weight::unit(), Weight::log_pow(0.375), Weight::tail_built({1.0, 10.0}, {1.5, 2.0})}) {
        const Weight p = Weight::parse(w.spec());
        CHECK(p.spec() == w.spec());
        for (double r : {0.1, 3.0, 1e4}) CHECK(p(r) == w(r));
    }
    CHECK_THROWS(Weight::parse("kind=nonsense"));
}

TEST_CASE("equivalence constants are finite and ordered") {
    const PhiTable t(Weight::log_pow(0.375), PhiTable::log_nodes(10));
    const auto [c, C] = equivalence_constants(t);
    CHECK(c > 0.0);
    CHECK(C >= c);
    CHECK(std::isfinite(C));
}

TEST_CASE("growth sweep bounded for admissible weights") {
    for (double s : {0.25, 0.5, 1.0, 2.0}) CHECK(weight_growth_sweep(Weight::log_pow(0.375), s).bounded);
}

TEST_CASE("weight from a Gaussian spectrum") {
    RadialTable t;
    for (int i = 0; i <= 400; ++i) {
        const double r = 10.0 * i / 400;
        t.r.push_back(r);
        t.omega.push_back(std::pow(r, 4) * std::exp(-4.0 * r * r));
    }
    const Weight w = build_weight_from_spectrum(t);
    CHECK(w.kind() == WeightKind::TailBuilt);
    CHECK(validate_admissible(w, default_radii()).pass());
    const auto [a, b] = enhanced_integral(w, t);
    CHECK(std::isfinite(a));
    CHECK(a >= b);
    // total mass: 2 pi int r^5 exp(-4 r^2) dr = 2 pi / 64
    CHECK(b == doctest::Approx(2.0 * 3.141592653589793 / 64.0).epsilon(1e-4));
}

TEST_CASE("spectrum errors") {
    CHECK_THROWS_AS(build_weight_from_spectrum({{0.0, 1.0}, {0.0, 0.0}}), std::domain_error);
    CHECK_THROWS_AS(build_weight_from_spectrum({{1.0, 0.5}, {1.0, 1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(build_weight_from_spectrum({{1.0}, {1.0}}), std::invalid_argument);
    CHECK_THROWS(read_radial_table("/nonexistent/spectrum.txt"));
}
