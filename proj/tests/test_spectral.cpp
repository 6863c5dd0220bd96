#include <doctest.h>

#include <cmath>
#include <numbers>

#include "muskat/fields.hpp"
#include "muskat/spectral.hpp"

using namespace muskat;

namespace {
const Grid g(128, 32.0);
const double pi = std::numbers::pi;
}  // namespace

TEST_CASE("transform and inverse are mutual inverses") {
    const RealField f = gaussian(g, 0.7, 1.5, {15.0, 17.0});
    const RealField back = inverse(transform(f));
    CHECK(max_abs(back - f) < 1e-14);
}

TEST_CASE("transform is mean normalized") {
    RealField one(g);
    for (double& v : one.v) v = 2.5;
    const SpectralField F = transform(one);
    CHECK(std::abs(F(0, 0) - cplx(2.5)) < 1e-14);
}

TEST_CASE("Sobolev norms of a Gaussian match closed forms") {
    // sigma = 2, amplitude 1, far from the box edge.  H^2 against the whole-plane
    // integral; H^{3/4} against the lattice sum of the periodized Gaussian,
    // which differs from the integral by 5e-4 at this box size.
    const SpectralField F = transform(gaussian(g, 1.0, 2.0, {16.0, 16.0}));
    CHECK(sobolev_norm(F, 2.0) == doctest::Approx(1.2533141373155001).epsilon(1e-10));
    CHECK(sobolev_norm(F, 0.75) == doctest::Approx(2.0196672114760763).epsilon(1e-10));
    CHECK(sobolev_norm(F, 0.75) == doctest::Approx(2.0207145319509188).epsilon(1e-3));
}

TEST_CASE("sup and Lipschitz norms of a Gaussian") {
    const SpectralField F = transform(gaussian(g, 1.0, 2.0, {16.1, 15.7}));
    CHECK(sup_norm(F) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(lip_norm(F) == doctest::Approx(std::exp(-0.5) / 2.0).epsilon(1e-9));
}

TEST_CASE("sobolev_norm rejects orders outside [-2, 4]") {
    const SpectralField F = transform(gaussian(g, 1.0, 2.0, {16.0, 16.0}));
    CHECK_THROWS_AS(sobolev_norm(F, 4.5), std::invalid_argument);
}

TEST_CASE("shift by a lattice vector moves samples") {
    const RealField f = gaussian(g, 1.0, 1.0, {16.0, 16.0});
    const RealField s = inverse(shift(transform(f), {3 * g.h(), -2 * g.h()}));
    CHECK(std::abs(s(67, 62) - f(64, 64)) < 1e-13);
}

TEST_CASE("Riesz transforms square to minus identity on mean-free fields") {
    const RealField f = gaussian(g, 1.0, 1.5, {16.0, 16.0});
    SpectralField F = transform(f);
    F(0, 0) = 0.0;
    const auto [R1, R2] = riesz(F);
    const auto [A, _a] = riesz(R1);
    const auto [_b, B] = riesz(R2);
    CHECK(max_abs(inverse(A + B) + inverse(F)) < 1e-13);
}

TEST_CASE("critical rescaling keeps H^2 and Lipschitz norms") {
    const RealField f = gaussian(g, 1.0, 1.25, {16.0, 16.0});
    const SpectralField F = transform(f);
    for (double lam : {0.5, 2.0}) {
        const SpectralField R = transform(rescale_critical(f, lam));
        CHECK(sobolev_norm(R, 2.0) == doctest::Approx(sobolev_norm(F, 2.0)).epsilon(1e-6));
        CHECK(lip_norm(R) == doctest::Approx(lip_norm(F)).epsilon(1e-6));
    }
}

TEST_CASE("critical rescaling refuses fields it cannot represent") {
    CHECK_THROWS_AS(rescale_critical(gaussian(g, 1.0, 4.0, {16.0, 16.0}), 0.5), std::domain_error);
    CHECK_THROWS_AS(rescale_critical(gaussian(g, 1.0, 0.3, {16.0, 16.0}), 2.0), std::domain_error);
    CHECK_THROWS_AS(rescale_critical(gaussian(g, 1.0, 1.0, {16.0, 16.0}), -1.0), std::invalid_argument);
}

TEST_CASE("single mode Sobolev norm") {
    // f = cos(k.x), |f|_{H^s}^2 = |k|^{2s} l^2 / 2
    RealField f(g);
    const double k = 2 * pi * 3 / g.l;
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j) f(i, j) = std::cos(k * i * g.h());
    CHECK(sobolev_norm(transform(f), 1.5) == doctest::Approx(std::pow(k, 1.5) * g.l / std::sqrt(2.0)).epsilon(1e-12));
}
