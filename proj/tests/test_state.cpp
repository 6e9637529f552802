#include "doctest.h"

#include <cmath>
#include <numbers>

#include "wmqt/errors.hpp"
#include "wmqt/state.hpp"

using namespace wmqt;

namespace {

WaveFunction gaussian(const Grid1D& g, real center, real sigma, real k = 0.0) {
    WaveFunction psi{g};
    real const a = std::pow(2.0 * std::numbers::pi * sigma * sigma, -0.25);
    for (std::size_t i = 0; i < g.size(); ++i) {
        real const d = g.x(i) - center;
        psi[i] = a * std::exp(-d * d / (4.0 * sigma * sigma)) * std::polar(1.0, k * g.x(i));
    }
    return psi;
}

}  // namespace

TEST_CASE("grid coordinates come from the index") {
    Grid1D const g{-3.0, 7.0, 1001};
    CHECK(g.dx() == doctest::Approx(0.01).epsilon(1e-15));
    CHECK(g.x(0) == -3.0);
    CHECK(g.x(500) == -3.0 + 500.0 * g.dx());
    CHECK(g.x_max() == doctest::Approx(7.0).epsilon(1e-14));
    CHECK(g.nearest_index(0.004) == 300);
    CHECK(g.nearest_index(-100.0) == 0);
    CHECK(g.nearest_index(100.0) == 1000);
}

TEST_CASE("grid rejects bad bounds and tiny sizes") {
    CHECK_THROWS_AS(Grid1D(1.0, 1.0, 100), DomainError);
    CHECK_THROWS_AS(Grid1D(2.0, 1.0, 100), DomainError);
    CHECK_THROWS_AS(Grid1D(0.0, 1.0, 15), DomainError);
    CHECK_THROWS_AS(Grid1D::with_spacing(0.0, 1.0, 0.0), DomainError);
}

TEST_CASE("with_spacing keeps dx and snaps x_max to a node") {
    auto const g = Grid1D::with_spacing(-1.0, 2.02, 0.05);
    CHECK(g.dx() == doctest::Approx(0.05));
    CHECK(g.size() == 61);
    CHECK(g.x_max() == doctest::Approx(2.0));
}

TEST_CASE("norm of a normalized Gaussian is one") {
    Grid1D const g{-40.0, 40.0, 4001};
    CHECK(norm_squared(gaussian(g, 1.3, 2.0)) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("trapezoid on a Gaussian matches the closed form with 20 points per sigma") {
    real const sigma = 1.0;
    Grid1D const g{-12.0, 12.0, 481};  // dx = 0.05
    WaveFunction const psi = gaussian(g, 0.0, sigma);
    // integral over [0, 2] of the density: (erf(2/(sqrt2 sigma)) - erf(0)) / 2
    real const exact = 0.5 * std::erf(2.0 / (std::sqrt(2.0) * sigma));
    real const approx = norm_squared(psi, {0.0, 2.0});
    // endpoints are nodes, so the only error is the trapezoid error
    CHECK(std::abs(approx - exact) / exact < 1e-3);
    CHECK(std::abs(norm_squared(psi) - 1.0) < 1e-6);
}

TEST_CASE("zero state has zero norm") {
    Grid1D const g{0.0, 1.0, 100};
    CHECK(norm_squared(WaveFunction{g}) == 0.0);
}

TEST_CASE("box of unit amplitude integrates to its width") {
    Grid1D const g{0.0, 10.0, 1001};
    WaveFunction psi{g};
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (g.x(i) >= 2.5 && g.x(i) <= 7.5) psi[i] = 1.0;
    }
    CHECK(std::abs(norm_squared(psi) - 5.0) <= 2.0 * g.dx());
}

TEST_CASE("region outside the grid is rejected") {
    Grid1D const g{0.0, 1.0, 100};
    WaveFunction const psi{g};
    CHECK_THROWS_AS(norm_squared(psi, {2.0, 3.0}), DomainError);
}

TEST_CASE("probability current") {
    Grid1D const g{-50.0, 50.0, 2001};
    SUBCASE("real wave carries none") {
        CHECK(probability_current(gaussian(g, 0.0, 3.0), 1.0) == 0.0);
    }
    SUBCASE("zero state") {
        CHECK(probability_current(WaveFunction{g}, 0.0) == 0.0);
    }
    SUBCASE("plane wave") {
        real const k = 0.5;
        WaveFunction psi{g};
        for (std::size_t i = 0; i < g.size(); ++i) psi[i] = 0.3 * std::polar(1.0, k * g.x(i));
        real const j = probability_current(psi, 0.0);
        real const expected = k * 0.09;
        CHECK(std::abs(j - expected) <= expected * k * k * g.dx() * g.dx());
    }
    SUBCASE("probe must be inside") {
        CHECK_THROWS_AS(probability_current(WaveFunction{g}, 50.0), DomainError);
        CHECK_THROWS_AS(probability_current(WaveFunction{g}, -60.0), DomainError);
    }
}

TEST_CASE("renormalize") {
    Grid1D const g{-30.0, 30.0, 1201};
    WaveFunction const psi = renormalize(gaussian(g, 0.5, 2.0, 0.7));
    SUBCASE("idempotent") {
        WaveFunction const again = renormalize(psi);
        for (std::size_t i = 0; i < g.size(); ++i) {
            CHECK(std::abs(again[i] - psi[i]) <= 1e-15);
        }
    }
    SUBCASE("removes scale") {
        WaveFunction twice = psi;
        for (std::size_t i = 0; i < g.size(); ++i) twice[i] *= 2.0;
        WaveFunction const back = renormalize(twice);
        for (std::size_t i = 0; i < g.size(); ++i) {
            CHECK(std::abs(back[i] - psi[i]) <= 1e-15);
        }
    }
    SUBCASE("tiny state") {
        WaveFunction small = psi;
        for (std::size_t i = 0; i < g.size(); ++i) small[i] *= 1e-3;
        CHECK(norm_squared(small) == doctest::Approx(1e-6));
        CHECK(norm_squared(renormalize(small)) == doctest::Approx(1.0).epsilon(1e-14));
    }
    SUBCASE("null state") {
        CHECK_THROWS_AS(renormalize(WaveFunction{g}), DomainError);
    }
}

TEST_CASE("mean position and overlap") {
    Grid1D const g{-30.0, 30.0, 1201};
    CHECK(mean_position(gaussian(g, 2.25, 1.5)) == doctest::Approx(2.25).epsilon(1e-10));
    CHECK_THROWS_AS(mean_position(WaveFunction{g}), DomainError);

    WaveFunction const a = gaussian(g, -10.0, 1.0);
    WaveFunction const b = gaussian(g, 10.0, 1.0);
    CHECK(overlap_probability(a, a) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(overlap_probability(a, b) < 1e-20);
    // |<a|c>|^2 for two unit Gaussians of width s a distance d apart: exp(-d^2 / (4 s^2))
    WaveFunction const c = gaussian(g, -9.0, 1.0);
    CHECK(overlap_probability(a, c) == doctest::Approx(std::exp(-0.25)).epsilon(1e-8));
}

TEST_CASE("wave function size must match its grid") {
    Grid1D const g{0.0, 1.0, 100};
    CHECK_THROWS_AS(WaveFunction(g, std::vector<complex>(99)), DomainError);
}
