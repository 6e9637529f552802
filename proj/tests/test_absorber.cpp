#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "wmqt/absorber.hpp"
#include "wmqt/errors.hpp"
#include "wmqt/potentials.hpp"

using namespace wmqt;

TEST_CASE("profile values") {
    PmlParams p;
    p.x0 = 100.0;
    CHECK(absorber_profile(p, 100.0) == 0.0);
    CHECK(absorber_profile(p, 50.0) == 0.0);
    CHECK(absorber_profile(p, 1100.0 + 1e-9) == 0.0);
    CHECK(absorber_profile(p, 1100.0) == doctest::Approx(std::exp(1.0)).epsilon(1e-12));
    // e^{s/l} (A s)^6 at s = 500
    CHECK(absorber_profile(p, 600.0) ==
          doctest::Approx(std::exp(0.5) * std::pow(0.5, 6)).epsilon(1e-12));
    p.A = 0.0;
    CHECK(absorber_profile(p, 600.0) == 0.0);
}

TEST_CASE("left and mirrored layers") {
    PmlParams p;
    p.sides = PmlSides::left;
    p.x0 = -10.0;
    CHECK(absorber_profile(p, -10.0) == 0.0);
    CHECK(absorber_profile(p, 0.0) == 0.0);
    CHECK(absorber_profile(p, -1010.0) == doctest::Approx(std::exp(1.0)));

    p.sides = PmlSides::both;
    p.x0 = 10.0;
    p.x0_left = -10.0;
    CHECK(absorber_profile(p, 510.0) == doctest::Approx(absorber_profile(p, -510.0)));
    CHECK(absorber_profile(p, 0.0) == 0.0);
}

TEST_CASE("profile vanishes with six derivatives at the onset") {
    PmlParams p;
    real const h = 0.05;
    // forward differences of order m scale like h^(6 - m) * W^(6)
    std::vector<real> w(8);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = absorber_profile(p, static_cast<real>(i) * h);
    for (int order = 1; order <= 6; ++order) {
        std::vector<real> d = w;
        for (int k = 0; k < order; ++k) {
            for (std::size_t i = 0; i + 1 < d.size(); ++i) d[i] = d[i + 1] - d[i];
            d.pop_back();
        }
        real const deriv = d[0] / std::pow(h, order);
        // the seventh forward difference would be the first nonzero one
        CHECK(std::abs(deriv) < 720.0 * std::pow(p.A, 6) * 8.0 * std::pow(8 * h, 6 - order));
    }
    CHECK(w[0] == 0.0);
    for (real v : w) CHECK(v >= 0.0);
}

TEST_CASE("complex potential") {
    WashboardParams const w{2.0, 0.3};
    Grid1D const g = Grid1D::with_spacing(-10.0, 1100.0, 0.5);
    PmlParams p;
    p.x0 = 100.0;
    auto const v = build_complex_potential(w, p, g);
    real max_im = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        CHECK(v[i].real() == washboard_eval(w, g.x(i)));
        CHECK(v[i].imag() <= 0.0);
        max_im = std::max(max_im, -v[i].imag());
    }
    std::size_t const onset = g.nearest_index(100.0);
    CHECK(v[onset].imag() == 0.0);
    CHECK(max_im == doctest::Approx(std::exp(1.0)).epsilon(1e-12));

    p.A = 0.0;
    for (complex z : build_complex_potential(w, p, g)) CHECK(z.imag() == 0.0);

    p.x0 = 200.0;
    CHECK_THROWS_AS(build_complex_potential(w, p, g), DomainError);
}

TEST_CASE("parameter validation") {
    PmlParams p;
    p.A = -1.0;
    CHECK_THROWS_AS(p.validate(), DomainError);
    p = {};
    p.l_ext = 0.0;
    CHECK_THROWS_AS(p.validate(), DomainError);
    p = {};
    p.width = 0.0;
    CHECK_THROWS_AS(p.validate(), DomainError);
}

namespace {

// small layer so the diagnostic runs in a second or two
PmlParams short_layer(real A) {
    PmlParams p;
    p.A = A;
    p.l_ext = 50.0;
    p.width = 50.0;
    p.x0 = 0.0;
    return p;
}

real reflect(real A, real k) {
    ReflectionOptions opts;
    opts.sink_width = 200.0;
    real const sigma = 5.0 / k;
    Grid1D const g = Grid1D::with_spacing(-(opts.standoff + 8.5) * sigma - opts.sink_width, 50.0, 0.05);
    return reflection_coefficient(short_layer(A), k, g, opts);
}

}  // namespace

TEST_CASE("hard wall reflects everything") {
    CHECK(reflect(0.0, 1.5) >= 0.99);
}

TEST_CASE("reflection has an optimal amplitude window") {
    real const weak = reflect(1e-3, 1.5);
    real const good = reflect(3e-2, 1.5);
    real const hard = reflect(100.0, 1.5);
    CHECK(weak > 0.9);
    CHECK(good < 1e-2);
    CHECK(hard > 0.5);
    CHECK(good < weak);
    CHECK(good < hard);
}

TEST_CASE("reflection diagnostic preconditions") {
    Grid1D const g = Grid1D::with_spacing(-300.0, 50.0, 0.1);
    CHECK_THROWS_AS(reflection_coefficient(short_layer(0.02), 0.0, g), DomainError);
    ReflectionOptions opts;
    opts.standoff = 1.0;
    opts.sink_width = 100.0;
    CHECK_THROWS_WITH_AS(reflection_coefficient(short_layer(0.02), 1.0, g, opts),
                         "packet initially overlaps the absorber", DomainError);
    opts.standoff = 6.0;
    opts.sink_width = 240.0;
    CHECK_THROWS_AS(reflection_coefficient(short_layer(0.02), 1.0, g, opts), DomainError);
    PmlParams left = short_layer(0.02);
    left.sides = PmlSides::left;
    CHECK_THROWS_AS(reflection_coefficient(left, 1.0, g), DomainError);
}
