#include "wmqt/absorber.hpp"

#include <algorithm>
#include <cmath>

#include "wmqt/errors.hpp"
#include "wmqt/propagator.hpp"

namespace wmqt {

namespace {

real layer_value(const PmlParams& p, real depth) {
    if (depth < 0.0 || depth > p.width) {
        return 0.0;
    }
    real const a = p.A * depth;
    real const a3 = a * a * a;
    return std::exp(depth / p.l_ext) * a3 * a3;
}

}  // namespace

void PmlParams::validate() const {
    if (!(A >= 0.0)) {
        throw DomainError("absorber amplitude A must be non-negative");
    }
    if (!(l_ext > 0.0)) {
        throw DomainError("absorber decay length l_ext must be positive");
    }
    if (!(width > 0.0)) {
        throw DomainError("absorber width must be positive");
    }
}

void PmlParams::validate_against(const Grid1D& g) const {
    validate();
    real const slack = 1e-9 * (std::abs(g.x_min()) + std::abs(g.x_max()) + 1.0);
    if (has_right() && (x0 < g.x_min() - slack || x0 + width > g.x_max() + slack)) {
        throw DomainError("right absorbing layer lies outside the grid");
    }
    if (has_left()) {
        real const onset = left_onset();
        if (onset > g.x_max() + slack || onset - width < g.x_min() - slack) {
            throw DomainError("left absorbing layer lies outside the grid");
        }
    }
}

real absorber_profile(const PmlParams& p, real x) {
    real w = 0.0;
    if (p.has_right()) {
        w += layer_value(p, x - p.x0);
    }
    if (p.has_left()) {
        w += layer_value(p, p.left_onset() - x);
    }
    return w;
}

std::vector<real> absorber_on_grid(const PmlParams& p, const Grid1D& g) {
    std::vector<real> w(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        w[i] = absorber_profile(p, g.x(i));
    }
    return w;
}

std::vector<complex> build_complex_potential(const WashboardParams& w, const PmlParams& p,
                                             const Grid1D& g) {
    w.validate();
    p.validate_against(g);
    std::vector<complex> v(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        real const x = g.x(i);
        v[i] = {washboard_eval(w, x), -absorber_profile(p, x)};
    }
    return v;
}

real reflection_coefficient(const PmlParams& p, real k, const Grid1D& g,
                            const ReflectionOptions& opts) {
    if (!(k > 0.0)) {
        throw DomainError("packet momentum must be positive");
    }
    if (!p.has_right()) {
        throw DomainError("reflection diagnostic needs a right absorbing layer");
    }
    p.validate_against(g);

    real const sigma = opts.sigma > 0.0 ? opts.sigma : 5.0 / k;
    real const center = p.x0 - opts.standoff * sigma;
    if (center + 3.0 * sigma > p.x0) {
        throw DomainError("packet initially overlaps the absorber");
    }
    if (!(opts.sink_width > 0.0)) {
        throw DomainError("reflection diagnostic needs a positive sink width");
    }
    // left sink: swallows the returning packet so it cannot bounce back in
    PmlParams sink;
    sink.sides = PmlSides::left;
    sink.width = opts.sink_width;
    sink.A = 1.0 / opts.sink_width;
    sink.l_ext = opts.sink_width;
    sink.x0 = g.x_min() + opts.sink_width;
    // the packet tail must not start inside the sink
    if (center - 8.0 * sigma < sink.x0) {
        throw DomainError("packet does not fit in the absorber-free region");
    }

    WaveFunction psi{g};
    for (std::size_t i = 1; i + 1 < g.size(); ++i) {
        real const d = g.x(i) - center;
        psi[i] = std::exp(-d * d / (4.0 * sigma * sigma)) * std::polar(1.0, k * d);
    }
    psi = renormalize(psi);

    std::vector<complex> pot(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        real const w = absorber_profile(p, g.x(i)) + absorber_profile(sink, g.x(i));
        pot[i] = {0.0, -w};
    }
    CrankNicolson cn{g, opts.dt};
    cn.set_potential(pot);

    Region const returned_region{sink.x0, p.x0};
    Region const layer{p.x0, g.x_max()};
    // slowest component worth tracking sits about four momentum widths below k
    real const k_slow = std::max(k - 2.0 / sigma, 0.25 * k);
    real const max_time =
        opts.max_time > 0.0 ? opts.max_time : (opts.standoff * sigma + 2.0 * p.width) / k_slow;
    auto const check_every =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(1.0 / opts.dt)));
    auto const max_steps = static_cast<std::size_t>(std::ceil(max_time / opts.dt));

    // probability swallowed by the sink = time integral of the current into it
    real const probe = sink.x0;
    real sunk = 0.0;
    real prev = -probability_current(psi, probe);
    bool entered = false;
    for (std::size_t s = 1; s <= max_steps; ++s) {
        cn.advance(psi.amplitudes());
        real const cur = -probability_current(psi, probe);
        sunk += 0.5 * opts.dt * (prev + cur);
        prev = cur;
        if (s % check_every != 0) {
            continue;
        }
        if (!std::isfinite(std::norm(psi[1]))) {
            throw NumericalError("numerical blow-up in reflection diagnostic at step " +
                                 std::to_string(s));
        }
        entered = entered || norm_squared(psi, returned_region) < 0.5;
        if (entered && norm_squared(psi, layer) < opts.layer_tolerance) {
            break;
        }
    }
    return std::clamp(norm_squared(psi, returned_region) + sunk, 0.0, 1.0);
}

}  // namespace wmqt
