#include "wmqt/state.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wmqt/errors.hpp"
#include "wmqt/kernels.hpp"

namespace wmqt {

Grid1D::Grid1D(real x_min, real x_max, std::size_t n_points)
    : x_min_{x_min}, dx_{0.0}, n_{n_points} {
    if (!(x_min < x_max)) {
        throw DomainError("grid requires x_min < x_max");
    }
    if (n_points < min_points) {
        throw DomainError("grid requires at least " + std::to_string(min_points) + " points");
    }
    dx_ = (x_max - x_min) / static_cast<real>(n_points - 1);
}

Grid1D Grid1D::with_spacing(real x_min, real x_max, real dx) {
    if (!(dx > 0.0)) {
        throw DomainError("grid spacing must be positive");
    }
    if (!(x_min < x_max)) {
        throw DomainError("grid requires x_min < x_max");
    }
    auto const cells = static_cast<std::size_t>(std::llround((x_max - x_min) / dx));
    std::size_t const n = std::max<std::size_t>(cells + 1, min_points);
    return Grid1D{x_min, x_min + static_cast<real>(n - 1) * dx, n};
}

std::size_t Grid1D::nearest_index(real x) const {
    real const s = std::round((x - x_min_) / dx_);
    if (s <= 0.0) {
        return 0;
    }
    return std::min(static_cast<std::size_t>(s), n_ - 1);
}

WaveFunction::WaveFunction(Grid1D grid) : grid_{grid}, amp_(grid.size(), complex{}) {}

WaveFunction::WaveFunction(Grid1D grid, std::vector<complex> amplitudes)
    : grid_{grid}, amp_{std::move(amplitudes)} {
    if (amp_.size() != grid_.size()) {
        throw DomainError("amplitude count does not match grid size");
    }
}

real norm_squared(const WaveFunction& psi, Region region) {
    Grid1D const& g = psi.grid();
    real const lo = std::max(region.lo, g.x_min());
    real const hi = std::min(region.hi, g.x_max());
    if (!(region.lo <= region.hi) || lo > hi) {
        throw DomainError("region outside grid");
    }
    auto const first = static_cast<std::size_t>(std::ceil((lo - g.x_min()) / g.dx() - 1e-9));
    auto last = static_cast<std::size_t>(std::floor((hi - g.x_min()) / g.dx() + 1e-9));
    last = std::min(last, g.size() - 1);
    if (first > last) {
        throw DomainError("region outside grid");
    }
    auto const amp = psi.amplitudes();
    // trapezoid = full sum minus half of each end node
    real const inner = kernels::sum_abs2(amp.subspan(first, last - first + 1));
    real const ends = 0.5 * (std::norm(amp[first]) + std::norm(amp[last]));
    return g.dx() * (inner - ends);
}

real norm_squared(const WaveFunction& psi) {
    return norm_squared(psi, Region::whole(psi.grid()));
}

real probability_current(const WaveFunction& psi, real x_probe) {
    Grid1D const& g = psi.grid();
    if (!(x_probe > g.x_min() && x_probe < g.x_max())) {
        throw DomainError("current probe must lie strictly inside the grid");
    }
    std::size_t i = g.nearest_index(x_probe);
    i = std::clamp<std::size_t>(i, 1, g.size() - 2);
    complex const dpsi = (psi[i + 1] - psi[i - 1]) / (2.0 * g.dx());
    return std::imag(std::conj(psi[i]) * dpsi);
}

real mean_position(const WaveFunction& psi) {
    auto const amp = psi.amplitudes();
    real const n = kernels::sum_abs2(amp);
    if (n == 0.0) {
        throw DomainError("mean position of a null state");
    }
    return kernels::sum_x_abs2(amp, psi.grid().x_min(), psi.grid().dx()) / n;
}

WaveFunction renormalize(const WaveFunction& psi) {
    real const n = norm_squared(psi);
    if (!(n > 0.0)) {
        throw DomainError("cannot renormalize null state");
    }
    real const s = 1.0 / std::sqrt(n);
    WaveFunction out = psi;
    for (complex& z : out.amplitudes()) {
        z *= s;
    }
    return out;
}

real overlap_probability(const WaveFunction& a, const WaveFunction& b) {
    if (a.size() != b.size()) {
        throw DomainError("overlap of states on different grids");
    }
    complex s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += std::conj(a[i]) * b[i];
    }
    real const na = kernels::sum_abs2(a.amplitudes());
    real const nb = kernels::sum_abs2(b.amplitudes());
    return std::norm(s) / (na * nb);
}

}  // namespace wmqt
