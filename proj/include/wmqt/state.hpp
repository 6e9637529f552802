#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace wmqt {

using real = double;
using complex = std::complex<double>;

/// Uniform lattice on [x_min, x_max]; node i sits at x_min + i*dx.
class Grid1D {
public:
    static constexpr std::size_t min_points = 16;

    Grid1D(real x_min, real x_max, std::size_t n_points);

    /// Lattice with the requested spacing; x_max is moved onto the last node.
    static Grid1D with_spacing(real x_min, real x_max, real dx);

    real x_min() const { return x_min_; }
    real x_max() const { return x(n_ - 1); }
    real dx() const { return dx_; }
    std::size_t size() const { return n_; }

    real x(std::size_t i) const { return x_min_ + static_cast<real>(i) * dx_; }

    /// Index of the node closest to x, clamped to the lattice.
    std::size_t nearest_index(real x) const;

    bool contains(real x) const { return x >= x_min_ && x <= x_max(); }

private:
    real x_min_;
    real dx_;
    std::size_t n_;
};

struct Region {
    real lo;
    real hi;

    static Region whole(const Grid1D& g) { return {g.x_min(), g.x_max()}; }
};

/// Complex amplitudes on a grid. The endpoint amplitudes are the Dirichlet
/// nodes and are kept at zero by every propagation step.
class WaveFunction {
public:
    explicit WaveFunction(Grid1D grid);
    WaveFunction(Grid1D grid, std::vector<complex> amplitudes);

    const Grid1D& grid() const { return grid_; }
    std::span<const complex> amplitudes() const { return amp_; }
    std::span<complex> amplitudes() { return amp_; }

    complex operator[](std::size_t i) const { return amp_[i]; }
    complex& operator[](std::size_t i) { return amp_[i]; }

    std::size_t size() const { return amp_.size(); }

private:
    Grid1D grid_;
    std::vector<complex> amp_;
};

/// Trapezoidal integral of |psi|^2 over the grid nodes inside `region`.
/// With the whole grid this is the survival probability P(x < inf).
real norm_squared(const WaveFunction& psi, Region region);
real norm_squared(const WaveFunction& psi);

/// j = Im(conj(psi) dpsi/dx) at the node nearest to x_probe (unit mass, hbar = 1).
real probability_current(const WaveFunction& psi, real x_probe);

/// <x> = int x |psi|^2 dx / int |psi|^2 dx.
real mean_position(const WaveFunction& psi);

WaveFunction renormalize(const WaveFunction& psi);

/// |<a|b>|^2 / (<a|a><b|b>).
real overlap_probability(const WaveFunction& a, const WaveFunction& b);

}  // namespace wmqt
