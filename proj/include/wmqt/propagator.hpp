#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "wmqt/absorber.hpp"
#include "wmqt/errors.hpp"
#include "wmqt/kernels.hpp"
#include "wmqt/potentials.hpp"
#include "wmqt/state.hpp"

namespace wmqt {

struct SolverConfig {
    real dt = 0.005;
    real t_end = 1000.0;
    std::size_t observe_every = 200;

    void validate() const;
    std::size_t steps() const;
};

/// Observables sampled during an evolution. `norm_full` is the integral of
/// |psi|^2 over the whole grid (absorbing layers included), i.e. P(x < inf);
/// `survival` is the same quantity relative to its value at t = 0.
struct TimeSeries {
    std::vector<real> times;
    std::vector<real> gamma;
    std::vector<real> survival;
    std::vector<real> norm_full;
    std::vector<real> x_mean;
    std::vector<real> flux_at_xstar;

    std::size_t size() const { return times.size(); }
    void reserve(std::size_t n);
};

/// Crank-Nicolson (Cayley) stepper for i dpsi/dt = [-1/2 d^2/dx^2 + V] psi on
/// a fixed grid with Dirichlet ends. Owns its scratch buffers; one instance
/// per concurrent evolution.
class CrankNicolson {
public:
    CrankNicolson(const Grid1D& grid, real dt);

    /// Installs a new (complex) potential and refactorizes the implicit side.
    void set_potential(std::span<const complex> potential);

    /// Advances psi by one step in place.
    void advance(std::span<complex> psi);

    /// Same step through the unfused rhs + solve path (parallel rhs kernel).
    void advance_split(std::span<complex> psi);

    real dt() const { return dt_; }
    const Grid1D& grid() const { return grid_; }

private:
    Grid1D grid_;
    real dt_;
    complex rhs_coupling_;
    complex lhs_coupling_;
    std::vector<complex> rhs_diag_;
    std::vector<complex> lhs_diag_;
    kernels::TridiagonalLU lu_;
    std::vector<complex> scratch_;
};

/// Complex washboard potential as a function of the bias:
///   V(x; gamma) = -V0 cos x - i W(x) - gamma V0 x.
class WashboardField {
public:
    WashboardField(real V0, const PmlParams& pml, const Grid1D& grid);

    void fill(real gamma, std::span<complex> out) const;
    std::vector<complex> at(real gamma) const;
    std::span<const real> absorber() const { return absorber_; }

private:
    real V0_;
    std::vector<real> x_;
    std::vector<real> cos_;
    std::vector<real> absorber_;
};

/// One Crank-Nicolson step of size dt.
WaveFunction step(const WaveFunction& psi, std::span<const complex> potential, real dt);

struct EvolveResult {
    TimeSeries series;
    WaveFunction final_state;
};

/// Raised when amplitudes stop being finite; carries the samples recorded so far.
class BlowUpError : public NumericalError {
public:
    BlowUpError(std::size_t step, TimeSeries partial);
    std::size_t step() const { return step_; }
    const TimeSeries& partial() const { return partial_; }

private:
    std::size_t step_;
    TimeSeries partial_;
};

EvolveResult evolve(const WaveFunction& psi0, const WashboardParams& w, const PmlParams& pml,
                    const SolverConfig& cfg);

/// Time-dependent bias; the potential at each step is built with
/// gamma = ramp_gamma(t + dt/2).
EvolveResult evolve(const WaveFunction& psi0, real V0, const RampSpec& ramp, const PmlParams& pml,
                    const SolverConfig& cfg);

/// exp(-omega_p (x - x_min)^2 / 2), normalized on the grid.
WaveFunction gaussian_ground_state(const WashboardParams& w, const Grid1D& g);

struct RelaxOptions {
    real dtau = 0.5;
    /// Convergence threshold on |dE| per unit imaginary time.
    real tolerance = 1e-10;
    std::size_t max_steps = 200000;
};

/// Ground state of the well restricted to `region` (Dirichlet at its edges),
/// by implicit-Euler imaginary-time propagation from the Gaussian seed.
/// Returned on the full grid, zero outside the region, normalized and real.
WaveFunction imaginary_time_relax(const WashboardParams& w, const Grid1D& g, Region region,
                                  const RelaxOptions& opts = {});

/// The cell between the barrier tops around the principal well.
Region well_region(const WashboardParams& w);

/// Rayleigh quotient <psi|H|psi>/<psi|psi> for the discrete Hamiltonian with
/// real potential `u`.
real energy_expectation(const WaveFunction& psi, std::span<const real> u);

struct Domain {
    Grid1D grid;
    PmlParams pml;
};

/// Default layout for a washboard run at bias `gamma`: the grid starts 6 pi
/// left of the well minimum, the absorbing layer starts 8 pi right of the
/// barrier top and the grid ends where the layer ends.
Domain washboard_domain(const WashboardParams& w, real dx, const PmlParams& layer);

}  // namespace wmqt
