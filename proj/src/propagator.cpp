#include "wmqt/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <utility>

#include "wmqt/kernels.hpp"

namespace wmqt {

void SolverConfig::validate() const {
    if (!(dt > 0.0)) {
        throw DomainError("dt must be positive");
    }
    if (!(t_end > 0.0)) {
        throw DomainError("t_end must be positive");
    }
    if (observe_every == 0) {
        throw DomainError("observe_every must be positive");
    }
}

std::size_t SolverConfig::steps() const {
    return static_cast<std::size_t>(std::llround(t_end / dt));
}

void TimeSeries::reserve(std::size_t n) {
    for (auto* v : {&times, &gamma, &survival, &norm_full, &x_mean, &flux_at_xstar}) {
        v->reserve(n);
    }
}

// ---------------------------------------------------------------------------

CrankNicolson::CrankNicolson(const Grid1D& grid, real dt)
    : grid_{grid},
      dt_{dt},
      rhs_diag_(grid.size()),
      lhs_diag_(grid.size()),
      scratch_(grid.size()) {
    if (!(dt > 0.0)) {
        throw DomainError("dt must be positive");
    }
    real const inv_dx2 = 1.0 / (grid.dx() * grid.dx());
    constexpr complex I{0.0, 1.0};
    rhs_coupling_ = I * (0.25 * dt * inv_dx2);
    lhs_coupling_ = -rhs_coupling_;
}

void CrankNicolson::set_potential(std::span<const complex> potential) {
    if (potential.size() != grid_.size()) {
        throw DomainError("potential does not match grid");
    }
    real const inv_dx2 = 1.0 / (grid_.dx() * grid_.dx());
    constexpr complex I{0.0, 1.0};
    complex const half = I * (0.5 * dt_);
    for (std::size_t i = 0; i < potential.size(); ++i) {
        complex const h = inv_dx2 + potential[i];
        rhs_diag_[i] = 1.0 - half * h;
        lhs_diag_[i] = 1.0 + half * h;
    }
    lu_.factorize(lhs_diag_, lhs_coupling_);
}

void CrankNicolson::advance(std::span<complex> psi) {
    if (kernels::max_threads() > 1) {
        advance_split(psi);
        return;
    }
    kernels::serial::cn_step_fused(psi, rhs_diag_, rhs_coupling_, lu_, scratch_);
}

void CrankNicolson::advance_split(std::span<complex> psi) {
    kernels::cn_rhs(psi, rhs_diag_, rhs_coupling_, scratch_);
    lu_.solve(scratch_);
    std::copy(scratch_.begin(), scratch_.end(), psi.begin());
}

WashboardField::WashboardField(real V0, const PmlParams& pml, const Grid1D& grid)
    : V0_{V0}, x_(grid.size()), cos_(grid.size()), absorber_{absorber_on_grid(pml, grid)} {
    for (std::size_t i = 0; i < grid.size(); ++i) {
        x_[i] = grid.x(i);
        cos_[i] = std::cos(x_[i]);
    }
}

void WashboardField::fill(real gamma, std::span<complex> out) const {
    for (std::size_t i = 0; i < x_.size(); ++i) {
        out[i] = {-V0_ * (cos_[i] + gamma * x_[i]), -absorber_[i]};
    }
}

std::vector<complex> WashboardField::at(real gamma) const {
    std::vector<complex> v(x_.size());
    fill(gamma, v);
    return v;
}

WaveFunction step(const WaveFunction& psi, std::span<const complex> potential, real dt) {
    CrankNicolson cn{psi.grid(), dt};
    cn.set_potential(potential);
    WaveFunction out = psi;
    out[0] = 0.0;
    out[out.size() - 1] = 0.0;
    cn.advance(out.amplitudes());
    return out;
}

BlowUpError::BlowUpError(std::size_t step, TimeSeries partial)
    : NumericalError("numerical blow-up at step " + std::to_string(step)),
      step_{step},
      partial_{std::move(partial)} {}

// ---------------------------------------------------------------------------

namespace {

real xstar_for(real gamma) {
    if (gamma >= 1.0) {
        return 0.5 * std::numbers::pi;
    }
    return std::numbers::pi - std::asin(gamma);
}

struct Recorder {
    TimeSeries series;
    real norm0 = 1.0;

    void record(const WaveFunction& psi, real t, real gamma) {
        real const n = norm_squared(psi);
        if (series.size() == 0) {
            norm0 = n;
        }
        series.times.push_back(t);
        series.gamma.push_back(gamma);
        series.norm_full.push_back(n);
        series.survival.push_back(norm0 > 0.0 ? n / norm0 : 0.0);
        series.x_mean.push_back(n > 0.0 ? mean_position(psi) : 0.0);
        real const xs = xstar_for(gamma);
        series.flux_at_xstar.push_back(
            psi.grid().x_min() < xs && xs < psi.grid().x_max() ? probability_current(psi, xs) : 0.0);
    }
};

EvolveResult run(const WaveFunction& psi0, const WashboardField& field, const SolverConfig& cfg,
                 const std::function<real(real)>& gamma_at, bool time_dependent) {
    cfg.validate();
    Grid1D const& g = psi0.grid();
    std::size_t const n = g.size();
    std::size_t const steps = cfg.steps();

    WaveFunction psi = psi0;
    psi[0] = 0.0;
    psi[n - 1] = 0.0;

    CrankNicolson cn{g, cfg.dt};
    std::vector<complex> pot(n);
    if (!time_dependent) {
        field.fill(gamma_at(0.0), pot);
        cn.set_potential(pot);
    }

    Recorder rec;
    rec.series.reserve(steps / cfg.observe_every + 2);
    rec.record(psi, 0.0, gamma_at(0.0));

    for (std::size_t s = 1; s <= steps; ++s) {
        real const t_prev = static_cast<real>(s - 1) * cfg.dt;
        if (time_dependent) {
            field.fill(gamma_at(t_prev + 0.5 * cfg.dt), pot);
            cn.set_potential(pot);
        }
        cn.advance(psi.amplitudes());
        if (!std::isfinite(std::norm(psi[1])) || !std::isfinite(std::norm(psi[n - 2]))) {
            throw BlowUpError(s, std::move(rec.series));
        }
        if (s % cfg.observe_every == 0 || s == steps) {
            real const t = static_cast<real>(s) * cfg.dt;
            rec.record(psi, t, gamma_at(t));
        }
    }
    return {std::move(rec.series), std::move(psi)};
}

}  // namespace

EvolveResult evolve(const WaveFunction& psi0, const WashboardParams& w, const PmlParams& pml,
                    const SolverConfig& cfg) {
    w.validate();
    WashboardField const field{w.V0, pml, psi0.grid()};
    return run(psi0, field, cfg, [g = w.gamma](real) { return g; }, false);
}

EvolveResult evolve(const WaveFunction& psi0, real V0, const RampSpec& ramp, const PmlParams& pml,
                    const SolverConfig& cfg) {
    ramp.validate();
    WashboardParams{V0, ramp.gamma_start}.validate();
    WashboardField const field{V0, pml, psi0.grid()};
    return run(psi0, field, cfg, [&ramp](real t) { return ramp_gamma(ramp, t); }, true);
}

// ---------------------------------------------------------------------------

WaveFunction gaussian_ground_state(const WashboardParams& w, const Grid1D& g) {
    real const omega = plasma_frequency(w);
    real const center = well_extrema(w).x_min;
    WaveFunction psi{g};
    for (std::size_t i = 1; i + 1 < g.size(); ++i) {
        real const d = g.x(i) - center;
        psi[i] = std::exp(-0.5 * omega * d * d);
    }
    return renormalize(psi);
}

Region well_region(const WashboardParams& w) {
    real const top = well_extrema(w).x_top;
    return {top - 2.0 * std::numbers::pi, top};
}

real energy_expectation(const WaveFunction& psi, std::span<const real> u) {
    Grid1D const& g = psi.grid();
    real const inv_dx2 = 1.0 / (g.dx() * g.dx());
    complex num = 0.0;
    real den = 0.0;
    std::size_t const n = psi.size();
    for (std::size_t i = 1; i + 1 < n; ++i) {
        complex const h = (inv_dx2 + u[i]) * psi[i] - 0.5 * inv_dx2 * (psi[i - 1] + psi[i + 1]);
        num += std::conj(psi[i]) * h;
        den += std::norm(psi[i]);
    }
    return num.real() / den;
}

WaveFunction imaginary_time_relax(const WashboardParams& w, const Grid1D& g, Region region,
                                  const RelaxOptions& opts) {
    if (!(opts.dtau > 0.0)) {
        throw DomainError("imaginary time step must be positive");
    }
    auto const ext = well_extrema(w);
    if (region.lo > ext.x_min - std::numbers::pi || region.hi < ext.x_top) {
        throw DomainError("relaxation region must contain the well");
    }
    std::size_t const first = g.nearest_index(std::max(region.lo, g.x_min()));
    std::size_t const last = g.nearest_index(std::min(region.hi, g.x_max()));
    if (last < first + 3) {
        throw DomainError("relaxation region too small");
    }
    std::size_t const m = last - first + 1;  // nodes first and last are Dirichlet
    Grid1D const sub{g.x(first), g.x(last), m};

    std::vector<real> u(m);
    for (std::size_t i = 0; i < m; ++i) {
        u[i] = washboard_eval(w, sub.x(i));
    }

    // implicit Euler: (1 + dtau (H - u_min)) psi' = psi; the shift keeps the
    // spectrum non-negative so the ground state has the largest factor
    real const inv_dx2 = 1.0 / (g.dx() * g.dx());
    real const u_min = *std::min_element(u.begin(), u.end());
    std::vector<complex> diag(m);
    for (std::size_t i = 0; i < m; ++i) {
        diag[i] = 1.0 + opts.dtau * (inv_dx2 + u[i] - u_min);
    }
    kernels::TridiagonalLU const lu{diag, complex{-0.5 * opts.dtau * inv_dx2}};

    WaveFunction seed = gaussian_ground_state(w, sub);
    std::vector<complex> psi(seed.amplitudes().begin(), seed.amplitudes().end());
    real energy = energy_expectation(seed, u);
    real residual = 0.0;
    for (std::size_t s = 0; s < opts.max_steps; ++s) {
        lu.solve(psi);
        real const norm = std::sqrt(kernels::sum_abs2(psi) * g.dx());
        for (complex& z : psi) {
            z = z.real() / norm;
        }
        real const e = energy_expectation(WaveFunction{sub, psi}, u);
        residual = std::abs(e - energy) / opts.dtau;
        energy = e;
        if (residual < opts.tolerance) {
            WaveFunction out{g};
            for (std::size_t i = 0; i < m; ++i) {
                out[first + i] = psi[i];
            }
            out[0] = 0.0;
            out[g.size() - 1] = 0.0;
            return renormalize(out);
        }
    }
    throw NumericalError("imaginary-time relaxation did not converge; last residual " +
                         std::to_string(residual));
}

Domain washboard_domain(const WashboardParams& w, real dx, const PmlParams& layer) {
    layer.validate();
    auto const ext = well_extrema(w);
    real const left = ext.x_min - 6.0 * std::numbers::pi;
    real const onset = ext.x_top + 8.0 * std::numbers::pi;

    PmlParams pml = layer;
    real x_lo = left;
    real x_hi = left;
    if (pml.has_right()) {
        pml.x0 = onset;
        x_hi = onset + pml.width;
    } else {
        x_hi = onset;
    }
    if (pml.has_left()) {
        if (pml.sides == PmlSides::both) {
            pml.x0_left = left;
        } else {
            pml.x0 = left;
        }
        x_lo = left - pml.width;
    }
    // round up so the last layer node is on the grid
    auto const cells = static_cast<std::size_t>(std::ceil((x_hi - x_lo) / dx - 1e-9));
    Grid1D const grid{x_lo, x_lo + static_cast<real>(cells) * dx, cells + 1};
    return {grid, pml};
}

}  // namespace wmqt
