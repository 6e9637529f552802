#include "wmqt/potentials.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "wmqt/errors.hpp"

namespace wmqt {

namespace {

void require_metastable(const WashboardParams& p) {
    p.validate();
    if (p.gamma >= 1.0) {
        throw DomainError("no metastable well for gamma >= 1");
    }
}

}  // namespace

void WashboardParams::validate() const {
    if (!(V0 > 0.0)) {
        throw DomainError("V0 must be positive");
    }
    if (!(gamma >= 0.0 && gamma <= 1.0)) {
        throw DomainError("gamma must lie in [0,1]");
    }
}

void CubicParams::validate() const {
    if (!(g > 0.0)) {
        throw DomainError("cubic coefficient g must be positive");
    }
    if (!(omega_p > 0.0)) {
        throw DomainError("omega_p must be positive");
    }
}

void RampSpec::validate() const {
    if (!(T > 0.0)) {
        throw DomainError("ramp duration T must be positive");
    }
    if (!(0.0 <= gamma_start && gamma_start <= gamma_end && gamma_end <= 1.0)) {
        throw DomainError("ramp requires 0 <= gamma_start <= gamma_end <= 1");
    }
}

real washboard_eval(const WashboardParams& p, real x) {
    return -p.V0 * (std::cos(x) + p.gamma * x);
}

real cubic_eval(const CubicParams& p, real x) {
    return -p.g * x * x * x + 0.5 * p.omega_p * p.omega_p * x * x;
}

real barrier_height_washboard(const WashboardParams& p) {
    p.validate();
    real const g = p.gamma;
    return 2.0 * p.V0 * (std::sqrt(1.0 - g * g) - g * std::acos(g));
}

real barrier_height_cubic(const CubicParams& p) {
    real const w2 = p.omega_p * p.omega_p;
    return w2 * w2 * w2 / (54.0 * p.g * p.g);
}

WellExtrema well_extrema(const WashboardParams& p) {
    require_metastable(p);
    real const a = std::asin(p.gamma);
    return {a, std::numbers::pi - a};
}

real plasma_frequency(const WashboardParams& p) {
    require_metastable(p);
    return std::sqrt(p.V0 * std::sqrt(1.0 - p.gamma * p.gamma));
}

CubicParams cubic_fit_from_washboard(const WashboardParams& p) {
    require_metastable(p);
    real const w = plasma_frequency(p);
    real const du = barrier_height_washboard(p);
    if (du < 1e-12) {
        throw DomainError("barrier too small for a cubic fit");
    }
    return {w * w * w / std::sqrt(54.0 * du), w};
}

real ramp_gamma(const RampSpec& r, real t) {
    if (t < 0.0) {
        throw DomainError("ramp time must be non-negative");
    }
    if (t >= r.T) {
        return r.gamma_end;
    }
    return r.gamma_start + (r.gamma_end - r.gamma_start) * (t / r.T);
}

NormalizedUnits physical_to_normalized(const PhysicalJunction& j) {
    if (!(j.critical_current_I0 > 0.0) || !(j.capacitance_C > 0.0)) {
        throw DomainError("junction current and capacitance must be positive");
    }
    // SI 2019 exact values
    constexpr real planck = 6.62607015e-34;
    constexpr real charge = 1.602176634e-19;
    constexpr real hbar = planck / (2.0 * std::numbers::pi);
    constexpr real reduced_flux = hbar / (2.0 * charge);  // Phi0 / 2pi

    real const ej = j.critical_current_I0 * reduced_flux;
    real const ec = hbar * hbar / (j.capacitance_C * reduced_flux * reduced_flux);
    return {ej / ec, hbar / ec, ej, ec};
}

}  // namespace wmqt
