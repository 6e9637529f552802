#pragma once

#include "wmqt/state.hpp"

namespace wmqt {

/// Tilted washboard U(x) = -V0 (cos x + gamma x).
struct WashboardParams {
    real V0 = 2.0;
    real gamma = 0.0;

    void validate() const;
};

/// Cubic well U(x) = -g x^3 + omega_p^2 x^2 / 2.
struct CubicParams {
    real g = 1.0;
    real omega_p = 1.0;

    void validate() const;
};

enum class RampShape { linear };

struct RampSpec {
    real gamma_start = 0.0;
    real gamma_end = 1.0;
    real T = 2000.0;
    RampShape shape = RampShape::linear;

    void validate() const;
    real sweep_rate() const { return (gamma_end - gamma_start) / T; }
};

struct PhysicalJunction {
    real critical_current_I0;  // A
    real capacitance_C;        // F
};

struct WellExtrema {
    real x_min;
    real x_top;
};

struct NormalizedUnits {
    real V0;
    real time_unit_seconds;
    real josephson_energy;  // J
    real charging_energy;   // J
};

real washboard_eval(const WashboardParams& p, real x);
real cubic_eval(const CubicParams& p, real x);

/// 2 V0 [sqrt(1 - gamma^2) - gamma arccos(gamma)].
real barrier_height_washboard(const WashboardParams& p);
real barrier_height_cubic(const CubicParams& p);

/// Minimum and barrier top of the well containing x = arcsin(gamma).
WellExtrema well_extrema(const WashboardParams& p);

/// Small-oscillation frequency at the well bottom, sqrt(V0 sqrt(1 - gamma^2)).
real plasma_frequency(const WashboardParams& p);

/// Cubic with the same curvature at the minimum and the same barrier height.
CubicParams cubic_fit_from_washboard(const WashboardParams& p);

real ramp_gamma(const RampSpec& r, real t);

NormalizedUnits physical_to_normalized(const PhysicalJunction& j);

}  // namespace wmqt
