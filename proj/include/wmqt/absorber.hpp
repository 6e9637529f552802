#pragma once

#include <vector>

#include "wmqt/potentials.hpp"
#include "wmqt/state.hpp"

namespace wmqt {

enum class PmlSides { right, left, both };

/// Absorbing layer W(s) = exp(s / l_ext) (A s)^6 for 0 <= s <= width, where
/// s is the depth into the layer. The right layer starts at x0 and extends
/// towards +x; the left layer starts at x0 (or x0_left when sides == both)
/// and extends towards -x. W vanishes outside the layers.
struct PmlParams {
    real A = 1e-3;
    real l_ext = 1e3;
    real x0 = 0.0;
    real width = 1e3;
    PmlSides sides = PmlSides::right;
    real x0_left = 0.0;

    void validate() const;
    /// Throws unless every layer lies inside the grid.
    void validate_against(const Grid1D& g) const;

    bool has_right() const { return sides != PmlSides::left; }
    bool has_left() const { return sides != PmlSides::right; }
    real left_onset() const { return sides == PmlSides::both ? x0_left : x0; }
};

/// W(x) >= 0; the complex potential is U(x) - i W(x).
real absorber_profile(const PmlParams& p, real x);

/// W sampled on every node.
std::vector<real> absorber_on_grid(const PmlParams& p, const Grid1D& g);

/// Nodewise U(x) - i W(x).
std::vector<complex> build_complex_potential(const WashboardParams& w, const PmlParams& p,
                                             const Grid1D& g);

struct ReflectionOptions {
    real dt = 0.05;
    /// Packet width; 0 selects 5/k.
    real sigma = 0.0;
    /// Distance between packet centre and the layer onset, in packet widths.
    real standoff = 6.0;
    /// Stop once the probability left inside the layer falls below this.
    real layer_tolerance = 1e-9;
    /// Hard limit on the propagation time; 0 selects a bound from the layer
    /// depth and the slowest significant packet component.
    real max_time = 0.0;
    /// Depth of the sink the diagnostic places at the left end of the grid.
    real sink_width = 1e3;
};

/// Launches a free Gaussian packet with mean momentum k towards the right
/// layer and returns the fraction of the initial probability that comes back
/// to x < x0 once the layer has emptied. A sink at the left end of `g`
/// (A = 1/sink_width, l_ext = sink_width) stops the returning packet from
/// bouncing back; what it swallows is counted as returned.
real reflection_coefficient(const PmlParams& p, real k, const Grid1D& g,
                            const ReflectionOptions& opts = {});

}  // namespace wmqt
