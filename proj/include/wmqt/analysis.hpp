#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "wmqt/potentials.hpp"
#include "wmqt/propagator.hpp"
#include "wmqt/state.hpp"

namespace wmqt {

struct FitWindow {
    real lo;
    real hi;
};

/// Least-squares line through ln P(t); rate = -slope.
struct DecayFit {
    real rate = 0.0;
    real intercept = 0.0;
    FitWindow window{0.0, 0.0};
    real residual_rms = 0.0;
    std::size_t samples = 0;
};

struct SwitchingDistribution {
    std::vector<real> gamma_bins;  // bin centres
    real bin_width = 0.0;
    std::vector<real> pdf;
    std::vector<real> cumulative;  // switched probability up to each bin's upper edge
    real total_switch_probability = 0.0;
    /// Probability mass discarded by clipping negative increments.
    real clipped_mass = 0.0;
    std::size_t clipped_bins = 0;

    std::size_t peak_bin() const;
};

DecayFit fit_decay_rate(const TimeSeries& ts, FitWindow window);

/// -d ln P / dt: centred differences inside, one-sided at both ends.
std::vector<real> instantaneous_rate(const TimeSeries& ts);

/// Earliest sample time at which the instantaneous rate reaches
/// fraction * asymptotic_rate and stays there for `hold` consecutive samples.
real detect_relaxation_time(const TimeSeries& ts, real asymptotic_rate, real fraction = 0.9,
                            std::size_t hold = 5);

/// Keeps the part of psi with x < x_cut and renormalizes it.
WaveFunction project_null_measurement(const WaveFunction& psi, real x_cut);

/// Cubic-barrier tunnelling rate
///   (omega_p / 2pi) sqrt(864 pi dU / omega_p) exp(-36 dU / (5 omega_p)).
real wkb_rate(const WashboardParams& w);
real wkb_rate(real barrier, real omega_p);

/// Switching distribution from a ramped evolution: bins of `bin_width` over
/// [gamma_start, gamma_end], pdf = -(dP/dgamma) from the survival interpolated
/// at the bin edges. The last edge takes the final survival so the histogram
/// telescopes to P(0) - P(final).
SwitchingDistribution switching_distribution_from_ramp(const TimeSeries& ts, const RampSpec& ramp,
                                                       real bin_width = 0.01);

/// First-passage distribution p = (Gamma / v) exp(-int Gamma / v dgamma) on
/// `n_bins` bins over the ramp, with v the sweep rate. Bin values are the
/// exact bin averages of the trapezoid-integrated survival.
SwitchingDistribution switching_distribution_rate_model(const RampSpec& ramp,
                                                        const std::function<real(real)>& rate_fn,
                                                        std::size_t n_bins,
                                                        std::size_t substeps = 32);

/// Piecewise log-linear interpolation through (gamma, rate) pairs; beyond the
/// end points ln(rate) continues along the outermost segment.
class RateTable {
public:
    RateTable(std::vector<real> gammas, std::vector<real> rates);
    real operator()(real gamma) const;

private:
    std::vector<real> gammas_;
    std::vector<real> log_rates_;
};

}  // namespace wmqt
