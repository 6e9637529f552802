#include "wmqt/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "wmqt/errors.hpp"

namespace wmqt {

std::size_t SwitchingDistribution::peak_bin() const {
    if (pdf.empty()) {
        throw AnalysisError("empty switching distribution");
    }
    return static_cast<std::size_t>(std::max_element(pdf.begin(), pdf.end()) - pdf.begin());
}

DecayFit fit_decay_rate(const TimeSeries& ts, FitWindow window) {
    if (!(window.lo < window.hi)) {
        throw DomainError("fit window requires lo < hi");
    }
    std::vector<real> t;
    std::vector<real> y;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        if (ts.times[i] < window.lo || ts.times[i] > window.hi) {
            continue;
        }
        if (!(ts.survival[i] > 0.0)) {
            throw AnalysisError("window reaches noise floor");
        }
        t.push_back(ts.times[i]);
        y.push_back(std::log(ts.survival[i]));
    }
    if (t.size() < 10) {
        throw AnalysisError("fit window holds " + std::to_string(t.size()) +
                            " samples; at least 10 required");
    }
    auto const n = static_cast<real>(t.size());
    real t_mean = 0.0;
    real y_mean = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        t_mean += t[i];
        y_mean += y[i];
    }
    t_mean /= n;
    y_mean /= n;
    real stt = 0.0;
    real sty = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        stt += (t[i] - t_mean) * (t[i] - t_mean);
        sty += (t[i] - t_mean) * (y[i] - y_mean);
    }
    real const slope = sty / stt;
    real const intercept = y_mean - slope * t_mean;
    real ss = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        real const r = y[i] - (intercept + slope * t[i]);
        ss += r * r;
    }
    DecayFit fit;
    fit.rate = std::max(0.0, -slope);
    fit.intercept = intercept;
    fit.window = {t.front(), t.back()};
    fit.residual_rms = std::sqrt(ss / n);
    fit.samples = t.size();
    return fit;
}

std::vector<real> instantaneous_rate(const TimeSeries& ts) {
    std::size_t const n = ts.size();
    if (n < 2) {
        throw AnalysisError("instantaneous rate needs at least two samples");
    }
    std::vector<real> logp(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(ts.survival[i] > 0.0)) {
            throw AnalysisError("survival reaches zero; rate undefined");
        }
        logp[i] = std::log(ts.survival[i]);
    }
    std::vector<real> rate(n);
    rate[0] = -(logp[1] - logp[0]) / (ts.times[1] - ts.times[0]);
    rate[n - 1] = -(logp[n - 1] - logp[n - 2]) / (ts.times[n - 1] - ts.times[n - 2]);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        rate[i] = -(logp[i + 1] - logp[i - 1]) / (ts.times[i + 1] - ts.times[i - 1]);
    }
    return rate;
}

real detect_relaxation_time(const TimeSeries& ts, real asymptotic_rate, real fraction,
                            std::size_t hold) {
    if (!(fraction > 0.0 && fraction < 1.0)) {
        throw DomainError("relaxation fraction must lie in (0,1)");
    }
    if (!(asymptotic_rate > 0.0)) {
        throw DomainError("asymptotic rate must be positive");
    }
    hold = std::max<std::size_t>(hold, 1);
    auto const rate = instantaneous_rate(ts);
    real const threshold = fraction * asymptotic_rate;
    std::size_t run = 0;
    for (std::size_t i = 0; i < rate.size(); ++i) {
        run = rate[i] >= threshold ? run + 1 : 0;
        if (run == hold) {
            return ts.times[i + 1 - hold];
        }
    }
    throw AnalysisError("no relaxation detected within series");
}

WaveFunction project_null_measurement(const WaveFunction& psi, real x_cut) {
    WaveFunction out = psi;
    Grid1D const& g = psi.grid();
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (g.x(i) >= x_cut) {
            out[i] = 0.0;
        }
    }
    if (!(norm_squared(out) > 0.0)) {
        throw AnalysisError("measurement found particle outside");
    }
    return renormalize(out);
}

real wkb_rate(real barrier, real omega_p) {
    if (!(barrier > 0.0)) {
        throw DomainError("WKB rate needs a positive barrier");
    }
    if (!(omega_p > 0.0)) {
        throw DomainError("WKB rate needs a positive plasma frequency");
    }
    real const ratio = barrier / omega_p;
    return omega_p / (2.0 * std::numbers::pi) * std::sqrt(864.0 * std::numbers::pi * ratio) *
           std::exp(-36.0 * ratio / 5.0);
}

real wkb_rate(const WashboardParams& w) {
    real const omega = plasma_frequency(w);
    return wkb_rate(barrier_height_washboard(w), omega);
}

namespace {

/// Bin edges over the ramp range with a width close to the requested one.
std::vector<real> bin_edges(const RampSpec& ramp, std::size_t n_bins) {
    std::vector<real> edges(n_bins + 1);
    real const width = (ramp.gamma_end - ramp.gamma_start) / static_cast<real>(n_bins);
    for (std::size_t b = 0; b <= n_bins; ++b) {
        edges[b] = ramp.gamma_start + static_cast<real>(b) * width;
    }
    edges.back() = ramp.gamma_end;
    return edges;
}

void fill_from_survival(SwitchingDistribution& d, const std::vector<real>& edges,
                        const std::vector<real>& surv) {
    std::size_t const nb = edges.size() - 1;
    d.bin_width = edges[1] - edges[0];
    d.gamma_bins.resize(nb);
    d.pdf.resize(nb);
    d.cumulative.resize(nb);
    real cum = 0.0;
    for (std::size_t b = 0; b < nb; ++b) {
        d.gamma_bins[b] = 0.5 * (edges[b] + edges[b + 1]);
        real const drop = surv[b] - surv[b + 1];
        if (drop < 0.0) {
            d.clipped_mass += -drop;
            ++d.clipped_bins;
        }
        real const mass = std::max(drop, 0.0);
        d.pdf[b] = mass / (edges[b + 1] - edges[b]);
        cum += mass;
        d.cumulative[b] = cum;
    }
}

}  // namespace

SwitchingDistribution switching_distribution_from_ramp(const TimeSeries& ts, const RampSpec& ramp,
                                                       real bin_width) {
    ramp.validate();
    if (!(bin_width > 0.0)) {
        throw DomainError("bin width must be positive");
    }
    if (ts.size() < 2) {
        throw AnalysisError("ramp series needs at least two samples");
    }
    real const range = ramp.gamma_end - ramp.gamma_start;
    if (!(range > 0.0)) {
        throw DomainError("ramp must sweep a non-empty bias range");
    }
    auto const nb = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(range / bin_width)));
    auto const edges = bin_edges(ramp, nb);

    std::vector<real> surv(nb + 1);
    surv.front() = ts.survival.front();
    surv.back() = ts.survival.back();
    std::size_t j = 1;
    for (std::size_t b = 1; b < nb; ++b) {
        real const ge = edges[b];
        while (j < ts.size() && ts.gamma[j] < ge) {
            ++j;
        }
        if (j >= ts.size()) {
            surv[b] = ts.survival.back();
            continue;
        }
        real const g0 = ts.gamma[j - 1];
        real const g1 = ts.gamma[j];
        real const f = g1 > g0 ? (ge - g0) / (g1 - g0) : 1.0;
        surv[b] = ts.survival[j - 1] + f * (ts.survival[j] - ts.survival[j - 1]);
    }

    SwitchingDistribution d;
    fill_from_survival(d, edges, surv);
    d.total_switch_probability = ts.survival.front() - ts.survival.back();
    return d;
}

SwitchingDistribution switching_distribution_rate_model(const RampSpec& ramp,
                                                        const std::function<real(real)>& rate_fn,
                                                        std::size_t n_bins, std::size_t substeps) {
    real const v = ramp.sweep_rate();
    if (!(v > 0.0)) {
        throw DomainError("rate model needs a strictly increasing ramp");
    }
    if (n_bins == 0 || substeps == 0) {
        throw DomainError("rate model needs at least one bin and one substep");
    }
    auto const edges = bin_edges(ramp, n_bins);
    std::vector<real> surv(n_bins + 1);
    surv[0] = 1.0;
    real integral = 0.0;
    auto rate_over_v = [&](real g) {
        real const r = rate_fn(g);
        if (!(r >= 0.0)) {
            throw DomainError("rate function must be non-negative");
        }
        return r / v;
    };
    real f_prev = rate_over_v(edges[0]);
    for (std::size_t b = 0; b < n_bins; ++b) {
        real const h = (edges[b + 1] - edges[b]) / static_cast<real>(substeps);
        for (std::size_t s = 1; s <= substeps; ++s) {
            real const f = rate_over_v(edges[b] + static_cast<real>(s) * h);
            integral += 0.5 * h * (f_prev + f);
            f_prev = f;
        }
        surv[b + 1] = std::exp(-integral);
    }
    SwitchingDistribution d;
    fill_from_survival(d, edges, surv);
    d.total_switch_probability = 1.0 - surv.back();
    return d;
}

RateTable::RateTable(std::vector<real> gammas, std::vector<real> rates) : gammas_{std::move(gammas)} {
    if (gammas_.size() != rates.size() || gammas_.size() < 2) {
        throw DomainError("rate table needs at least two (gamma, rate) pairs");
    }
    for (std::size_t i = 1; i < gammas_.size(); ++i) {
        if (!(gammas_[i] > gammas_[i - 1])) {
            throw DomainError("rate table gammas must be strictly increasing");
        }
    }
    log_rates_.reserve(rates.size());
    for (real r : rates) {
        if (!(r > 0.0)) {
            throw DomainError("rate table entries must be positive");
        }
        log_rates_.push_back(std::log(r));
    }
}

real RateTable::operator()(real gamma) const {
    auto it = std::upper_bound(gammas_.begin(), gammas_.end(), gamma);
    std::size_t hi = static_cast<std::size_t>(it - gammas_.begin());
    hi = std::clamp<std::size_t>(hi, 1, gammas_.size() - 1);
    std::size_t const lo = hi - 1;
    real const f = (gamma - gammas_[lo]) / (gammas_[hi] - gammas_[lo]);
    return std::exp(log_rates_[lo] + f * (log_rates_[hi] - log_rates_[lo]));
}

}  // namespace wmqt
