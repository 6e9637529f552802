#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "wmqt/analysis.hpp"
#include "wmqt/config.hpp"
#include "wmqt/propagator.hpp"

namespace wmqt {

/// Exit codes of the command-line driver.
enum ExitCode : int {
    exit_ok = 0,
    exit_config = 2,
    exit_numerical = 3,
    exit_analysis = 4,
};

struct RunOptions {
    /// Worker threads for independent runs; 0 means hardware concurrency.
    int threads = 0;
    std::optional<std::string> out_dir;
};

/// Grid and absorber for a washboard run at bias `gamma`, honouring explicit
/// grid bounds and layer onset from the config.
Domain make_domain(const ExperimentConfig& cfg, real gamma);

WaveFunction make_initial_state(const ExperimentConfig& cfg, const WashboardParams& w,
                                const Grid1D& grid);

/// Late-window decay fit. A preliminary fit over the second half of the
/// series sets the asymptotic rate; the relaxation time is the first
/// sustained crossing of `knee_fraction` of it; the final window starts one
/// relaxation time after the knee. Without an explicit window the series is
/// cut where survival first drops below `survival_floor`.
struct AsymptoticFit {
    DecayFit fit;
    std::optional<real> knee;
};

AsymptoticFit fit_asymptotic(const TimeSeries& ts, real knee_fraction,
                             std::optional<FitWindow> window = std::nullopt,
                             real survival_floor = 1e-4);

struct BiasRun {
    real gamma = 0.0;
    TimeSeries series;
    AsymptoticFit fit;
    real rate_wkb = 0.0;
    std::optional<std::string> error;
};

/// Static-bias evolution from the configured initial state plus its fit.
BiasRun run_static_bias(const ExperimentConfig& cfg, real gamma);

/// Independent static runs, executed on `threads` workers and returned in
/// ascending gamma order.
std::vector<BiasRun> run_bias_sweep(const ExperimentConfig& cfg, std::vector<real> gammas,
                                    int threads);

struct MeasurementRun {
    TimeSeries reference;  // unprojected, t in [0, t_measure + t_end]
    TimeSeries post;       // after the null measurement, t relative to it
    real x_cut = 0.0;
    real rate_asymptotic = 0.0;
    real knee = 0.0;
    DecayFit post_fit;
};

/// Evolves to t_measure, applies a null measurement at x_cut, and evolves
/// both the projected and the unprojected state for t_end.
MeasurementRun run_measurement(const ExperimentConfig& cfg);

struct RampRun {
    TimeSeries series;
    SwitchingDistribution from_ramp;
    std::optional<SwitchingDistribution> rate_model;
    std::vector<BiasRun> rate_points;
};

RampRun run_ramp(const ExperimentConfig& cfg, int threads);

struct PmlCheckRow {
    real k;
    real reflection;
};

std::vector<PmlCheckRow> run_pml_check(const ExperimentConfig& cfg, int threads);

void write_time_series(const std::string& path, const TimeSeries& ts,
                       const std::optional<std::string>& error = std::nullopt);

/// Executes the configured mode and writes its CSV outputs.
/// Returns one of the ExitCode values.
int run_experiment(const ExperimentConfig& cfg, const RunOptions& opts, std::ostream& log);

}  // namespace wmqt
