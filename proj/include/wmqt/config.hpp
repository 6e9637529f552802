#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wmqt/absorber.hpp"
#include "wmqt/analysis.hpp"
#include "wmqt/potentials.hpp"
#include "wmqt/propagator.hpp"

namespace wmqt {

enum class Mode { evolve, sweep, ramp, relax_after_measurement, pml_check };
enum class InitialState { relaxed, gaussian };

Mode parse_mode(const std::string& s);
std::string to_string(Mode m);

struct GridSpec {
    real dx = 0.025;
    /// Explicit bounds; when absent the washboard layout is used.
    std::optional<real> x_min;
    std::optional<real> x_max;
};

struct ExperimentConfig {
    Mode mode = Mode::evolve;
    WashboardParams washboard;
    std::optional<RampSpec> ramp;
    PmlParams pml;
    /// Layer onset; when absent it is placed by washboard_domain.
    std::optional<real> pml_x0;
    GridSpec grid;
    SolverConfig solver;
    InitialState initial_state = InitialState::relaxed;
    std::vector<real> sweep_gammas;
    std::string output_dir = "out";

    std::optional<FitWindow> fit_window;
    real knee_fraction = 0.9;
    /// Automatic fit windows end where survival first drops below this.
    real survival_floor = 1e-4;

    /// relax_after_measurement: evolution time before the null measurement.
    real measure_time = 200.0;
    /// Projector edge; defaults to the barrier top.
    std::optional<real> x_cut;

    real switching_bin_width = 0.01;
    /// Bias points whose fitted rates feed the switching rate model.
    std::vector<real> rate_model_gammas;
    /// Duration of the static runs used for the rate model.
    real rate_model_t_end = 400.0;

    std::vector<real> pml_check_k{0.5, 1.0, 2.0, 3.0};
    real pml_check_dt = 0.05;
    real pml_check_dx = 0.05;
};

/// Parses `key = value` lines (dotted keys, `#` comments, comma-separated
/// lists). Unknown and duplicate keys are rejected. Every default that is
/// applied is written to `log`. A mode given on the command line must agree
/// with a `mode` key in the file.
ExperimentConfig load_config(const std::string& path, std::ostream& log,
                             std::optional<Mode> cli_mode = std::nullopt);

ExperimentConfig parse_config(const std::string& text, std::ostream& log,
                              std::optional<Mode> cli_mode = std::nullopt);

/// Physics and mode-specific checks; throws ConfigError naming the field.
void validate(const ExperimentConfig& cfg);

}  // namespace wmqt
