#include "doctest.h"

#include <filesystem>
#include <sstream>

#include "wmqt/config.hpp"
#include "wmqt/errors.hpp"

using namespace wmqt;

namespace {

ExperimentConfig parse(const std::string& text, std::optional<Mode> mode = std::nullopt) {
    std::ostringstream log;
    return parse_config(text, log, mode);
}

std::string error_of(const std::string& text) {
    try {
        parse(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST_CASE("minimal config fills and logs the defaults") {
    std::ostringstream log;
    auto const cfg = parse_config("mode = evolve\nV0 = 2\ngamma = 0.4\n", log);
    CHECK(cfg.mode == Mode::evolve);
    CHECK(cfg.washboard.V0 == 2.0);
    CHECK(cfg.washboard.gamma == 0.4);
    CHECK(cfg.grid.dx == 0.025);
    CHECK(cfg.solver.dt == 0.005);
    CHECK(cfg.pml.A == 1e-3);
    CHECK(cfg.pml.l_ext == 1e3);
    CHECK(cfg.pml.width == 1e3);
    std::string const text = log.str();
    CHECK(text.find("default grid.dx = 0.025") != std::string::npos);
    CHECK(text.find("default solver.dt = 0.005") != std::string::npos);
    CHECK(text.find("default pml.A = 0.001") != std::string::npos);
    CHECK(text.find("default pml.l_ext = 1000") != std::string::npos);
    CHECK(text.find("default pml.width = 1000") != std::string::npos);
    CHECK(text.find("default V0") == std::string::npos);
    CHECK(text.find("default gamma ") == std::string::npos);
}

TEST_CASE("every key is accepted") {
    auto const cfg = parse(R"(
# all of them
mode = ramp
V0 = 3
gamma = 0.2
initial_state = gaussian
output_dir = somewhere
grid.dx = 0.04
grid.x_min = -20
grid.x_max = 1100
solver.dt = 0.01
solver.t_end = 50
solver.observe_every = 10
pml.A = 2e-3
pml.l_ext = 500
pml.width = 900
pml.x0 = 40
pml.x0_left = -10
pml.sides = right
ramp.gamma_start = 0.1
ramp.gamma_end = 0.9
ramp.T = 100
ramp.shape = linear
sweep.gammas = 0.1, 0.2
fit.window_lo = 10
fit.window_hi = 40
fit.knee_fraction = 0.8
measurement.t_measure = 5
measurement.x_cut = 2.5
switching.bin_width = 0.02
switching.rate_gammas = 0.3, 0.4, 0.5
switching.rate_t_end = 30
pml_check.k = 1, 2
pml_check.dt = 0.02
pml_check.dx = 0.04
)");
    CHECK(cfg.mode == Mode::ramp);
    CHECK(cfg.initial_state == InitialState::gaussian);
    CHECK(cfg.output_dir == "somewhere");
    CHECK(*cfg.grid.x_min == -20.0);
    CHECK(cfg.solver.observe_every == 10);
    CHECK(*cfg.pml_x0 == 40.0);
    CHECK(cfg.ramp->gamma_end == 0.9);
    CHECK(cfg.sweep_gammas == std::vector<real>{0.1, 0.2});
    CHECK(cfg.fit_window->lo == 10.0);
    CHECK(cfg.fit_window->hi == 40.0);
    CHECK(*cfg.x_cut == 2.5);
    CHECK(cfg.rate_model_gammas.size() == 3);
    CHECK(cfg.pml_check_k == std::vector<real>{1.0, 2.0});
    CHECK(cfg.pml_check_dx == 0.04);
}

TEST_CASE("comments and blank lines are ignored") {
    auto const cfg = parse("\n  # header\nmode = sweep # inline\n\nsweep.gammas = 0.5,0.6\n");
    CHECK(cfg.sweep_gammas.size() == 2);
}

TEST_CASE("rejections") {
    CHECK(error_of("gamma = 1.2\n").find("gamma must lie in [0,1]") != std::string::npos);
    CHECK(error_of("V0 = -1\n").find("V0 must be positive") != std::string::npos);
    CHECK(error_of("V0 = 2\nV0 = 3\n").find("duplicate key 'V0'") != std::string::npos);
    CHECK(error_of("V0 = 2\nbogus = 3\n").find("line 2: unknown key 'bogus'") != std::string::npos);
    CHECK(error_of("V0 2\n").find("expected 'key = value'") != std::string::npos);
    CHECK(error_of("V0 = two\n").find("V0: expected a number") != std::string::npos);
    CHECK(error_of("mode = nonsense\n").find("mode") != std::string::npos);
    CHECK(error_of("pml.sides = up\n").find("pml.sides") != std::string::npos);
    CHECK(error_of("solver.observe_every = -1\n").find("solver.observe_every") != std::string::npos);
    CHECK(error_of("mode = sweep\n").find("sweep mode requires sweep.gammas") != std::string::npos);
    CHECK(error_of("mode = sweep\nsweep.gammas = 0.5, 1.0\n").find("sweep.gammas") != std::string::npos);
    CHECK(error_of("mode = ramp\n").find("ramp mode requires ramp.T") != std::string::npos);
    CHECK(error_of("mode = ramp\nramp.T = 10\nramp.gamma_start = 0.8\nramp.gamma_end = 0.2\n")
              .find("ramp requires") != std::string::npos);
    CHECK(error_of("grid.x_min = 3\n").find("given together") != std::string::npos);
    CHECK(error_of("solver.dt = 0\n").find("solver.dt") != std::string::npos);
    CHECK(error_of("pml.A = -1\n").find("pml.A") != std::string::npos);
    CHECK(error_of("gamma = 1\n").find("below 1") != std::string::npos);
    CHECK(error_of("mode = pml_check\npml_check.k = 0\n").find("pml_check.k") != std::string::npos);
}

TEST_CASE("fit window upper bound defaults to t_end") {
    auto const cfg = parse("solver.t_end = 321\nfit.window_lo = 100\n");
    REQUIRE(cfg.fit_window);
    CHECK(cfg.fit_window->hi == 321.0);
    CHECK(!parse("V0 = 2\n").fit_window);
}

TEST_CASE("command-line mode") {
    CHECK(parse("V0 = 2\n", Mode::pml_check).mode == Mode::pml_check);
    CHECK(parse("mode = evolve\n", Mode::evolve).mode == Mode::evolve);
    CHECK_THROWS_AS(parse("mode = evolve\n", Mode::pml_check), ConfigError);
    CHECK(parse_mode("relax_after_measurement") == Mode::relax_after_measurement);
    CHECK_THROWS_AS(parse_mode("fly"), ConfigError);
    for (Mode m : {Mode::evolve, Mode::sweep, Mode::ramp, Mode::relax_after_measurement, Mode::pml_check}) {
        CHECK(parse_mode(to_string(m)) == m);
    }
}

TEST_CASE("missing file") {
    std::ostringstream log;
    CHECK_THROWS_AS(load_config("/nonexistent/config.txt", log), ConfigError);
}

TEST_CASE("shipped example configs load and validate") {
    std::size_t seen = 0;
    for (auto const& e : std::filesystem::directory_iterator(WMQT_CONFIG_DIR)) {
        if (e.path().extension() != ".cfg") continue;
        CAPTURE(e.path().string());
        std::ostringstream log;
        ExperimentConfig const cfg = load_config(e.path().string(), log);
        CHECK_NOTHROW(validate(cfg));
        ++seen;
    }
    CHECK(seen == 5);
}
