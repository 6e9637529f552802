#include "wmqt/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

#include "wmqt/csv.hpp"
#include "wmqt/errors.hpp"

namespace wmqt {

namespace {

std::string trim(const std::string& s) {
    auto const b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return {};
    }
    auto const e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

real parse_real(const std::string& key, const std::string& v) {
    real out = 0.0;
    auto const* first = v.data();
    auto const* last = v.data() + v.size();
    if (!v.empty() && *first == '+') {
        ++first;
    }
    auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc{} || ptr != last) {
        throw ConfigError(key + ": expected a number, got '" + v + "'");
    }
    return out;
}

std::size_t parse_count(const std::string& key, const std::string& v) {
    std::size_t out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size()) {
        throw ConfigError(key + ": expected a non-negative integer, got '" + v + "'");
    }
    return out;
}

std::vector<real> parse_list(const std::string& key, const std::string& v) {
    std::vector<real> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        out.push_back(parse_real(key, trim(item)));
    }
    if (out.empty()) {
        throw ConfigError(key + ": empty list");
    }
    return out;
}

std::string list_to_string(const std::vector<real>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        s += (i ? ", " : "") + format_real(v[i]);
    }
    return s;
}

PmlSides parse_sides(const std::string& v) {
    if (v == "right") return PmlSides::right;
    if (v == "left") return PmlSides::left;
    if (v == "both") return PmlSides::both;
    throw ConfigError("pml.sides must be one of right, left, both; got '" + v + "'");
}

std::string sides_name(PmlSides s) {
    switch (s) {
        case PmlSides::right: return "right";
        case PmlSides::left: return "left";
        case PmlSides::both: return "both";
    }
    return "right";
}

RampSpec& ramp_of(ExperimentConfig& c) {
    if (!c.ramp) {
        c.ramp = RampSpec{};
    }
    return *c.ramp;
}

/// Setter and default-describer for one key.
struct Field {
    std::function<void(ExperimentConfig&, const std::string&)> set;
    std::function<std::string(const ExperimentConfig&)> show;
};

std::map<std::string, Field> const& fields() {
    using C = ExperimentConfig;
    using S = std::string;
    auto num = [](real C::*m) {
        return Field{[m](C& c, const S& v) { c.*m = parse_real("", v); },
                     [m](const C& c) { return format_real(c.*m); }};
    };
    static std::map<std::string, Field> const table = {
        {"mode", {[](C& c, const S& v) { c.mode = parse_mode(v); },
                  [](const C& c) { return to_string(c.mode); }}},
        {"V0", {[](C& c, const S& v) { c.washboard.V0 = parse_real("V0", v); },
                [](const C& c) { return format_real(c.washboard.V0); }}},
        {"gamma", {[](C& c, const S& v) { c.washboard.gamma = parse_real("gamma", v); },
                   [](const C& c) { return format_real(c.washboard.gamma); }}},
        {"initial_state",
         {[](C& c, const S& v) {
              if (v == "relaxed") {
                  c.initial_state = InitialState::relaxed;
              } else if (v == "gaussian") {
                  c.initial_state = InitialState::gaussian;
              } else {
                  throw ConfigError("initial_state must be relaxed or gaussian; got '" + v + "'");
              }
          },
          [](const C& c) {
              return S{c.initial_state == InitialState::relaxed ? "relaxed" : "gaussian"};
          }}},
        {"output_dir", {[](C& c, const S& v) { c.output_dir = v; },
                        [](const C& c) { return c.output_dir; }}},
        {"grid.dx", {[](C& c, const S& v) { c.grid.dx = parse_real("grid.dx", v); },
                     [](const C& c) { return format_real(c.grid.dx); }}},
        {"grid.x_min", {[](C& c, const S& v) { c.grid.x_min = parse_real("grid.x_min", v); },
                        [](const C&) { return S{"auto"}; }}},
        {"grid.x_max", {[](C& c, const S& v) { c.grid.x_max = parse_real("grid.x_max", v); },
                        [](const C&) { return S{"auto"}; }}},
        {"solver.dt", {[](C& c, const S& v) { c.solver.dt = parse_real("solver.dt", v); },
                       [](const C& c) { return format_real(c.solver.dt); }}},
        {"solver.t_end", {[](C& c, const S& v) { c.solver.t_end = parse_real("solver.t_end", v); },
                          [](const C& c) { return format_real(c.solver.t_end); }}},
        {"solver.observe_every",
         {[](C& c, const S& v) { c.solver.observe_every = parse_count("solver.observe_every", v); },
          [](const C& c) { return std::to_string(c.solver.observe_every); }}},
        {"pml.A", {[](C& c, const S& v) { c.pml.A = parse_real("pml.A", v); },
                   [](const C& c) { return format_real(c.pml.A); }}},
        {"pml.l_ext", {[](C& c, const S& v) { c.pml.l_ext = parse_real("pml.l_ext", v); },
                       [](const C& c) { return format_real(c.pml.l_ext); }}},
        {"pml.width", {[](C& c, const S& v) { c.pml.width = parse_real("pml.width", v); },
                       [](const C& c) { return format_real(c.pml.width); }}},
        {"pml.x0", {[](C& c, const S& v) { c.pml_x0 = parse_real("pml.x0", v); },
                    [](const C&) { return S{"auto (barrier top + 8 pi)"}; }}},
        {"pml.x0_left", {[](C& c, const S& v) { c.pml.x0_left = parse_real("pml.x0_left", v); },
                         [](const C&) { return S{"auto"}; }}},
        {"pml.sides", {[](C& c, const S& v) { c.pml.sides = parse_sides(v); },
                       [](const C& c) { return sides_name(c.pml.sides); }}},
        {"ramp.gamma_start",
         {[](C& c, const S& v) { ramp_of(c).gamma_start = parse_real("ramp.gamma_start", v); },
          [](const C& c) { return format_real(c.ramp ? c.ramp->gamma_start : 0.0); }}},
        {"ramp.gamma_end",
         {[](C& c, const S& v) { ramp_of(c).gamma_end = parse_real("ramp.gamma_end", v); },
          [](const C& c) { return format_real(c.ramp ? c.ramp->gamma_end : 1.0); }}},
        {"ramp.T", {[](C& c, const S& v) { ramp_of(c).T = parse_real("ramp.T", v); },
                    [](const C& c) { return format_real(c.ramp ? c.ramp->T : RampSpec{}.T); }}},
        {"ramp.shape",
         {[](C& c, const S& v) {
              if (v != "linear") {
                  throw ConfigError("ramp.shape must be linear; got '" + v + "'");
              }
              ramp_of(c).shape = RampShape::linear;
          },
          [](const C&) { return S{"linear"}; }}},
        {"sweep.gammas", {[](C& c, const S& v) { c.sweep_gammas = parse_list("sweep.gammas", v); },
                          [](const C& c) { return list_to_string(c.sweep_gammas); }}},
        {"fit.window_lo",
         {[](C& c, const S& v) {
              if (!c.fit_window) c.fit_window = FitWindow{0.0, 0.0};
              c.fit_window->lo = parse_real("fit.window_lo", v);
          },
          [](const C&) { return S{"auto (twice the relaxation time)"}; }}},
        {"fit.window_hi",
         {[](C& c, const S& v) {
              if (!c.fit_window) c.fit_window = FitWindow{0.0, 0.0};
              c.fit_window->hi = parse_real("fit.window_hi", v);
          },
          [](const C&) { return S{"auto (t_end)"}; }}},
        {"fit.knee_fraction", num(&C::knee_fraction)},
        {"fit.survival_floor", num(&C::survival_floor)},
        {"measurement.t_measure", num(&C::measure_time)},
        {"measurement.x_cut", {[](C& c, const S& v) { c.x_cut = parse_real("measurement.x_cut", v); },
                               [](const C&) { return S{"auto (barrier top)"}; }}},
        {"switching.bin_width", num(&C::switching_bin_width)},
        {"switching.rate_gammas",
         {[](C& c, const S& v) { c.rate_model_gammas = parse_list("switching.rate_gammas", v); },
          [](const C& c) { return list_to_string(c.rate_model_gammas); }}},
        {"switching.rate_t_end", num(&C::rate_model_t_end)},
        {"pml_check.k", {[](C& c, const S& v) { c.pml_check_k = parse_list("pml_check.k", v); },
                         [](const C& c) { return list_to_string(c.pml_check_k); }}},
        {"pml_check.dt", num(&C::pml_check_dt)},
        {"pml_check.dx", num(&C::pml_check_dx)},
    };
    return table;
}

}  // namespace

Mode parse_mode(const std::string& s) {
    if (s == "evolve") return Mode::evolve;
    if (s == "sweep") return Mode::sweep;
    if (s == "ramp") return Mode::ramp;
    if (s == "relax_after_measurement") return Mode::relax_after_measurement;
    if (s == "pml_check") return Mode::pml_check;
    throw ConfigError("unknown mode '" + s + "'");
}

std::string to_string(Mode m) {
    switch (m) {
        case Mode::evolve: return "evolve";
        case Mode::sweep: return "sweep";
        case Mode::ramp: return "ramp";
        case Mode::relax_after_measurement: return "relax_after_measurement";
        case Mode::pml_check: return "pml_check";
    }
    return "evolve";
}

ExperimentConfig parse_config(const std::string& text, std::ostream& log,
                              std::optional<Mode> cli_mode) {
    ExperimentConfig cfg;
    std::map<std::string, std::string> seen;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto const hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        auto const eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
        }
        std::string const key = trim(line.substr(0, eq));
        std::string const value = trim(line.substr(eq + 1));
        auto const it = fields().find(key);
        if (it == fields().end()) {
            throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        }
        if (!seen.emplace(key, value).second) {
            throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
        }
        try {
            it->second.set(cfg, value);
        } catch (const ConfigError& e) {
            std::string msg = e.what();
            if (msg.rfind(": ", 0) == 0) {
                msg = key + msg;
            }
            throw ConfigError(msg);
        }
    }

    if (cfg.fit_window && !seen.count("fit.window_hi")) {
        cfg.fit_window->hi = cfg.solver.t_end;
    }

    if (cli_mode) {
        if (seen.count("mode") && cfg.mode != *cli_mode) {
            throw ConfigError("mode '" + to_string(*cli_mode) + "' on the command line conflicts with mode '" +
                              to_string(cfg.mode) + "' in the config");
        }
        cfg.mode = *cli_mode;
        seen.emplace("mode", to_string(cfg.mode));
    }

    for (auto const& [key, field] : fields()) {
        if (!seen.count(key)) {
            log << "default " << key << " = " << field.show(cfg) << '\n';
        }
    }
    validate(cfg);
    return cfg;
}

ExperimentConfig load_config(const std::string& path, std::ostream& log,
                             std::optional<Mode> cli_mode) {
    std::ifstream f(path);
    if (!f) {
        throw ConfigError("cannot open config file '" + path + "'");
    }
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str(), log, cli_mode);
}

void validate(const ExperimentConfig& c) {
    auto fail = [](const std::string& m) { throw ConfigError(m); };
    auto const& w = c.washboard;
    if (!(w.V0 > 0.0)) fail("V0 must be positive (got " + format_real(w.V0) + ")");
    if (!(w.gamma >= 0.0 && w.gamma <= 1.0)) {
        fail("gamma must lie in [0,1] (got " + format_real(w.gamma) + ")");
    }
    if (!(c.grid.dx > 0.0)) fail("grid.dx must be positive");
    if (c.grid.x_min.has_value() != c.grid.x_max.has_value()) {
        fail("grid.x_min and grid.x_max must be given together");
    }
    if (c.grid.x_min && !(*c.grid.x_min < *c.grid.x_max)) fail("grid.x_min must be below grid.x_max");
    if (!(c.solver.dt > 0.0)) fail("solver.dt must be positive");
    if (!(c.solver.t_end > 0.0)) fail("solver.t_end must be positive");
    if (c.solver.observe_every == 0) fail("solver.observe_every must be at least 1");
    if (!(c.pml.A >= 0.0)) fail("pml.A must be non-negative");
    if (!(c.pml.l_ext > 0.0)) fail("pml.l_ext must be positive");
    if (!(c.pml.width > 0.0)) fail("pml.width must be positive");
    if (!(c.knee_fraction > 0.0 && c.knee_fraction < 1.0)) fail("fit.knee_fraction must lie in (0,1)");
    if (!(c.survival_floor > 0.0 && c.survival_floor < 1.0)) fail("fit.survival_floor must lie in (0,1)");
    if (c.fit_window && !(c.fit_window->lo < c.fit_window->hi)) {
        fail("fit.window_lo must be below fit.window_hi");
    }
    if (!(c.switching_bin_width > 0.0)) fail("switching.bin_width must be positive");

    bool const needs_well = c.mode == Mode::evolve || c.mode == Mode::relax_after_measurement;
    if (needs_well && w.gamma >= 1.0) {
        fail("gamma must be below 1 for a metastable well");
    }
    switch (c.mode) {
        case Mode::sweep:
            if (c.sweep_gammas.empty()) fail("sweep mode requires sweep.gammas");
            for (real g : c.sweep_gammas) {
                if (!(g >= 0.0 && g < 1.0)) {
                    fail("sweep.gammas entries must lie in [0,1) (got " + format_real(g) + ")");
                }
            }
            break;
        case Mode::ramp: {
            if (!c.ramp) fail("ramp mode requires ramp.T");
            auto const& r = *c.ramp;
            if (!(r.T > 0.0)) fail("ramp.T must be positive");
            if (!(0.0 <= r.gamma_start && r.gamma_start <= r.gamma_end && r.gamma_end <= 1.0)) {
                fail("ramp requires 0 <= ramp.gamma_start <= ramp.gamma_end <= 1");
            }
            if (!(r.gamma_start < 1.0)) fail("ramp.gamma_start must be below 1");
            for (real g : c.rate_model_gammas) {
                if (!(g >= 0.0 && g < 1.0)) fail("switching.rate_gammas entries must lie in [0,1)");
            }
            break;
        }
        case Mode::relax_after_measurement:
            if (!(c.measure_time >= 0.0)) fail("measurement.t_measure must be non-negative");
            break;
        case Mode::pml_check:
            for (real k : c.pml_check_k) {
                if (!(k > 0.0)) fail("pml_check.k entries must be positive");
            }
            if (!(c.pml_check_dt > 0.0)) fail("pml_check.dt must be positive");
            if (!(c.pml_check_dx > 0.0)) fail("pml_check.dx must be positive");
            break;
        case Mode::evolve:
            break;
    }
}

}  // namespace wmqt
