#include "wmqt/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <functional>
#include <numbers>
#include <ostream>
#include <thread>

#include "wmqt/csv.hpp"
#include "wmqt/errors.hpp"
#include "wmqt/kernels.hpp"

namespace wmqt {

namespace {

int resolve_threads(int requested) {
    if (requested > 0) {
        return requested;
    }
    return static_cast<int>(std::max(1U, std::thread::hardware_concurrency()));
}

/// Runs fn(i) for i in [0, n) on up to `threads` workers. The first exception
/// (lowest index) is rethrown after all workers finish.
void parallel_indexed(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
    auto const workers = static_cast<std::size_t>(std::min<std::size_t>(resolve_threads(threads), n));
    std::vector<std::exception_ptr> errors(n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                kernels::set_threads(1);
                for (std::size_t i = next++; i < n; i = next++) {
                    try {
                        fn(i);
                    } catch (...) {
                        errors[i] = std::current_exception();
                    }
                }
            });
        }
    }
    for (auto const& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

std::vector<std::string> const time_series_columns{"t",      "gamma",  "survival",
                                                   "norm_full", "x_mean", "flux_at_xstar"};

/// Concatenates b (which started from a's final state) onto a.
TimeSeries append_series(TimeSeries a, const TimeSeries& b, real t_offset) {
    real const n0 = a.norm_full.front();
    for (std::size_t i = 1; i < b.size(); ++i) {
        a.times.push_back(b.times[i] + t_offset);
        a.gamma.push_back(b.gamma[i]);
        a.norm_full.push_back(b.norm_full[i]);
        a.survival.push_back(b.norm_full[i] / n0);
        a.x_mean.push_back(b.x_mean[i]);
        a.flux_at_xstar.push_back(b.flux_at_xstar[i]);
    }
    return a;
}

void warn_time_step(const ExperimentConfig& cfg, const Domain& dom, real gamma, std::ostream* log) {
    if (!log) {
        return;
    }
    WashboardParams const w{cfg.washboard.V0, gamma};
    real const edge = dom.pml.has_right() ? dom.pml.x0 : dom.grid.x_max();
    real umax = 0.0;
    for (std::size_t i = 0; i < dom.grid.size() && dom.grid.x(i) <= edge; ++i) {
        umax = std::max(umax, std::abs(washboard_eval(w, dom.grid.x(i))));
    }
    if (cfg.solver.dt * umax > 0.5) {
        *log << "warning: dt * max|U| = " << format_real(cfg.solver.dt * umax)
             << " exceeds 0.5 in the absorber-free region\n";
    }
}

}  // namespace

Domain make_domain(const ExperimentConfig& cfg, real gamma) {
    WashboardParams const w{cfg.washboard.V0, gamma};
    Domain dom = washboard_domain(w, cfg.grid.dx, cfg.pml);
    if (cfg.grid.x_min) {
        dom.grid = Grid1D::with_spacing(*cfg.grid.x_min, *cfg.grid.x_max, cfg.grid.dx);
    }
    if (cfg.pml_x0) {
        dom.pml.x0 = *cfg.pml_x0;
    }
    try {
        dom.pml.validate_against(dom.grid);
    } catch (const DomainError& e) {
        throw ConfigError(std::string("pml: ") + e.what());
    }
    return dom;
}

WaveFunction make_initial_state(const ExperimentConfig& cfg, const WashboardParams& w,
                                const Grid1D& grid) {
    if (cfg.initial_state == InitialState::gaussian) {
        return gaussian_ground_state(w, grid);
    }
    return imaginary_time_relax(w, grid, well_region(w));
}

AsymptoticFit fit_asymptotic(const TimeSeries& ts, real knee_fraction,
                             std::optional<FitWindow> window, real survival_floor) {
    if (ts.size() < 2) {
        throw AnalysisError("series too short to fit");
    }
    if (window) {
        return {fit_decay_rate(ts, *window), std::nullopt};
    }
    // stop before the slowly draining high-energy remnant dominates ln P
    std::size_t last = 0;
    while (last + 1 < ts.size() && ts.survival[last + 1] >= survival_floor) {
        ++last;
    }
    real const t_end = ts.times[last];
    if (last < 20) {
        throw AnalysisError("survival falls below fit.survival_floor before t = " +
                            std::to_string(ts.times[last + 1 < ts.size() ? last + 1 : last]));
    }
    DecayFit const prelim = fit_decay_rate(ts, {0.5 * t_end, t_end});
    if (!(prelim.rate > 0.0)) {
        return {prelim, std::nullopt};
    }
    real const knee = detect_relaxation_time(ts, prelim.rate, knee_fraction);
    real lo = 2.0 * knee;
    std::size_t in_window = 0;
    for (real t : ts.times) {
        in_window += t >= lo ? 1 : 0;
    }
    if (in_window < 10) {
        lo = knee;
    }
    return {fit_decay_rate(ts, {lo, t_end}), knee};
}

BiasRun run_static_bias(const ExperimentConfig& cfg, real gamma) {
    BiasRun run;
    run.gamma = gamma;
    WashboardParams const w{cfg.washboard.V0, gamma};
    Domain const dom = make_domain(cfg, gamma);
    WaveFunction const psi0 = make_initial_state(cfg, w, dom.grid);
    try {
        run.series = evolve(psi0, w, dom.pml, cfg.solver).series;
    } catch (const BlowUpError& e) {
        run.series = e.partial();
        run.error = e.what();
        return run;
    }
    run.fit = fit_asymptotic(run.series, cfg.knee_fraction, cfg.fit_window, cfg.survival_floor);
    run.rate_wkb = wkb_rate(w);
    return run;
}

std::vector<BiasRun> run_bias_sweep(const ExperimentConfig& cfg, std::vector<real> gammas,
                                    int threads) {
    std::sort(gammas.begin(), gammas.end());
    std::vector<BiasRun> runs(gammas.size());
    parallel_indexed(gammas.size(), threads,
                     [&](std::size_t i) { runs[i] = run_static_bias(cfg, gammas[i]); });
    return runs;
}

MeasurementRun run_measurement(const ExperimentConfig& cfg) {
    WashboardParams const& w = cfg.washboard;
    Domain const dom = make_domain(cfg, w.gamma);
    WaveFunction const psi0 = make_initial_state(cfg, w, dom.grid);

    MeasurementRun m;
    m.x_cut = cfg.x_cut.value_or(well_extrema(w).x_top);

    WaveFunction measured_from = psi0;
    TimeSeries reference;
    if (cfg.measure_time > 0.0) {
        SolverConfig pre = cfg.solver;
        pre.t_end = cfg.measure_time;
        auto first = evolve(psi0, w, dom.pml, pre);
        reference = std::move(first.series);
        measured_from = std::move(first.final_state);
    }
    auto cont = evolve(measured_from, w, dom.pml, cfg.solver);
    m.reference = reference.size() ? append_series(std::move(reference), cont.series, cfg.measure_time)
                                   : std::move(cont.series);

    WaveFunction const projected = project_null_measurement(measured_from, m.x_cut);
    m.post = evolve(projected, w, dom.pml, cfg.solver).series;

    m.rate_asymptotic = fit_asymptotic(m.reference, cfg.knee_fraction, std::nullopt, cfg.survival_floor).fit.rate;
    if (!(m.rate_asymptotic > 0.0)) {
        throw AnalysisError("reference run shows no decay; relaxation undefined");
    }
    m.knee = detect_relaxation_time(m.post, m.rate_asymptotic, cfg.knee_fraction);
    real const t_end = m.post.times.back();
    real lo = std::min(2.0 * m.knee, 0.5 * (m.knee + t_end));
    m.post_fit = fit_decay_rate(m.post, {lo, t_end});
    return m;
}

RampRun run_ramp(const ExperimentConfig& cfg, int threads) {
    RampSpec const ramp = *cfg.ramp;
    WashboardParams const w0{cfg.washboard.V0, ramp.gamma_start};
    Domain const dom = make_domain(cfg, ramp.gamma_start);
    WaveFunction const psi0 = make_initial_state(cfg, w0, dom.grid);

    SolverConfig solver = cfg.solver;
    solver.t_end = ramp.T;

    RampRun out;
    out.series = evolve(psi0, cfg.washboard.V0, ramp, dom.pml, solver).series;
    out.from_ramp = switching_distribution_from_ramp(out.series, ramp, cfg.switching_bin_width);

    if (!cfg.rate_model_gammas.empty()) {
        ExperimentConfig stat = cfg;
        stat.solver.t_end = cfg.rate_model_t_end;
        out.rate_points = run_bias_sweep(stat, cfg.rate_model_gammas, threads);
        std::vector<real> g;
        std::vector<real> r;
        for (auto const& p : out.rate_points) {
            if (p.error) {
                throw NumericalError("rate-model run at gamma " + format_real(p.gamma) + ": " + *p.error);
            }
            g.push_back(p.gamma);
            r.push_back(p.fit.fit.rate);
        }
        RateTable const table{g, r};
        out.rate_model = switching_distribution_rate_model(ramp, table, out.from_ramp.pdf.size());
    }
    return out;
}

std::vector<PmlCheckRow> run_pml_check(const ExperimentConfig& cfg, int threads) {
    std::vector<PmlCheckRow> rows(cfg.pml_check_k.size());
    parallel_indexed(rows.size(), threads, [&](std::size_t i) {
        real const k = cfg.pml_check_k[i];
        ReflectionOptions opts;
        opts.dt = cfg.pml_check_dt;
        real const sigma = 5.0 / k;
        PmlParams pml = cfg.pml;
        pml.sides = PmlSides::right;
        pml.x0 = 0.0;
        Grid1D const grid = Grid1D::with_spacing(-(opts.standoff + 8.5) * sigma - opts.sink_width,
                                                 pml.width + 0.49 * cfg.pml_check_dx, cfg.pml_check_dx);
        rows[i] = {k, reflection_coefficient(pml, k, grid, opts)};
    });
    return rows;
}

void write_time_series(const std::string& path, const TimeSeries& ts,
                       const std::optional<std::string>& error) {
    CsvWriter csv{path, time_series_columns};
    for (std::size_t i = 0; i < ts.size(); ++i) {
        csv.row({ts.times[i], ts.gamma[i], ts.survival[i], ts.norm_full[i], ts.x_mean[i],
                 ts.flux_at_xstar[i]});
    }
    if (error) {
        csv.error_sentinel(*error);
    }
}

namespace {

void write_rates(const std::string& path, const std::vector<BiasRun>& runs) {
    CsvWriter csv{path, {"gamma", "rate_fitted", "rate_wkb", "residual_rms", "window_lo", "window_hi"}};
    for (auto const& r : runs) {
        if (r.error) {
            csv.error_sentinel("gamma " + format_real(r.gamma) + ": " + *r.error);
            continue;
        }
        auto const& f = r.fit.fit;
        csv.row({r.gamma, f.rate, r.rate_wkb, f.residual_rms, f.window.lo, f.window.hi});
    }
}

void write_switching(const std::string& path, const SwitchingDistribution& d) {
    CsvWriter csv{path, {"gamma_bin_center", "pdf", "cumulative"}};
    for (std::size_t b = 0; b < d.pdf.size(); ++b) {
        csv.row({d.gamma_bins[b], d.pdf[b], d.cumulative[b]});
    }
}

int run_mode(const ExperimentConfig& cfg, const std::filesystem::path& out, int threads,
             std::ostream& log) {
    switch (cfg.mode) {
        case Mode::evolve: {
            warn_time_step(cfg, make_domain(cfg, cfg.washboard.gamma), cfg.washboard.gamma, &log);
            BiasRun const run = run_static_bias(cfg, cfg.washboard.gamma);
            write_time_series((out / "time_series.csv").string(), run.series, run.error);
            if (run.error) {
                log << "error: " << *run.error << '\n';
                return exit_numerical;
            }
            write_rates((out / "rates.csv").string(), {run});
            log << "gamma " << format_real(run.gamma) << ": rate " << format_real(run.fit.fit.rate)
                << " (wkb " << format_real(run.rate_wkb) << ")\n";
            return exit_ok;
        }
        case Mode::sweep: {
            auto const runs = run_bias_sweep(cfg, cfg.sweep_gammas, threads);
            bool failed = false;
            for (auto const& r : runs) {
                write_time_series((out / ("time_series_gamma_" + format_real(r.gamma) + ".csv")).string(),
                                  r.series, r.error);
                failed = failed || r.error.has_value();
                if (!r.error) {
                    log << "gamma " << format_real(r.gamma) << ": rate " << format_real(r.fit.fit.rate)
                        << " (wkb " << format_real(r.rate_wkb) << ")\n";
                }
            }
            write_rates((out / "rates.csv").string(), runs);
            return failed ? exit_numerical : exit_ok;
        }
        case Mode::ramp: {
            RampRun const run = run_ramp(cfg, threads);
            write_time_series((out / "time_series.csv").string(), run.series);
            write_switching((out / "switching.csv").string(), run.from_ramp);
            log << "switching probability " << format_real(run.from_ramp.total_switch_probability)
                << ", peak bin at gamma "
                << format_real(run.from_ramp.gamma_bins[run.from_ramp.peak_bin()]) << '\n';
            if (run.from_ramp.clipped_bins > 0) {
                log << "warning: clipped " << run.from_ramp.clipped_bins
                    << " negative pdf increments (mass " << format_real(run.from_ramp.clipped_mass) << ")\n";
            }
            if (run.rate_model) {
                write_switching((out / "switching_rate_model.csv").string(), *run.rate_model);
                write_rates((out / "rates.csv").string(), run.rate_points);
                log << "rate-model peak bin at gamma "
                    << format_real(run.rate_model->gamma_bins[run.rate_model->peak_bin()]) << '\n';
            }
            return exit_ok;
        }
        case Mode::relax_after_measurement: {
            MeasurementRun const m = run_measurement(cfg);
            write_time_series((out / "time_series_reference.csv").string(), m.reference);
            write_time_series((out / "time_series.csv").string(), m.post);
            CsvWriter csv{(out / "relaxation.csv").string(),
                          {"gamma", "t_measure", "x_cut", "knee_time", "rate_asymptotic",
                           "rate_post_knee", "rate_wkb"}};
            csv.row({cfg.washboard.gamma, cfg.measure_time, m.x_cut, m.knee, m.rate_asymptotic,
                     m.post_fit.rate, wkb_rate(cfg.washboard)});
            log << "relaxation time " << format_real(m.knee) << ", asymptotic rate "
                << format_real(m.rate_asymptotic) << ", post-knee rate " << format_real(m.post_fit.rate)
                << '\n';
            return exit_ok;
        }
        case Mode::pml_check: {
            auto const rows = run_pml_check(cfg, threads);
            CsvWriter csv{(out / "pml_report.csv").string(), {"k", "A", "l_ext", "width", "reflection"}};
            for (auto const& r : rows) {
                csv.row({r.k, cfg.pml.A, cfg.pml.l_ext, cfg.pml.width, r.reflection});
                log << "k " << format_real(r.k) << ": R = " << format_real(r.reflection) << '\n';
            }
            return exit_ok;
        }
    }
    return exit_config;
}

}  // namespace

int run_experiment(const ExperimentConfig& cfg, const RunOptions& opts, std::ostream& log) {
    std::filesystem::path const out = opts.out_dir.value_or(cfg.output_dir);
    try {
        validate(cfg);
        std::filesystem::create_directories(out);
        return run_mode(cfg, out, opts.threads, log);
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const DomainError& e) {
        log << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const NumericalError& e) {
        log << "numerical failure: " << e.what() << '\n';
        return exit_numerical;
    } catch (const AnalysisError& e) {
        log << "analysis failure: " << e.what() << '\n';
        return exit_analysis;
    }
}

}  // namespace wmqt
