// wmqt <mode> --config <path> [--threads N] [--out DIR]

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <streambuf>

#include "CLI11.hpp"
#include "wmqt/errors.hpp"
#include "wmqt/experiment.hpp"

namespace {

class TeeBuf : public std::streambuf {
public:
    TeeBuf(std::streambuf* a, std::streambuf* b) : a_(a), b_(b) {}

protected:
    int overflow(int c) override {
        if (c == traits_type::eof()) {
            return traits_type::not_eof(c);
        }
        auto const ch = traits_type::to_char_type(c);
        if (a_->sputc(ch) == traits_type::eof() || b_->sputc(ch) == traits_type::eof()) {
            return traits_type::eof();
        }
        return c;
    }
    int sync() override { return (a_->pubsync() | b_->pubsync()) == 0 ? 0 : -1; }

private:
    std::streambuf* a_;
    std::streambuf* b_;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tilted-washboard tunneling simulator"};
    std::string mode_name;
    std::string config_path;
    int threads = 0;
    std::string out_dir;
    app.add_option("mode", mode_name, "evolve | sweep | ramp | relax_after_measurement | pml_check")
        ->required();
    app.add_option("--config", config_path, "key = value config file")->required()->check(CLI::ExistingFile);
    app.add_option("--threads", threads, "worker threads for independent runs (0: all cores)")
        ->check(CLI::NonNegativeNumber);
    app.add_option("--out", out_dir, "output directory (overrides output_dir)");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int const rc = app.exit(e);
        return rc == 0 ? 0 : wmqt::exit_config;
    }

    std::ostringstream captured;
    TeeBuf tee{std::clog.rdbuf(), captured.rdbuf()};
    std::ostream log{&tee};

    int rc = wmqt::exit_config;
    std::filesystem::path out;
    try {
        wmqt::ExperimentConfig const cfg =
            wmqt::load_config(config_path, log, wmqt::parse_mode(mode_name));
        wmqt::RunOptions opts;
        opts.threads = threads;
        if (!out_dir.empty()) {
            opts.out_dir = out_dir;
        }
        out = opts.out_dir.value_or(cfg.output_dir);
        rc = wmqt::run_experiment(cfg, opts, log);
    } catch (const wmqt::ConfigError& e) {
        log << "config error: " << e.what() << '\n';
    } catch (const std::exception& e) {
        log << "error: " << e.what() << '\n';
    }
    log.flush();

    if (!out.empty() && std::filesystem::is_directory(out)) {
        std::ofstream f{out / "run.log"};
        f << captured.str();
    }
    return rc;
}
