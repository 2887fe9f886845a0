// tess: experiment driver for the mixed line-generated tessellation process.
//
//   tess simulate|verify|compare-restriction|compare-iteration|lifetime
//        --config <path> [--jobs N] [--iterate-literal] [--seed S]
//
// Exit codes: 0 all checks pass, 1 statistical failure, 2 config error,
// 3 IO error. Seed precedence: --seed > TESS_SEED > run.master_seed.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "mecke/commands.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_stat_fail = 1;
constexpr int exit_config = 2;
constexpr int exit_io = 3;

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << content;
    out.close();
    if (!out) throw IoError("failed writing " + path.string());
}

std::filesystem::path prepare_output_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir + ": " + ec.message());
    return dir;
}

mecke::ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw mecke::ConfigError("cannot read config file " + path);
    return mecke::parse_config(in);
}

std::uint64_t parse_seed(const std::string& text, const char* origin) {
    try {
        return mecke::detail::parse_natural(origin, text);
    } catch (const mecke::ConfigError&) {
        throw mecke::ConfigError(std::string(origin) + ": invalid seed '" + text + "'");
    }
}

int emit_report(const mecke::Report& report, const std::filesystem::path& dir, const std::string& mode) {
    const std::string text = report.text();
    write_file(dir / (mode + "_report.txt"), text);
    std::cout << text;
    return report.all_pass() ? exit_ok : exit_stat_fail;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Mixed line-generated tessellations: simulation and verification"};
    app.require_subcommand(1);

    std::string config_path;
    mecke::CommandOptions opt;
    std::optional<std::string> seed_flag;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "Experiment config file")->required();
        sub->add_option("--jobs", opt.jobs, "Worker threads for replications")->check(CLI::PositiveNumber);
        sub->add_flag("--iterate-literal", opt.iterate_literal,
                      "Nested runs as full window processes cut out to each cell");
        sub->add_option("--seed", seed_flag, "Master seed (overrides TESS_SEED and the config)");
    };
    auto* simulate = app.add_subcommand("simulate", "Simulate and export CSV summaries and SVG snapshots");
    auto* verify = app.add_subcommand("verify", "Run the closed-form and construction battery");
    auto* restriction = app.add_subcommand("compare-restriction", "Cutout vs native run in a subwindow");
    auto* iteration = app.add_subcommand("compare-iteration", "Nested iteration vs direct run");
    auto* lifetime = app.add_subcommand("lifetime", "Waiting time until a convex subset is hit");
    for (auto* sub : {simulate, verify, restriction, iteration, lifetime}) add_common(sub);
    verify->add_option("--debug-rate-factor", opt.debug_rate_factor, "Multiply the decision clock rate")
        ->group("Debug");
    restriction->add_option("--debug-native-time-factor", opt.debug_native_time_factor, "Multiply the native t_hat")
        ->group("Debug");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_config;
    }

    try {
        mecke::ExperimentConfig cfg = load_config(config_path);
        if (seed_flag) {
            cfg.master_seed = parse_seed(*seed_flag, "--seed");
        } else if (const char* env = std::getenv("TESS_SEED")) {
            cfg.master_seed = parse_seed(env, "TESS_SEED");
        }

        if (simulate->parsed()) {
            const auto out = mecke::run_simulate(cfg, opt);
            const auto dir = prepare_output_dir(cfg.output_dir);
            write_file(dir / "summary.csv", out.csv);
            for (const auto& [t, svg] : out.snapshots) write_file(dir / fmt::format("snapshot_t{:g}.svg", t), svg);
            std::cout << fmt::format("replications={} time={:g} mean_cell_count={:.6g}\n", cfg.replications,
                                     cfg.time_t, out.mean_cell_count);
            return exit_ok;
        }

        mecke::Report report;
        std::string mode;
        if (verify->parsed()) {
            mode = "verify";
            report = mecke::run_verify(cfg, opt);
        } else if (restriction->parsed()) {
            mode = "compare-restriction";
            report = mecke::run_compare_restriction(cfg, opt);
        } else if (iteration->parsed()) {
            mode = "compare-iteration";
            report = mecke::run_compare_iteration(cfg, opt);
        } else {
            mode = "lifetime";
            report = mecke::run_lifetime(cfg, opt);
        }
        return emit_report(report, prepare_output_dir(cfg.output_dir), mode);
    } catch (const mecke::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << '\n';
        return exit_io;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config;
    }
}
