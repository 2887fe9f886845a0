#pragma once

// The experiment drivers behind the `tess` subcommands. Each returns its
// outputs in memory; writing files is left to the caller.

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "mecke/config.hpp"
#include "mecke/export.hpp"
#include "mecke/suites.hpp"

namespace mecke {

struct CommandOptions {
    unsigned jobs = 1;
    bool iterate_literal = false;
    double debug_rate_factor = 1.0;         // corrupts the decision clock in verify
    double debug_native_time_factor = 1.0;  // corrupts t_hat in compare-restriction
};

struct SimulationOutput {
    std::string csv;
    std::vector<std::pair<double, std::string>> snapshots;  // (time, svg)
    double mean_cell_count = 0.0;
};

inline SimulationOutput run_simulate(const ExperimentConfig& cfg, const CommandOptions& opt) {
    const RunContext ctx{cfg.master_seed, opt.jobs};
    const std::uint64_t seed = derive_key(cfg.master_seed, purpose::simulate);
    const auto summaries = replicate(cfg.replications, ctx.jobs, [&](std::size_t i) {
        auto rng = ctx.stream(purpose::simulate, i);
        return summarize(simulate(cfg.window, cfg.measure, cfg.time_t, rng));
    });

    SimulationOutput out;
    out.csv = summary_csv_header;
    double cells = 0.0;
    for (std::size_t i = 0; i < summaries.size(); ++i) {
        out.csv += summary_csv_row(i, seed, cfg.time_t, summaries[i]);
        cells += static_cast<double>(summaries[i].cell_count);
    }
    out.mean_cell_count = cells / static_cast<double>(summaries.size());

    // Replication 0 replayed through the snapshot times; the stored pending
    // decision time keeps the path identical to the summary run.
    std::vector<double> times = cfg.snapshot_times.empty() ? std::vector<double>{cfg.time_t} : cfg.snapshot_times;
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());
    auto rng = ctx.stream(purpose::simulate, 0);
    ContinuousRun run(init(cfg.window, cfg.measure));
    for (double t : times) {
        advance_to(run, t, rng);
        out.snapshots.emplace_back(t, to_svg(snapshot(run)));
    }
    return out;
}

inline Report run_verify(const ExperimentConfig& cfg, const CommandOptions& opt) {
    const RunContext ctx{cfg.master_seed, opt.jobs};
    const std::size_t n = cfg.replications;
    const double q_window = measure_hitting(cfg.measure, cfg.window);
    Report report;
    report.add(check_decision_count_law(ctx, cfg.window, cfg.measure, cfg.time_t, n, opt.debug_rate_factor));
    report.add(check_sum_exp_cdf(ctx, 5, q_window, n));
    report.add(check_partial_sum_normalization(q_window));
    report.add(check_partial_sum_identity(q_window));
    report.add(check_lifetime_series_grid());
    report.add(check_first_hit(ctx, "first_hit_ks", cfg.window, cfg.measure, cfg.subset.value_or(cfg.window), n));
    report.add(check_construction_equivalence(ctx, cfg.window, cfg.measure, cfg.time_t, n));
    if (cfg.subwindow) {
        report.add(compare_restriction(ctx, cfg.window, cfg.measure, *cfg.subwindow, cfg.time_t, n));
    }
    if (cfg.time_s) {
        report.add(compare_iteration(ctx, cfg.window, cfg.measure, cfg.time_t, *cfg.time_s, n, {opt.iterate_literal}));
    }
    return report;
}

inline Report run_compare_restriction(const ExperimentConfig& cfg, const CommandOptions& opt) {
    if (!cfg.subwindow) throw ConfigError("compare-restriction needs restriction.subwindow");
    const RunContext ctx{cfg.master_seed, opt.jobs};
    Report report;
    report.add(compare_restriction(ctx, cfg.window, cfg.measure, *cfg.subwindow, cfg.time_t, cfg.replications,
                                   {opt.debug_native_time_factor}));
    return report;
}

inline Report run_compare_iteration(const ExperimentConfig& cfg, const CommandOptions& opt) {
    if (!cfg.time_s) throw ConfigError("compare-iteration needs run.time_s");
    const RunContext ctx{cfg.master_seed, opt.jobs};
    Report report;
    report.add(compare_iteration(ctx, cfg.window, cfg.measure, cfg.time_t, *cfg.time_s, cfg.replications,
                                 {opt.iterate_literal}));
    report.add(compare_iteration_swapped(ctx, cfg.window, cfg.measure, cfg.time_t, *cfg.time_s, cfg.replications,
                                         {opt.iterate_literal}));
    return report;
}

inline Report run_lifetime(const ExperimentConfig& cfg, const CommandOptions& opt) {
    if (!cfg.subset) throw ConfigError("lifetime needs lifetime.subset");
    const RunContext ctx{cfg.master_seed, opt.jobs};
    Report report;
    report.add(check_first_hit(ctx, "first_hit_ks", cfg.window, cfg.measure, *cfg.subset, cfg.replications));
    for (std::size_t q : {1u, 3u, 6u}) {
        report.add(check_first_hit_resumed(ctx, cfg.window, cfg.measure, q, cfg.replications));
    }
    report.add(check_lifetime_series_grid());
    return report;
}

}  // namespace mecke
