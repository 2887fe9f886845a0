#pragma once

// Verification battery: each check runs a fixed-seed experiment and
// compares one statistic against a threshold. The CLI and the acceptance
// suite both build their reports from these functions.

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "mecke/continuous.hpp"
#include "mecke/replicate.hpp"
#include "mecke/stats.hpp"

namespace mecke {

inline constexpr double significance = 1e-3;

struct CheckResult {
    std::string name;
    double statistic = 0.0;
    double threshold = 0.0;
    bool pass = false;
};

inline CheckResult make_check(std::string name, double statistic, double threshold) {
    return {std::move(name), statistic, threshold, statistic < threshold};
}

// One-sample KS threshold: the fixed tolerance at or above the sample size
// it was set for; below that, the asymptotic critical value at
// `significance` if it is larger.
inline double ks_threshold(double tolerance, std::size_t n, std::size_t design_n) {
    if (n >= design_n) return tolerance;
    return std::max(tolerance, std::sqrt(-0.5 * std::log(significance / 2.0) / static_cast<double>(n)));
}

struct Report {
    std::vector<CheckResult> checks;

    void add(CheckResult c) { checks.push_back(std::move(c)); }
    void add(const std::vector<CheckResult>& cs) { checks.insert(checks.end(), cs.begin(), cs.end()); }

    bool all_pass() const {
        for (const auto& c : checks) {
            if (!c.pass) return false;
        }
        return true;
    }

    // check_name,statistic,threshold,verdict
    std::string text() const {
        std::string out = "check_name,statistic,threshold,verdict\n";
        for (const auto& c : checks) {
            out += fmt::format("{},{:.10g},{:.10g},{}\n", c.name, c.statistic, c.threshold, c.pass ? "PASS" : "FAIL");
        }
        return out;
    }
};

// Stream families. Values are part of the reproducibility contract.
namespace purpose {
inline constexpr std::uint64_t decision_count = 1;
inline constexpr std::uint64_t sum_exp = 2;
inline constexpr std::uint64_t first_hit = 3;
inline constexpr std::uint64_t equivalence_clock = 4;
inline constexpr std::uint64_t equivalence_percell = 5;
inline constexpr std::uint64_t restriction_cutout = 6;
inline constexpr std::uint64_t restriction_native = 7;
inline constexpr std::uint64_t iteration_nested = 8;
inline constexpr std::uint64_t iteration_direct = 9;
inline constexpr std::uint64_t simulate = 10;
inline constexpr std::uint64_t lifetime_resume = 11;
}  // namespace purpose

inline EmpiricalSample to_sample(const std::vector<std::optional<double>>& draws,
                                 std::optional<double> censor_time = std::nullopt) {
    EmpiricalSample s;
    s.censor_time = censor_time;
    for (const auto& d : draws) {
        if (d) {
            s.values.push_back(*d);
        } else {
            ++s.censored_count;
        }
    }
    return s;
}

inline std::function<double(double)> exponential_cdf(double rate) {
    return [rate](double x) { return x <= 0.0 ? 0.0 : -std::expm1(-rate * x); };
}

// Two-sample comparison of tessellation fingerprints: chi-square on cell
// counts, KS on boundary length, and optionally KS on the cell-area
// variance.
inline std::vector<CheckResult> compare_summaries(const std::string& prefix, const std::vector<TessSummary>& a,
                                                  const std::vector<TessSummary>& b, bool include_area) {
    std::vector<std::uint64_t> ca, cb;
    std::vector<double> la, lb, va, vb;
    for (const auto& s : a) {
        ca.push_back(s.cell_count);
        la.push_back(s.boundary_length);
        va.push_back(s.area_var);
    }
    for (const auto& s : b) {
        cb.push_back(s.cell_count);
        lb.push_back(s.boundary_length);
        vb.push_back(s.area_var);
    }
    std::vector<CheckResult> out;
    const auto chi = chi_square_two_sample(count_histogram(ca), count_histogram(cb), significance);
    out.push_back({prefix + "_cell_count_chi2", chi.statistic, chi.critical, chi.dof == 0 || chi.pass()});
    const double crit = ks_two_sample_critical(a.size(), b.size(), significance);
    out.push_back(make_check(prefix + "_boundary_length_ks2", ks_two_sample(la, lb), crit));
    if (include_area) out.push_back(make_check(prefix + "_area_var_ks2", ks_two_sample(va, vb), crit));
    return out;
}

// Decision count at time t of the jump-clock construction against the
// geometric law with parameter exp(-t Q([W])). rate_factor corrupts the
// clock (negative control) while the reference law keeps the true rate.
inline CheckResult check_decision_count_law(const RunContext& ctx, const ConvexPolygon& window,
                                            const MeasureSpec& spec, double t, std::size_t n,
                                            double rate_factor = 1.0) {
    const auto counts = replicate(n, ctx.jobs, [&](std::size_t i) {
        auto rng = ctx.stream(purpose::decision_count, i);
        ContinuousRun run(init(window, spec), rate_factor);
        advance_to(run, t, rng);
        return run.state.n;
    });
    const double rate = measure_hitting(spec, window);
    std::vector<double> observed = count_histogram(counts);
    observed.push_back(0.0);  // tail bin
    std::vector<double> expected(observed.size());
    double mass = 0.0;
    for (std::size_t k = 0; k + 1 < observed.size(); ++k) {
        expected[k] = static_cast<double>(n) * geometric_pmf(k, t, rate);
        mass += geometric_pmf(k, t, rate);
    }
    expected.back() = static_cast<double>(n) * std::max(0.0, 1.0 - mass);
    const auto chi = chi_square_test(observed, expected, significance);
    return {"decision_count_geometric_chi2", chi.statistic, chi.critical, chi.pass()};
}

// S_n as a sum of Exp(jR) draws against (1 - e^{-tR})^n.
inline CheckResult check_sum_exp_cdf(const RunContext& ctx, std::uint64_t terms, double rate, std::size_t n) {
    const auto draws = replicate(n, ctx.jobs, [&](std::size_t i) {
        auto rng = ctx.stream(purpose::sum_exp, i);
        double s = 0.0;
        for (std::uint64_t j = 1; j <= terms; ++j) s += exponential(rng, static_cast<double>(j) * rate);
        return std::optional<double>(s);
    });
    const double d = ks_statistic(to_sample(draws), [&](double x) { return x <= 0.0 ? 0.0 : sum_exp_cdf(terms, x, rate); });
    return make_check("sum_exp_cdf_ks", d, ks_threshold(0.01, n, 100000));
}

// Integral of the partial-sum density over [0, inf) for
// (n, k) in {1..5} x {n..n+5}.
inline CheckResult check_partial_sum_normalization(double rate) {
    double worst = 0.0;
    for (std::uint64_t n = 1; n <= 5; ++n) {
        for (std::uint64_t k = n; k <= n + 5; ++k) {
            const double total =
                integrate([&](double x) { return partial_sum_density(n, k, rate, x); }, 0.0, std::numeric_limits<double>::infinity());
            worst = std::max(worst, std::abs(total - 1.0));
        }
    }
    return make_check("partial_sum_density_normalization", worst, 1e-8);
}

// S_1^n = S_n: quadrature route against the closed form.
inline CheckResult check_partial_sum_identity(double rate) {
    double worst = 0.0;
    for (std::uint64_t n = 1; n <= 10; ++n) {
        for (double t : {0.1, 1.0, 3.0}) {
            worst = std::max(worst, std::abs(partial_sum_cdf(1, n, rate, t) - sum_exp_cdf(n, t, rate)));
        }
    }
    return make_check("partial_sum_cdf_vs_sum_exp_cdf", worst, 1e-8);
}

// Truncated lifetime series against 1 - e^{-t qS} over the grid
// n in 1..8, qS/qW in {0.1, 0.4, 0.9}, t in {0.1, 1, 3}.
inline CheckResult check_lifetime_series_grid(double q_window = 1.0) {
    double worst = 0.0;
    for (std::uint64_t n = 1; n <= 8; ++n) {
        for (double ratio : {0.1, 0.4, 0.9}) {
            for (double t : {0.1, 1.0, 3.0}) {
                const double qs = ratio * q_window;
                const double v = lifetime_series_cdf(n, qs, q_window, t, 1e-6);
                worst = std::max(worst, std::abs(v - (-std::expm1(-t * qs))));
            }
        }
    }
    return make_check("lifetime_series_vs_closed_form", worst, 1e-5);
}

// First time a dividing chord meets `subset`, against Exp(Q([subset])).
inline CheckResult check_first_hit(const RunContext& ctx, const std::string& name, const ConvexPolygon& window,
                                   const MeasureSpec& spec, const ConvexPolygon& subset, std::size_t n,
                                   double threshold = 0.01) {
    const auto draws = replicate(n, ctx.jobs, [&](std::size_t i) {
        auto rng = ctx.stream(purpose::first_hit, i);
        return first_hit_time(window, spec, subset, rng);
    });
    const double d = ks_statistic(to_sample(draws), exponential_cdf(measure_hitting(spec, subset)));
    return make_check(name, d, ks_threshold(threshold, n, 100000));
}

// Waiting time measured from a state with `quasi_cells` quasi-cells, for
// the set obtained by shrinking the first real cell by half about its
// centroid. Each draw is mapped through its own Exp(Q([S])) CDF, so the
// transformed sample is tested against U(0,1).
inline CheckResult check_first_hit_resumed(const RunContext& ctx, const ConvexPolygon& window, const MeasureSpec& spec,
                                           std::size_t quasi_cells, std::size_t n) {
    const auto draws = replicate(n, ctx.jobs, [&](std::size_t i) -> std::optional<double> {
        auto rng = ctx.stream(purpose::lifetime_resume + 16 * quasi_cells, i);
        ContinuousRun run(init(window, spec));
        if (run.state.quasi_cells.size() < quasi_cells) {
            advance_to(run, std::numeric_limits<double>::infinity(), rng, [&](const StepOutcome&, double) {
                return run.state.quasi_cells.size() >= quasi_cells;
            });
        }
        const ConvexPolygon* cell = nullptr;
        for (const auto& c : run.state.quasi_cells) {
            if (!c.empty()) {
                cell = &*c.body;
                break;
            }
        }
        const ConvexPolygon subset = cell->scaled(0.5);
        const double rate = measure_hitting(spec, subset);
        const auto wait = first_hit_after(run, subset, 20.0 / rate, rng);
        if (!wait) return std::nullopt;
        return -std::expm1(-rate * *wait);
    });
    const double d = ks_statistic(to_sample(draws), [](double u) { return std::clamp(u, 0.0, 1.0); });
    return make_check(fmt::format("first_hit_resumed_n{}_ks", quasi_cells), d, ks_threshold(0.01, n, 100000));
}

// Jump-clock construction against racing per-cell clocks at time t.
inline std::vector<CheckResult> check_construction_equivalence(const RunContext& ctx, const ConvexPolygon& window,
                                                               const MeasureSpec& spec, double t, std::size_t n) {
    const auto clock = replicate(n, ctx.jobs, [&](std::size_t i) {
        auto rng = ctx.stream(purpose::equivalence_clock, i);
        return summarize(simulate(window, spec, t, rng));
    });
    const auto percell = replicate(n, ctx.jobs, [&](std::size_t i) {
        auto rng = ctx.stream(purpose::equivalence_percell, i);
        return summarize(run_percell(window, spec, t, rng));
    });
    return compare_summaries("construction_equivalence", clock, percell, false);
}

struct RestrictionOptions {
    double native_time_factor = 1.0;  // != 1 only for negative controls
    std::string label = "restriction";
};

// Cutout of a window run to the subwindow against a native run in the
// subwindow with the restricted measure and time t * Q([subwindow]).
// Also tests the first division time of the subwindow in both arms
// against Exp(Q([subwindow])), censored at t.
inline std::vector<CheckResult> compare_restriction(const RunContext& ctx, const ConvexPolygon& window,
                                                    const MeasureSpec& spec, const ConvexPolygon& subwindow, double t,
                                                    std::size_t n, const RestrictionOptions& opt = {}) {
    require_inside(window, subwindow, "compare_restriction");
    const double q_sub = measure_hitting(spec, subwindow);
    const MeasureSpec spec_hat = restrict(spec, subwindow);
    const double t_hat = t * q_sub * opt.native_time_factor;

    struct Arm {
        TessSummary summary;
        std::optional<double> first_division;
    };
    const auto cutout = replicate(n, ctx.jobs, [&](std::size_t i) {
        auto rng = ctx.stream(purpose::restriction_cutout, i);
        ContinuousRun run(init(window, spec));
        Arm arm;
        advance_to(run, t, rng, [&](const StepOutcome& o, double when) {
            if (!arm.first_division && o.event == StepEvent::jump && o.cut && clip_segment(*o.cut, subwindow, 0.0)) {
                arm.first_division = when;
            }
            return false;
        });
        arm.summary = summarize(restrict_tess(snapshot(run), subwindow));
        return arm;
    });
    const auto native = replicate(n, ctx.jobs, [&](std::size_t i) {
        auto rng = ctx.stream(purpose::restriction_native, i);
        ContinuousRun run(init(subwindow, spec_hat));
        Arm arm;
        advance_to(run, t_hat, rng, [&](const StepOutcome& o, double when) {
            if (!arm.first_division && o.event == StepEvent::jump) arm.first_division = when / q_sub;
            return false;
        });
        arm.summary = summarize(snapshot(run));
        return arm;
    });

    std::vector<TessSummary> sa, sb;
    std::vector<std::optional<double>> fa, fb;
    for (const auto& a : cutout) {
        sa.push_back(a.summary);
        fa.push_back(a.first_division);
    }
    for (const auto& b : native) {
        sb.push_back(b.summary);
        fb.push_back(b.first_division);
    }
    auto out = compare_summaries(opt.label, sa, sb, false);
    const auto cdf = exponential_cdf(q_sub);
    const double limit = ks_threshold(0.015, n, 10000);
    out.push_back(make_check(opt.label + "_first_division_cutout_ks", ks_statistic(to_sample(fa, t), cdf), limit));
    out.push_back(make_check(opt.label + "_first_division_native_ks", ks_statistic(to_sample(fb, t), cdf), limit));
    return out;
}

struct IterationOptions {
    bool literal = false;
    std::string label = "iteration";
};

// Nested construction iterate(t, s) against a direct run to t + s.
inline std::vector<CheckResult> compare_iteration(const RunContext& ctx, const ConvexPolygon& window,
                                                  const MeasureSpec& spec, double t, double s, std::size_t n,
                                                  const IterationOptions& opt = {}) {
    const auto nested = replicate(n, ctx.jobs, [&](std::size_t i) {
        auto rng = ctx.stream(purpose::iteration_nested, i);
        return summarize(iterate(window, spec, t, s, rng, opt.literal));
    });
    const auto direct = replicate(n, ctx.jobs, [&](std::size_t i) {
        auto rng = ctx.stream(purpose::iteration_direct, i);
        return summarize(simulate(window, spec, t + s, rng));
    });
    return compare_summaries(opt.label, nested, direct, true);
}

// Same comparison between iterate(t, s) and iterate(s, t).
inline std::vector<CheckResult> compare_iteration_swapped(const RunContext& ctx, const ConvexPolygon& window,
                                                          const MeasureSpec& spec, double t, double s, std::size_t n,
                                                          const IterationOptions& opt = {}) {
    const auto ts = replicate(n, ctx.jobs, [&](std::size_t i) {
        auto rng = ctx.stream(purpose::iteration_nested, i);
        return summarize(iterate(window, spec, t, s, rng, opt.literal));
    });
    const auto st = replicate(n, ctx.jobs, [&](std::size_t i) {
        auto rng = ctx.stream(purpose::iteration_direct, i);
        return summarize(iterate(window, spec, s, t, rng, opt.literal));
    });
    return compare_summaries(opt.label + "_swapped", ts, st, true);
}

}  // namespace mecke
