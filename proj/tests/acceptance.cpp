// Acceptance battery. One PASS/FAIL line per criterion, detail lines for
// the individual checks underneath. Exit status 0 only if every criterion
// passes.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <thread>
#include <vector>

#include <fmt/format.h>

#include "mecke/commands.hpp"

using namespace mecke;

namespace {

constexpr std::uint64_t seed = 20240917;

const ConvexPolygon unit_square = ConvexPolygon::rectangle(0.0, 0.0, 1.0, 1.0);
const ConvexPolygon left_half = ConvexPolygon::rectangle(0.0, 0.0, 0.5, 1.0);
const MeasureSpec iso = MeasureSpec::isotropic();
const MeasureSpec axes(0.0, {{0.0, 1.0}, {std::numbers::pi / 2, 1.0}});

unsigned worker_count() { return std::max(1u, std::min(4u, std::thread::hardware_concurrency())); }

struct Criterion {
    explicit Criterion(std::string t) : title(std::move(t)) {}
    std::string title;
    std::vector<CheckResult> checks;
    bool pass = true;
    std::string note;
};

void print_checks(const std::vector<CheckResult>& checks) {
    for (const auto& c : checks) {
        std::printf("    %-48s %.6g  (threshold %.6g)  %s\n", c.name.c_str(), c.statistic, c.threshold,
                    c.pass ? "pass" : "fail");
    }
}

bool all_pass(const std::vector<CheckResult>& cs) {
    for (const auto& c : cs) {
        if (!c.pass) return false;
    }
    return !cs.empty();
}

Criterion decision_count_law(const RunContext& ctx) {
    Criterion c{"decision count after t*Q([W]) = 1 is geometric"};
    c.checks.push_back(check_decision_count_law(ctx, unit_square, iso, 0.25, 100000));
    c.pass = all_pass(c.checks);
    return c;
}

Criterion sum_of_exponentials(const RunContext& ctx) {
    Criterion c{"sum of Exp(jR), j=1..5, has CDF (1-e^-Rt)^5"};
    c.checks.push_back(check_sum_exp_cdf(ctx, 5, 1.0, 100000));
    c.pass = all_pass(c.checks);
    return c;
}

Criterion partial_sums() {
    Criterion c{"partial-sum density integrates to 1; CDF matches closed form"};
    c.checks.push_back(check_partial_sum_normalization(1.0));
    c.checks.push_back(check_partial_sum_identity(1.0));
    c.pass = all_pass(c.checks);
    return c;
}

Criterion lifetime_series() {
    Criterion c{"lifetime series equals 1-e^(-t qS) for every n"};
    c.checks.push_back(check_lifetime_series_grid(1.0));
    c.pass = all_pass(c.checks);
    return c;
}

Criterion first_hit(const RunContext& ctx) {
    Criterion c{"first hit of [0,0.5]x[0,1] is Exp(Q([S]))"};
    c.checks.push_back(check_first_hit(ctx, "first_hit_isotropic_ks", unit_square, iso, left_half, 100000));
    c.checks.push_back(check_first_hit(ctx, "first_hit_axes_ks", unit_square, axes, left_half, 100000));
    c.pass = all_pass(c.checks);
    return c;
}

Criterion construction_equivalence(const RunContext& ctx) {
    Criterion c{"jump-clock and per-cell-clock constructions agree"};
    c.checks = check_construction_equivalence(ctx, unit_square, iso, 0.25, 10000);
    c.pass = all_pass(c.checks);
    return c;
}

Criterion restriction(const RunContext& ctx) {
    Criterion c{"cutout to [0,0.5]x[0,1] matches native subwindow run"};
    auto a = compare_restriction(ctx, unit_square, iso, left_half, 0.25, 10000, {1.0, "restriction_isotropic"});
    auto b = compare_restriction(ctx, unit_square, axes, left_half, 0.5, 10000, {1.0, "restriction_axes"});
    c.checks = a;
    c.checks.insert(c.checks.end(), b.begin(), b.end());
    c.pass = all_pass(c.checks);
    return c;
}

Criterion iteration(const RunContext& ctx) {
    Criterion c{"iterate(t, s) matches a direct run to t + s"};
    auto add = [&](std::vector<CheckResult> cs) { c.checks.insert(c.checks.end(), cs.begin(), cs.end()); };
    add(compare_iteration(ctx, unit_square, iso, 0.125, 0.125, 10000, {false, "iteration"}));
    add(compare_iteration(ctx, unit_square, iso, 0.125, 0.125, 10000, {true, "iteration_literal"}));
    add(compare_iteration(ctx, unit_square, iso, 0.0, 0.25, 10000, {false, "iteration_t0"}));

    // s = 0: the nested run adds nothing, so on a shared stream the result
    // is the direct run itself.
    std::size_t mismatches = 0;
    for (std::size_t i = 0; i < 2000; ++i) {
        auto r1 = ctx.stream(purpose::iteration_nested, i);
        auto r2 = ctx.stream(purpose::iteration_nested, i);
        const auto a = summarize(iterate(unit_square, iso, 0.25, 0.0, r1));
        const auto b = summarize(simulate(unit_square, iso, 0.25, r2));
        if (a.cell_count != b.cell_count || a.boundary_length != b.boundary_length || a.area_var != b.area_var) {
            ++mismatches;
        }
    }
    c.checks.push_back({"iteration_s0_mismatches", static_cast<double>(mismatches), 1.0, mismatches == 0});
    c.pass = all_pass(c.checks);
    return c;
}

Criterion negative_controls(const RunContext& ctx) {
    Criterion c{"corrupted runs are detected (controls must FAIL)"};
    const auto doubled = check_decision_count_law(ctx, unit_square, iso, 0.25, 100000, 2.0);
    const auto shrunk =
        compare_restriction(ctx, unit_square, iso, left_half, 0.25, 10000, {0.8, "restriction_shrunk_t_hat"});
    c.checks.push_back(doubled);
    c.checks.insert(c.checks.end(), shrunk.begin(), shrunk.end());
    const bool doubled_caught = !doubled.pass;
    const bool shrunk_caught = !all_pass(shrunk);
    c.pass = doubled_caught && shrunk_caught;
    c.note = fmt::format("doubled rate {}, shrunk t_hat {}", doubled_caught ? "detected" : "MISSED",
                         shrunk_caught ? "detected" : "MISSED");
    return c;
}

Criterion determinism() {
    Criterion c{"verify reports are byte-identical for equal seeds"};
    const auto cfg = parse_config(
        "[window]\nvertices = 0,0; 1,0; 1,1; 0,1\n"
        "[measure]\niso_weight = 1\n"
        "[run]\ntime_t = 1\nreplications = 100000\nmaster_seed = 20240917\n");
    const auto first = run_verify(cfg, {1}).text();
    const auto second = run_verify(cfg, {1}).text();
    const auto parallel = run_verify(cfg, {worker_count()}).text();
    auto other_cfg = cfg;
    other_cfg.master_seed += 1;
    const auto other = run_verify(other_cfg, {1}).text();

    c.checks.push_back({"repeat_identical", first == second ? 0.0 : 1.0, 1.0, first == second});
    c.checks.push_back({"jobs_identical", first == parallel ? 0.0 : 1.0, 1.0, first == parallel});
    c.checks.push_back({"seed_sensitive", first != other ? 0.0 : 1.0, 1.0, first != other});
    c.pass = all_pass(c.checks);
    c.note = fmt::format("{} bytes", first.size());
    return c;
}

}  // namespace

int main() {
    const RunContext ctx{seed, worker_count()};
    const std::vector<std::function<Criterion()>> battery = {
        [&] { return decision_count_law(ctx); },
        [&] { return sum_of_exponentials(ctx); },
        [] { return partial_sums(); },
        [] { return lifetime_series(); },
        [&] { return first_hit(ctx); },
        [&] { return construction_equivalence(ctx); },
        [&] { return restriction(ctx); },
        [&] { return iteration(ctx); },
        [&] { return negative_controls(ctx); },
        [] { return determinism(); },
    };

    int failed = 0;
    for (std::size_t i = 0; i < battery.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        const Criterion c = battery[i]();
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("criterion %2zu  %s  %s  [%.1fs]%s%s\n", i + 1, c.pass ? "PASS" : "FAIL", c.title.c_str(), secs,
                    c.note.empty() ? "" : "  ", c.note.c_str());
        print_checks(c.checks);
        std::fflush(stdout);
        if (!c.pass) ++failed;
    }
    std::printf("%zu/%zu criteria passed\n", battery.size() - failed, battery.size());
    return failed == 0 ? 0 : 1;
}
