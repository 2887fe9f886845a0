#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "mecke/discrete.hpp"
#include "mecke/stats.hpp"
#include "test_support.hpp"

using namespace mecke;
using testing_support::points;
using testing_support::same_point_set;

namespace {

const double pi = std::numbers::pi;
const ConvexPolygon square = ConvexPolygon::rectangle(0.0, 0.0, 1.0, 1.0);
const MeasureSpec iso = MeasureSpec::isotropic();
const MeasureSpec mixed(0.5, {{0.3, 2.0}, {2.0, 0.7}});

std::vector<ConvexPolygon> real_cells(const DiscreteState& s) {
    std::vector<ConvexPolygon> out;
    for (const auto& c : s.quasi_cells) {
        if (!c.empty()) out.push_back(*c.body);
    }
    return out;
}

void expect_partition(const DiscreteState& s) {
    const auto cells = real_cells(s);
    double total = 0.0;
    for (const auto& c : cells) {
        total += area(c);
        EXPECT_TRUE(contains(s.window, c, s.tol.length));
    }
    EXPECT_NEAR(total, area(s.window), 1e-9 * area(s.window));
    for (std::size_t i = 0; i < cells.size(); ++i) {
        for (std::size_t j = i + 1; j < cells.size(); ++j) {
            const auto overlap = intersect(cells[i], cells[j], s.tol);
            EXPECT_TRUE(!overlap || area(*overlap) < 1e-9 * area(s.window));
        }
    }
}

// Internal boundary by brute force: every cell edge not lying on a window
// edge, halved because each internal edge borders two cells.
double edge_collection_length(const DiscreteState& s) {
    const auto w = s.window.vertices();
    const double eps = 1e-9;
    auto on_window_edge = [&](Point2 a, Point2 b) {
        for (std::size_t i = 0; i < w.size(); ++i) {
            const Point2 p = w[i], q = w[(i + 1) % w.size()];
            const Point2 d = q - p;
            const double len = norm(d);
            if (std::abs(cross(d, a - p)) / len < eps && std::abs(cross(d, b - p)) / len < eps) return true;
        }
        return false;
    };
    double total = 0.0;
    for (const auto& c : real_cells(s)) {
        const auto v = c.vertices();
        for (std::size_t i = 0; i < v.size(); ++i) {
            const Point2 a = v[i], b = v[(i + 1) % v.size()];
            if (!on_window_edge(a, b)) total += distance(a, b);
        }
    }
    return 0.5 * total;
}

// Same chain with explicit geometry, driven differently: a cell is chosen
// for division with probability (1/n') Q([C]) / Q([W]) and then cut by a
// line drawn conditionally on hitting that cell.
template <class Rng>
std::size_t oracle_cell_count(const ConvexPolygon& window, const MeasureSpec& spec, std::size_t decisions, Rng& rng) {
    const double qw = measure_hitting(spec, window);
    const auto tol = window.window_tolerance();
    std::vector<ConvexPolygon> cells{window};
    for (std::size_t n = 1; n <= decisions; ++n) {
        double u = uniform01(rng) * static_cast<double>(n) * qw;
        for (std::size_t j = 0; j < cells.size(); ++j) {
            const double q = measure_hitting(spec, cells[j]);
            if (u < q) {
                for (;;) {
                    auto parts = split(cells[j], sample_line_hitting(spec, cells[j], rng), tol);
                    if (parts.plus && parts.minus) {
                        cells[j] = std::move(*parts.minus);
                        cells.push_back(std::move(*parts.plus));
                        break;
                    }
                }
                break;
            }
            u -= q;
        }
    }
    return cells.size();
}

}  // namespace

TEST(Init, SingleWindowCell) {
    const auto s = init(square, iso);
    EXPECT_EQ(s.n, 0u);
    ASSERT_EQ(s.quasi_cells.size(), 1u);
    EXPECT_TRUE(same_point_set(points(*s.quasi_cells[0].body), points(square), 0.0));
    EXPECT_EQ(s.jump_count, 0u);
    EXPECT_NEAR(s.window_measure, 4.0, 1e-15);
    EXPECT_TRUE(same_point_set(points(s.window), points(square), 0.0));
    const ConvexPolygon tri({{0, 0}, {2, 0}, {0, 1}});
    EXPECT_EQ(init(tri, mixed).jump_count, 0u);
}

TEST(DecisionStep, FirstStepAlwaysJumps) {
    for (std::uint64_t i = 0; i < 2000; ++i) {
        PhiloxStream rng(derive_key(4, 1), i);
        auto s = init(square, i % 2 ? iso : mixed);
        const auto out = decision_step(s, rng);
        ASSERT_EQ(out.event, StepEvent::jump);
        ASSERT_EQ(out.selected, 0u);
        ASSERT_EQ(s.real_cell_count(), 2u);
        ASSERT_EQ(s.quasi_cells.size(), 2u);
        ASSERT_TRUE(out.cut && out.parent);
        // Appended part is on the origin side.
        const double side = out.line.origin_side_sign();
        for (auto v : s.quasi_cells[1].body->vertices()) ASSERT_LE(side * out.line.signed_offset(v), 1e-9);
        for (auto v : s.quasi_cells[0].body->vertices()) ASSERT_GE(side * out.line.signed_offset(v), -1e-9);
    }
}

TEST(DecisionStep, EmptySelectionAddsEmpty) {
    const auto c = ConvexPolygon::rectangle(0.0, 0.0, 1.0, 1.0);
    bool seen = false;
    for (std::uint64_t i = 0; i < 200 && !seen; ++i) {
        PhiloxStream rng(derive_key(4, 2), i);
        DiscreteState s(square, iso);
        s.n = 1;
        s.quasi_cells = {{std::nullopt, 0.0}, {c, 0.0}};
        const auto out = decision_step(s, rng);
        if (out.selected != 0) continue;
        seen = true;
        EXPECT_EQ(out.event, StepEvent::no_jump);
        ASSERT_EQ(s.quasi_cells.size(), 3u);
        EXPECT_TRUE(s.quasi_cells[0].empty());
        EXPECT_TRUE(s.quasi_cells[2].empty());
        ASSERT_FALSE(s.quasi_cells[1].empty());
        EXPECT_TRUE(same_point_set(points(*s.quasi_cells[1].body), points(c), 0.0));
        EXPECT_EQ(s.jump_count, 0u);
    }
    EXPECT_TRUE(seen);
}

TEST(DecisionStep, MissedCellSurvivesOnOneSide) {
    std::size_t misses = 0;
    for (std::uint64_t i = 0; i < 5000; ++i) {
        PhiloxStream rng(derive_key(4, 3), i);
        auto s = init(square, iso);
        run_steps(s, 6, rng);
        const auto before = s.quasi_cells;
        const auto count = s.real_cell_count();
        const auto out = decision_step(s, rng);
        if (out.event == StepEvent::jump || before[out.selected].empty()) continue;
        ++misses;
        ASSERT_EQ(s.real_cell_count(), count);
        const auto& stay = s.quasi_cells[out.selected];
        const auto& appended = s.quasi_cells.back();
        ASSERT_NE(stay.empty(), appended.empty());
        const auto& kept = stay.empty() ? appended : stay;
        ASSERT_TRUE(same_point_set(points(*kept.body), points(*before[out.selected].body), 0.0));
        // The survivor sits at the appended slot exactly when it lies on the origin side.
        const double side = out.line.origin_side_sign();
        const Point2 c = kept.body->centroid();
        ASSERT_EQ(!appended.empty(), side * out.line.signed_offset(c) < 0.0);
        for (std::size_t j = 0; j < before.size(); ++j) {
            if (j == out.selected) continue;
            ASSERT_EQ(before[j].empty(), s.quasi_cells[j].empty());
        }
    }
    EXPECT_GT(misses, 500u);
}

TEST(DecisionStep, DivisionProbabilityOfGivenCell) {
    const auto a = ConvexPolygon::rectangle(0.0, 0.0, 0.5, 1.0);
    const auto b = ConvexPolygon::rectangle(0.5, 0.0, 1.0, 1.0);
    const std::size_t n = 100000;
    std::size_t two = 0, three = 0;
    for (std::uint64_t i = 0; i < n; ++i) {
        PhiloxStream rng(derive_key(4, 4), i);
        DiscreteState s(square, iso);
        s.n = 1;
        s.quasi_cells = {{a, 0.0}, {b, 0.0}};
        const auto out = decision_step(s, rng);
        if (out.event == StepEvent::jump && out.selected == 0) ++two;

        DiscreteState t(square, iso);
        t.n = 2;
        t.quasi_cells = {{a, 0.0}, {std::nullopt, 0.0}, {b, 0.0}};
        const auto o2 = decision_step(t, rng);
        if (o2.event == StepEvent::jump && o2.selected == 0) ++three;
    }
    // (1/n') Q([C]) / Q([W]) with Q([C]) = 3, Q([W]) = 4.
    testing_support::expect_frequency(two, n, 0.5 * 0.75);
    testing_support::expect_frequency(three, n, 0.75 / 3.0);
}

TEST(RunSteps, ZeroStepsIsIdentity) {
    PhiloxStream rng(derive_key(4, 5), 0);
    auto s = init(square, iso);
    run_steps(s, 5, rng);
    const auto before = s.quasi_cells;
    run_steps(s, 0, rng);
    EXPECT_EQ(s.n, 5u);
    ASSERT_EQ(s.quasi_cells.size(), before.size());
    for (std::size_t i = 0; i < before.size(); ++i) EXPECT_EQ(before[i].empty(), s.quasi_cells[i].empty());
}

TEST(RunSteps, InvariantsEveryStep) {
    for (std::uint64_t r = 0; r < 30; ++r) {
        PhiloxStream rng(derive_key(4, 6), r);
        const ConvexPolygon window({{0, 0}, {3, 0.5}, {2.5, 2}, {0.5, 1.5}});
        auto s = init(window, r % 2 ? iso : mixed);
        std::size_t jumps = 0;
        for (int step = 0; step < 60; ++step) {
            const auto out = decision_step(s, rng);
            if (out.event == StepEvent::jump) {
                ++jumps;
                ASSERT_EQ(s.real_cell_count(), jumps + 1);
            }
            ASSERT_EQ(s.quasi_cells.size(), s.n + 1);
            ASSERT_EQ(s.jump_count + 1, s.real_cell_count());
        }
        expect_partition(s);
    }
}

TEST(BoundaryLength, Examples) {
    auto s = init(square, iso);
    EXPECT_EQ(boundary_length(s), 0.0);
    s.n = 1;
    s.quasi_cells = {{ConvexPolygon::rectangle(0.5, 0, 1, 1), 0.0}, {ConvexPolygon::rectangle(0, 0, 0.5, 1), 0.0}};
    EXPECT_NEAR(boundary_length(s), 1.0, 1e-15);
    EXPECT_NEAR(edge_collection_length(s), 1.0, 1e-15);
}

TEST(BoundaryLength, AgreesWithEdgeCollectionAndChords) {
    for (std::uint64_t r = 0; r < 100; ++r) {
        PhiloxStream rng(derive_key(4, 7), r);
        auto s = init(square, r % 2 ? iso : mixed);
        run_steps(s, 40, rng);
        double chords = 0.0;
        for (const auto& c : s.cuts) chords += c.length();
        const double b = boundary_length(s);
        EXPECT_NEAR(b, edge_collection_length(s), 1e-9);
        EXPECT_NEAR(b, chords, 1e-9);
        EXPECT_EQ(s.cuts.size(), s.jump_count);
    }
}

TEST(Distribution, CellCountMatchesOracleChain) {
    const std::size_t runs = 10000, decisions = 12;
    for (const auto& spec : {iso, mixed}) {
        std::vector<std::uint64_t> a, b;
        for (std::uint64_t i = 0; i < runs; ++i) {
            PhiloxStream r1(derive_key(4, 8), i), r2(derive_key(4, 9), i);
            auto s = init(square, spec);
            run_steps(s, decisions, r1);
            a.push_back(s.real_cell_count());
            b.push_back(oracle_cell_count(square, spec, decisions, r2));
        }
        const auto r = chi_square_two_sample(count_histogram(a), count_histogram(b), 1e-3);
        EXPECT_TRUE(r.pass()) << r.statistic << " vs " << r.critical;
    }
}

TEST(Distribution, SliversAreRare) {
    std::uint64_t slivers = 0, steps = 0;
    for (std::uint64_t r = 0; r < 200; ++r) {
        PhiloxStream rng(derive_key(4, 10), r);
        auto s = init(square, iso);
        run_steps(s, 200, rng);
        slivers += s.sliver_count;
        steps += s.n;
    }
    EXPECT_EQ(slivers, 0u) << "of " << steps;
}
