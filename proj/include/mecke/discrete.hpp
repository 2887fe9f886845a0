#pragma once

// Discrete-time quasi-cell chain. After n decisions the state holds n + 1
// quasi-cells in creation order; a decision picks one of them uniformly,
// throws a line conditioned to hit the window, and replaces the picked
// entry by its far-side part while appending the origin-side part.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "mecke/geometry.hpp"
#include "mecke/line_measure.hpp"

namespace mecke {

struct QuasiCell {
    std::optional<ConvexPolygon> body;  // nullopt = EMPTY
    double birth = 0.0;

    bool empty() const { return !body.has_value(); }
};

enum class StepEvent { jump, no_jump };

struct StepOutcome {
    StepEvent event = StepEvent::no_jump;
    std::size_t selected = 0;  // zero-based index of the picked quasi-cell
    Line line{0.0, 0.0};
    std::optional<Segment> cut;          // chord created by a jump
    std::optional<ConvexPolygon> parent;  // the divided cell, on jumps
};

struct DiscreteState {
    DiscreteState(ConvexPolygon w, MeasureSpec q)
        : window(std::move(w)), spec(std::move(q)), tol(window.window_tolerance()),
          window_measure(measure_hitting(spec, window)) {
        quasi_cells.push_back({window, 0.0});
    }

    std::uint64_t n = 0;
    std::vector<QuasiCell> quasi_cells;
    ConvexPolygon window;
    MeasureSpec spec;
    Tolerance tol;
    double window_measure;  // Q([W])
    std::uint64_t jump_count = 0;
    std::uint64_t sliver_count = 0;  // real cells crossed but one side below eps_area
    std::vector<Segment> cuts;       // internal boundary, one chord per jump

    std::size_t real_cell_count() const {
        std::size_t k = 0;
        for (const auto& c : quasi_cells) k += c.empty() ? 0 : 1;
        return k;
    }
};

inline DiscreteState init(const ConvexPolygon& window, const MeasureSpec& spec) { return DiscreteState(window, spec); }

// One decision at time stamp `now`. Draw order: selection index, then line.
template <class Rng>
StepOutcome decision_step(DiscreteState& state, Rng& rng, double now = 0.0) {
    const std::uint64_t next_n = state.n + 1;
    const auto alpha = static_cast<std::size_t>(uniform_index(rng, next_n));
    const Line line = sample_line_hitting(state.spec, state.window, rng);

    StepOutcome out;
    out.selected = alpha;
    out.line = line;
    state.n = next_n;

    QuasiCell& picked = state.quasi_cells[alpha];
    if (picked.empty()) {
        state.quasi_cells.push_back({std::nullopt, 0.0});
        return out;
    }

    auto parts = split(*picked.body, line, state.tol);
    if (parts.plus && parts.minus) {
        out.event = StepEvent::jump;
        out.cut = cut_chord(line, *picked.body, state.tol);
        out.parent = std::move(picked.body);
        picked = {std::move(parts.minus), now};
        state.quasi_cells.push_back({std::move(parts.plus), now});
        ++state.jump_count;
        if (out.cut) state.cuts.push_back(*out.cut);
        return out;
    }

    // Missed, grazing, or a sliver: the cell survives whole on one side.
    const auto [lo, hi] = picked.body->support(line.theta());
    if (lo + state.tol.length < line.p() && line.p() < hi - state.tol.length) ++state.sliver_count;
    if (parts.plus) {
        QuasiCell moved = std::move(picked);
        picked = {std::nullopt, 0.0};
        state.quasi_cells.push_back(std::move(moved));
    } else {
        state.quasi_cells.push_back({std::nullopt, 0.0});
    }
    return out;
}

template <class Rng>
void run_steps(DiscreteState& state, std::uint64_t m, Rng& rng) {
    for (std::uint64_t i = 0; i < m; ++i) decision_step(state, rng);
}

// Total length of the internal cell boundaries: each internal edge lies on
// exactly two cells, window edges on one.
inline double boundary_length(const ConvexPolygon& window, const std::vector<const ConvexPolygon*>& cells) {
    double s = 0.0;
    for (const auto* c : cells) s += perimeter(*c);
    return std::max(0.0, 0.5 * (s - perimeter(window)));
}

inline double boundary_length(const DiscreteState& state) {
    std::vector<const ConvexPolygon*> cells;
    for (const auto& c : state.quasi_cells) {
        if (!c.empty()) cells.push_back(&*c.body);
    }
    return boundary_length(state.window, cells);
}

}  // namespace mecke
