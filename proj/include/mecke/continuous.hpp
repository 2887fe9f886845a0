#pragma once

// Continuous-time constructions on top of the quasi-cell chain:
//
//  * jump clocks: with j quasi-cells the next decision comes after an
//    Exp(j * Q([W])) holding time, so the decision count at time t is
//    geometric with success probability exp(-t Q([W]));
//  * per-cell clocks: every real cell C divides after an independent
//    Exp(Q([C])) lifetime, by a line drawn from Q conditioned on [C];
//  * cutouts to a subwindow and the nested (iterated) construction.

#include <cmath>
#include <functional>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mecke/discrete.hpp"
#include "mecke/geometry.hpp"
#include "mecke/line_measure.hpp"
#include "mecke/rng.hpp"

namespace mecke {

struct TessCell {
    ConvexPolygon body;
    double birth = 0.0;
};

struct Tessellation {
    ConvexPolygon window;
    std::vector<TessCell> cells;
    double time = 0.0;
    std::vector<Segment> cuts;  // internal boundary segments, for export

    std::vector<const ConvexPolygon*> bodies() const {
        std::vector<const ConvexPolygon*> out;
        out.reserve(cells.size());
        for (const auto& c : cells) out.push_back(&c.body);
        return out;
    }
};

inline double boundary_length(const Tessellation& tess) { return boundary_length(tess.window, tess.bodies()); }

struct EventRecord {
    double time = 0.0;
    StepEvent event = StepEvent::no_jump;
};

struct ContinuousRun {
    // rate_factor != 1 corrupts the decision clock; used only by negative
    // controls.
    explicit ContinuousRun(DiscreteState s, double rate_factor = 1.0)
        : state(std::move(s)), rate_base(state.window_measure * rate_factor) {
        if (!(rate_base > 0.0)) throw std::invalid_argument("ContinuousRun: rate must be positive");
    }

    DiscreteState state;
    double clock = 0.0;
    double rate_base;
    std::optional<double> pending;  // absolute time of the next decision
    std::vector<EventRecord> event_log;
};

// P(nu = k) = exp(-R t) (1 - exp(-R t))^k, by inversion:
// floor(ln U / ln(1 - exp(-R t))) with U in (0, 1].
template <class Rng>
std::uint64_t sample_nu(double t, double rate, Rng& rng) {
    if (!(t >= 0.0) || !(rate > 0.0)) throw std::invalid_argument("sample_nu: need t >= 0 and R > 0");
    const double log_fail = std::log(-std::expm1(-rate * t));  // ln(1 - e^{-Rt})
    const double u = uniform01_open_low(rng);
    if (u == 1.0 || std::isinf(log_fail)) return 0;
    return static_cast<std::uint64_t>(std::floor(std::log(u) / log_fail));
}

// Advances the run to time t. The observer sees every decision as
// (outcome, time) and may stop the run early by returning true; the
// return value says whether that happened (run.clock is then the
// decision time).
template <class Rng, class Observer>
bool advance_to(ContinuousRun& run, double t, Rng& rng, Observer&& observer) {
    if (!(t >= run.clock)) throw std::invalid_argument("advance_to: target time lies in the past");
    for (;;) {
        if (!run.pending) {
            const double j = static_cast<double>(run.state.quasi_cells.size());
            run.pending = run.clock + exponential(rng, j * run.rate_base);
        }
        if (*run.pending > t) {
            run.clock = t;
            return false;
        }
        run.clock = *run.pending;
        run.pending.reset();
        const StepOutcome out = decision_step(run.state, rng, run.clock);
        run.event_log.push_back({run.clock, out.event});
        if (observer(out, run.clock)) return true;
    }
}

template <class Rng>
void advance_to(ContinuousRun& run, double t, Rng& rng) {
    advance_to(run, t, rng, [](const StepOutcome&, double) { return false; });
}

inline Tessellation snapshot(const ContinuousRun& run) {
    Tessellation tess{run.state.window, {}, run.clock, run.state.cuts};
    for (const auto& c : run.state.quasi_cells) {
        if (!c.empty()) tess.cells.push_back({*c.body, c.birth});
    }
    return tess;
}

template <class Rng>
Tessellation simulate(const ConvexPolygon& window, const MeasureSpec& spec, double t, Rng& rng) {
    ContinuousRun run(init(window, spec));
    advance_to(run, t, rng);
    return snapshot(run);
}

// Racing exponential clocks, one per live cell. Children get fresh clocks.
// The observer sees each division as (time, parent, line) and may end the
// run there by returning true.
template <class Rng, class Observer>
Tessellation run_percell(const ConvexPolygon& window, const MeasureSpec& spec, double t, Rng& rng,
                         const Tolerance& tol, Observer&& observer) {
    if (!(t >= 0.0)) throw std::invalid_argument("run_percell: t must be >= 0");
    struct Live {
        ConvexPolygon body;
        double birth;
        double rate;
        bool alive;
    };
    using Entry = std::pair<double, std::size_t>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> clocks;
    std::vector<Live> cells;
    Tessellation tess{window, {}, t, {}};

    auto add = [&](ConvexPolygon body, double birth) {
        const double rate = measure_hitting(spec, body);
        cells.push_back({std::move(body), birth, rate, true});
        clocks.push({birth + exponential(rng, rate), cells.size() - 1});
    };
    add(window, 0.0);

    while (!clocks.empty() && clocks.top().first <= t) {
        const auto [when, idx] = clocks.top();
        clocks.pop();
        const Line line = sample_line_hitting(spec, cells[idx].body, rng);
        auto parts = split(cells[idx].body, line, tol);
        if (parts.plus && parts.minus) {
            if (auto cut = cut_chord(line, cells[idx].body, tol)) tess.cuts.push_back(*cut);
            cells[idx].alive = false;
            const bool stop = observer(when, std::as_const(cells[idx].body), line);
            add(std::move(*parts.minus), when);
            add(std::move(*parts.plus), when);
            if (stop) {
                tess.time = when;
                break;
            }
        } else {
            clocks.push({when + exponential(rng, cells[idx].rate), idx});
        }
    }
    for (auto& c : cells) {
        if (c.alive) tess.cells.push_back({std::move(c.body), c.birth});
    }
    return tess;
}

template <class Rng>
Tessellation run_percell(const ConvexPolygon& window, const MeasureSpec& spec, double t, Rng& rng,
                         const Tolerance& tol) {
    return run_percell(window, spec, t, rng, tol, [](double, const ConvexPolygon&, const Line&) { return false; });
}

template <class Rng>
Tessellation run_percell(const ConvexPolygon& window, const MeasureSpec& spec, double t, Rng& rng) {
    return run_percell(window, spec, t, rng, window.window_tolerance());
}

// Waiting time, measured from run.clock, until a dividing chord meets
// `subset`. Misses do not restart the wait. nullopt when nothing hits
// within `horizon`.
//
// Until the first hit, `subset` sits inside a single real cell C, and C is
// divided at rate j * Q([W]) * (1/j) * Q([C]) / Q([W]) = Q([C]) whatever the
// number j of quasi-cells. The cost of the full chain grows like
// exp(Q([W]) t) while hits come at rate Q([S]) < Q([W]), so its expected
// work is unbounded. Past `full_cap` quasi-cells only C is followed, which
// leaves the law of the waiting time unchanged; run.state is then not
// advanced past the cap.
template <class Rng>
std::optional<double> first_hit_after(ContinuousRun& run, const ConvexPolygon& subset, double horizon, Rng& rng,
                                      std::size_t full_cap = 256) {
    const double start = run.clock, end = start + horizon;
    bool capped = false;
    const bool hit = advance_to(run, end, rng, [&](const StepOutcome& o, double) {
        if (o.event == StepEvent::jump && o.cut && clip_segment(*o.cut, subset, 0.0).has_value()) return true;
        capped = run.state.quasi_cells.size() >= full_cap;
        return capped;
    });
    if (!hit) return std::nullopt;
    if (!capped) return run.clock - start;

    const auto& tol = run.state.tol;
    const Point2 anchor = subset.centroid();
    std::optional<ConvexPolygon> cell;
    for (const auto& c : run.state.quasi_cells) {
        if (!c.empty() && contains(*c.body, anchor, tol.length)) {
            cell = *c.body;
            break;
        }
    }
    if (!cell) throw std::logic_error("first_hit_after: no cell holds the subset");
    const double factor = run.rate_base / run.state.window_measure;
    double now = run.clock;
    run.pending.reset();
    for (;;) {
        now += exponential(rng, factor * measure_hitting(run.state.spec, *cell));
        if (now > end) {
            run.clock = end;
            return std::nullopt;
        }
        const Line line = sample_line_hitting(run.state.spec, *cell, rng);
        auto parts = split(*cell, line, tol);
        if (!(parts.plus && parts.minus)) continue;
        const auto cut = cut_chord(line, *cell, tol);
        if (cut && clip_segment(*cut, subset, 0.0)) {
            run.clock = now;
            return now - start;
        }
        cell = contains(*parts.plus, anchor, 0.0) ? std::move(parts.plus) : std::move(parts.minus);
    }
}

inline void require_inside(const ConvexPolygon& outer, const ConvexPolygon& inner, const char* what) {
    if (!contains(outer, inner, outer.window_tolerance().length)) {
        throw std::invalid_argument(std::string(what) + ": polygon is not contained in the window");
    }
}

template <class Rng>
std::optional<double> first_hit_time(const ConvexPolygon& window, const MeasureSpec& spec, const ConvexPolygon& subset,
                                     double horizon, Rng& rng) {
    require_inside(window, subset, "first_hit_time");
    if (!(horizon > 0.0)) throw std::invalid_argument("first_hit_time: horizon must be > 0");
    ContinuousRun run(init(window, spec));
    return first_hit_after(run, subset, horizon, rng);
}

// Default horizon 20 / Q([S]); the truncated tail has mass e^-20.
template <class Rng>
std::optional<double> first_hit_time(const ConvexPolygon& window, const MeasureSpec& spec, const ConvexPolygon& subset,
                                     Rng& rng) {
    return first_hit_time(window, spec, subset, 20.0 / measure_hitting(spec, subset), rng);
}

inline Tessellation restrict_tess(const Tessellation& tess, const ConvexPolygon& subwindow) {
    require_inside(tess.window, subwindow, "restrict_tess");
    const Tolerance tol = tess.window.window_tolerance();
    Tessellation out{subwindow, {}, tess.time, {}};
    for (const auto& c : tess.cells) {
        if (auto part = intersect(c.body, subwindow, tol)) out.cells.push_back({std::move(*part), c.birth});
    }
    for (const auto& s : tess.cuts) {
        if (auto part = clip_segment(s, subwindow, 0.0); part && part->length() > tol.length) {
            out.cuts.push_back(*part);
        }
    }
    return out;
}

// Nested construction: a run to time t, then an independent run of
// duration s inside each of its cells. By default each inner run is the
// per-cell construction with the measure restricted to the cell and the
// time rescaled to s * Q([cell]); `literal` instead runs a full window
// process to s and cuts it out to the cell.
template <class Rng>
Tessellation iterate(const ConvexPolygon& window, const MeasureSpec& spec, double t, double s, Rng& rng,
                     bool literal = false) {
    if (!(t >= 0.0) || !(s >= 0.0)) throw std::invalid_argument("iterate: times must be >= 0");
    const Tolerance tol = window.window_tolerance();
    const Tessellation outer = simulate(window, spec, t, rng);
    Tessellation result{window, {}, t + s, outer.cuts};

    for (const auto& z : outer.cells) {
        Tessellation inner{z.body, {}, 0.0, {}};
        double time_unit = 1.0;
        if (literal) {
            inner = restrict_tess(simulate(window, spec, s, rng), z.body);
        } else {
            const double qz = measure_hitting(spec, z.body);
            inner = run_percell(z.body, restrict(spec, z.body), s * qz, rng, tol);
            time_unit = 1.0 / qz;
        }
        for (auto& c : inner.cells) {
            const double birth = c.birth > 0.0 ? t + c.birth * time_unit : z.birth;
            result.cells.push_back({std::move(c.body), birth});
        }
        result.cuts.insert(result.cuts.end(), inner.cuts.begin(), inner.cuts.end());
    }
    return result;
}

}  // namespace mecke
