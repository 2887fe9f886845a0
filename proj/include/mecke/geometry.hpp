#pragma once

// Planar primitives for the tessellation engine: points, lines in
// normal form, convex polygons, halfplane clipping and the support
// functionals (width, perimeter) used to evaluate line measures.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace mecke {

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
    friend bool operator==(Point2, Point2) = default;
};

inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }
inline double distance(Point2 a, Point2 b) { return norm(a - b); }

inline Point2 unit_normal(double theta) { return {std::cos(theta), std::sin(theta)}; }

// The line { z : <z, (cos theta, sin theta)> = p } with theta in [0, pi).
class Line {
public:
    Line(double theta, double p) : theta_(theta), p_(p) {
        if (!(theta >= 0.0 && theta < std::numbers::pi) || !std::isfinite(p)) {
            throw std::invalid_argument("Line: theta must lie in [0, pi) and p must be finite");
        }
    }

    // Same line with an arbitrary angle; folds theta into [0, pi).
    static Line normalized(double theta, double p) {
        double t = std::fmod(theta, 2.0 * std::numbers::pi);
        if (t < 0.0) t += 2.0 * std::numbers::pi;
        if (t >= std::numbers::pi) {
            t -= std::numbers::pi;
            p = -p;
        }
        if (t >= std::numbers::pi) t = 0.0;
        return Line(t, p);
    }

    double theta() const { return theta_; }
    double p() const { return p_; }
    Point2 normal() const { return unit_normal(theta_); }
    Point2 direction() const { return {-std::sin(theta_), std::cos(theta_)}; }

    // Signed offset of z from the line along the normal.
    double signed_offset(Point2 z) const { return dot(z, normal()) - p_; }

    // +1 when the origin lies on the negative-offset side. The p = 0 tie
    // resolves the same way, so the origin-side halfplane is always
    // { side() * signed_offset(z) < 0 }.
    double origin_side_sign() const { return p_ < 0.0 ? -1.0 : 1.0; }

private:
    double theta_;
    double p_;
};

struct Segment {
    Point2 a;
    Point2 b;
    double length() const { return distance(a, b); }
};

// Absolute thresholds derived from the window scale.
struct Tolerance {
    double area = 0.0;
    double length = 0.0;
};

// Turn angles below this (radians) are treated as straight.
inline constexpr double collinear_angle_eps = 1e-12;

namespace detail {

inline double signed_area(std::span<const Point2> v) {
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        s += cross(v[i], v[(i + 1) % v.size()]);
    }
    return 0.5 * s;
}

// Drops near-duplicate and collinear vertices from a closed chain.
inline std::vector<Point2> canonicalize(std::vector<Point2> v, double eps_len) {
    bool changed = true;
    while (changed && v.size() >= 3) {
        changed = false;
        std::vector<Point2> out;
        out.reserve(v.size());
        for (const auto& q : v) {
            if (out.empty() || distance(out.back(), q) > eps_len) out.push_back(q);
        }
        while (out.size() > 1 && distance(out.front(), out.back()) <= eps_len) out.pop_back();
        if (out.size() != v.size()) changed = true;
        v = std::move(out);
        if (v.size() < 3) break;

        std::vector<Point2> kept;
        kept.reserve(v.size());
        const std::size_t n = v.size();
        for (std::size_t i = 0; i < n; ++i) {
            const Point2 prev = v[(i + n - 1) % n];
            const Point2 next = v[(i + 1) % n];
            const Point2 e1 = v[i] - prev;
            const Point2 e2 = next - v[i];
            const double turn = std::atan2(cross(e1, e2), dot(e1, e2));
            if (std::abs(turn) < collinear_angle_eps) {
                changed = true;
                continue;
            }
            kept.push_back(v[i]);
        }
        v = std::move(kept);
    }
    return v;
}

// Sutherland-Hodgman against { z : <z, n> <= c }. Vertices within eps of
// the boundary are snapped onto it.
inline std::vector<Point2> clip_halfplane(std::span<const Point2> v, Point2 n, double c, double eps) {
    std::vector<Point2> out;
    if (v.empty()) return out;
    out.reserve(v.size() + 2);
    auto offset = [&](Point2 z) {
        const double d = dot(z, n) - c;
        return std::abs(d) <= eps ? 0.0 : d;
    };
    for (std::size_t i = 0; i < v.size(); ++i) {
        const Point2 cur = v[i];
        const Point2 nxt = v[(i + 1) % v.size()];
        const double dc = offset(cur);
        const double dn = offset(nxt);
        if (dc <= 0.0) out.push_back(cur);
        if ((dc < 0.0 && dn > 0.0) || (dc > 0.0 && dn < 0.0)) {
            const double s = dc / (dc - dn);
            out.push_back(cur + s * (nxt - cur));
        }
    }
    return out;
}

}  // namespace detail

class ConvexPolygon {
public:
    // Validates and canonicalizes; accepts either orientation.
    explicit ConvexPolygon(std::vector<Point2> vertices) {
        for (const auto& q : vertices) {
            if (!std::isfinite(q.x) || !std::isfinite(q.y)) {
                throw std::invalid_argument("ConvexPolygon: non-finite vertex");
            }
        }
        if (vertices.size() < 3) throw std::invalid_argument("ConvexPolygon: fewer than 3 vertices");
        if (detail::signed_area(vertices) < 0.0) std::reverse(vertices.begin(), vertices.end());

        double diam = 0.0;
        for (const auto& a : vertices) {
            for (const auto& b : vertices) diam = std::max(diam, distance(a, b));
        }
        vertices_ = detail::canonicalize(std::move(vertices), 1e-9 * diam);
        if (vertices_.size() < 3 || detail::signed_area(vertices_) <= 1e-12 * diam * diam) {
            throw std::invalid_argument("ConvexPolygon: degenerate polygon");
        }
        const std::size_t n = vertices_.size();
        for (std::size_t i = 0; i < n; ++i) {
            const Point2 e1 = vertices_[(i + 1) % n] - vertices_[i];
            const Point2 e2 = vertices_[(i + 2) % n] - vertices_[(i + 1) % n];
            if (cross(e1, e2) <= 0.0) throw std::invalid_argument("ConvexPolygon: not strictly convex");
        }
    }

    static ConvexPolygon rectangle(double x0, double y0, double x1, double y1) {
        return ConvexPolygon({{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}});
    }

    // Output of clipping a valid polygon; skips the convexity check, which
    // rounding can trip on nearly straight corners.
    static std::optional<ConvexPolygon> from_clip(std::vector<Point2> v, const Tolerance& tol) {
        v = detail::canonicalize(std::move(v), tol.length);
        if (v.size() < 3) return std::nullopt;
        const double a = detail::signed_area(v);
        if (a <= tol.area) return std::nullopt;
        ConvexPolygon poly;
        poly.vertices_ = std::move(v);
        return poly;
    }

    std::span<const Point2> vertices() const { return vertices_; }
    std::size_t size() const { return vertices_.size(); }

    // Min and max of <v, u(theta)> over the vertices.
    std::pair<double, double> support(double theta) const {
        const Point2 u = unit_normal(theta);
        double lo = dot(vertices_.front(), u);
        double hi = lo;
        for (const auto& q : vertices_) {
            const double s = dot(q, u);
            lo = std::min(lo, s);
            hi = std::max(hi, s);
        }
        return {lo, hi};
    }

    double diameter() const {
        double d = 0.0;
        for (std::size_t i = 0; i < vertices_.size(); ++i) {
            for (std::size_t j = i + 1; j < vertices_.size(); ++j) {
                d = std::max(d, distance(vertices_[i], vertices_[j]));
            }
        }
        return d;
    }

    Point2 centroid() const {
        double a = 0.0, cx = 0.0, cy = 0.0;
        const std::size_t n = vertices_.size();
        for (std::size_t i = 0; i < n; ++i) {
            const Point2 p = vertices_[i];
            const Point2 q = vertices_[(i + 1) % n];
            const double w = cross(p, q);
            a += w;
            cx += (p.x + q.x) * w;
            cy += (p.y + q.y) * w;
        }
        return {cx / (3.0 * a), cy / (3.0 * a)};
    }

    // Degeneracy thresholds when this polygon is the window.
    Tolerance window_tolerance() const;

    // Homothetic copy about the centroid.
    ConvexPolygon scaled(double factor) const {
        const Point2 c = centroid();
        std::vector<Point2> v;
        v.reserve(vertices_.size());
        for (const auto& q : vertices_) v.push_back(c + factor * (q - c));
        return ConvexPolygon(std::move(v));
    }

    ConvexPolygon translated(Point2 shift) const {
        ConvexPolygon out = *this;
        for (auto& q : out.vertices_) q = q + shift;
        return out;
    }

private:
    ConvexPolygon() = default;
    std::vector<Point2> vertices_;
};

inline double area(const ConvexPolygon& poly) { return detail::signed_area(poly.vertices()); }

inline double perimeter(const ConvexPolygon& poly) {
    const auto v = poly.vertices();
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) s += distance(v[i], v[(i + 1) % v.size()]);
    return s;
}

inline double width(const ConvexPolygon& poly, double theta) {
    const auto [lo, hi] = poly.support(theta);
    return hi - lo;
}

inline Tolerance ConvexPolygon::window_tolerance() const {
    const double d = diameter();
    return {1e-12 * area(*this), 1e-9 * d};
}

inline bool hits(const Line& line, const ConvexPolygon& poly) {
    const auto [lo, hi] = poly.support(line.theta());
    return lo <= line.p() && line.p() <= hi;
}

struct SplitResult {
    std::optional<ConvexPolygon> plus;   // origin side
    std::optional<ConvexPolygon> minus;  // far side
};

inline SplitResult split(const ConvexPolygon& poly, const Line& line, const Tolerance& tol) {
    const double side = line.origin_side_sign();
    const Point2 n = line.normal();
    const Point2 sn = side * n;
    const double sc = side * line.p();
    // plus: side * (<z,n> - p) <= 0, minus: side * (<z,n> - p) >= 0
    auto plus = detail::clip_halfplane(poly.vertices(), sn, sc, tol.length);
    auto minus = detail::clip_halfplane(poly.vertices(), -1.0 * sn, -sc, tol.length);
    return {ConvexPolygon::from_clip(std::move(plus), tol), ConvexPolygon::from_clip(std::move(minus), tol)};
}

inline SplitResult split(const ConvexPolygon& poly, const Line& line) {
    return split(poly, line, poly.window_tolerance());
}

// True when every vertex of inner satisfies the edge constraints of outer
// up to eps.
inline bool contains(const ConvexPolygon& outer, const ConvexPolygon& inner, double eps) {
    const auto v = outer.vertices();
    for (std::size_t i = 0; i < v.size(); ++i) {
        const Point2 a = v[i];
        const Point2 e = v[(i + 1) % v.size()] - a;
        const double len = norm(e);
        for (const auto& q : inner.vertices()) {
            if (cross(e, q - a) / len < -eps) return false;
        }
    }
    return true;
}

inline bool contains(const ConvexPolygon& outer, Point2 q, double eps) {
    const auto v = outer.vertices();
    for (std::size_t i = 0; i < v.size(); ++i) {
        const Point2 a = v[i];
        const Point2 e = v[(i + 1) % v.size()] - a;
        if (cross(e, q - a) / norm(e) < -eps) return false;
    }
    return true;
}

inline std::optional<ConvexPolygon> intersect(const ConvexPolygon& a, const ConvexPolygon& b, const Tolerance& tol) {
    std::vector<Point2> v(a.vertices().begin(), a.vertices().end());
    const auto w = b.vertices();
    for (std::size_t i = 0; i < w.size() && !v.empty(); ++i) {
        const Point2 p = w[i];
        const Point2 e = w[(i + 1) % w.size()] - p;
        // CCW polygon: interior lies left of each edge, outward normal (e.y, -e.x).
        const double len = norm(e);
        const Point2 n{e.y / len, -e.x / len};
        v = detail::clip_halfplane(v, n, dot(p, n), tol.length);
    }
    return ConvexPolygon::from_clip(std::move(v), tol);
}

// Cyrus-Beck: the part of segment s inside poly.
inline std::optional<Segment> clip_segment(const Segment& s, const ConvexPolygon& poly, double eps) {
    double t0 = 0.0, t1 = 1.0;
    const Point2 d = s.b - s.a;
    const auto w = poly.vertices();
    for (std::size_t i = 0; i < w.size(); ++i) {
        const Point2 p = w[i];
        const Point2 e = w[(i + 1) % w.size()] - p;
        const double len = norm(e);
        const Point2 n{e.y / len, -e.x / len};
        // inside: <z - p, n> <= eps
        const double num = eps - dot(s.a - p, n);
        const double den = dot(d, n);
        if (den == 0.0) {
            if (num < 0.0) return std::nullopt;
            continue;
        }
        const double t = num / den;
        if (den > 0.0) {
            t1 = std::min(t1, t);
        } else {
            t0 = std::max(t0, t);
        }
        if (t0 > t1) return std::nullopt;
    }
    return Segment{s.a + t0 * d, s.a + t1 * d};
}

// The chord line ∩ poly, if the line meets the polygon.
inline std::optional<Segment> chord(const Line& line, const ConvexPolygon& poly, double eps) {
    if (!hits(line, poly)) return std::nullopt;
    const Point2 base = line.p() * line.normal();
    const Point2 dir = line.direction();
    const double reach = poly.diameter() + norm(poly.vertices().front() - base) + 1.0;
    return clip_segment({base - reach * dir, base + reach * dir}, poly, eps);
}

// The chord a successful split leaves behind. Clip against the cell itself;
// the slack only rescues a line that rounding pushed just outside.
inline std::optional<Segment> cut_chord(const Line& line, const ConvexPolygon& poly, const Tolerance& tol) {
    if (auto c = chord(line, poly, 0.0)) return c;
    return chord(line, poly, tol.length);
}

}  // namespace mecke
