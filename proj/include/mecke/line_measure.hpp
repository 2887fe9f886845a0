#pragma once

// Line measures of the form
//
//     Q = scale * ( iso_weight * dtheta dp  +  sum_i weight_i * delta_{theta_i}(dtheta) dp )
//
// on (theta, p) in [0, pi) x R. Every component is Lebesgue in p, so no
// pencil of lines through a point carries mass.

#include <numbers>
#include <stdexcept>
#include <vector>

#include "mecke/geometry.hpp"
#include "mecke/rng.hpp"

namespace mecke {

struct DirectionAtom {
    double theta = 0.0;
    double weight = 0.0;
};

class MeasureSpec {
public:
    MeasureSpec(double iso_weight, std::vector<DirectionAtom> atoms, double scale = 1.0)
        : iso_weight_(iso_weight), atoms_(std::move(atoms)), scale_(scale) {
        if (!(iso_weight >= 0.0) || !std::isfinite(iso_weight)) {
            throw std::invalid_argument("MeasureSpec: iso_weight must be >= 0");
        }
        if (!(scale > 0.0) || !std::isfinite(scale)) throw std::invalid_argument("MeasureSpec: scale must be > 0");
        bool two_directions = false;
        for (const auto& a : atoms_) {
            if (!(a.theta >= 0.0 && a.theta < std::numbers::pi)) {
                throw std::invalid_argument("MeasureSpec: atom direction must lie in [0, pi)");
            }
            if (!(a.weight > 0.0) || !std::isfinite(a.weight)) {
                throw std::invalid_argument("MeasureSpec: atom weight must be > 0");
            }
            if (a.theta != atoms_.front().theta) two_directions = true;
        }
        if (!(iso_weight_ > 0.0 || two_directions)) {
            throw std::invalid_argument("MeasureSpec: measure is concentrated on one direction");
        }
    }

    static MeasureSpec isotropic(double weight = 1.0) { return MeasureSpec(weight, {}); }

    double iso_weight() const { return iso_weight_; }
    const std::vector<DirectionAtom>& atoms() const { return atoms_; }
    double scale() const { return scale_; }

    MeasureSpec with_scale(double scale) const { return MeasureSpec(iso_weight_, atoms_, scale); }

private:
    double iso_weight_;
    std::vector<DirectionAtom> atoms_;
    double scale_;
};

// Q([K]) = scale * (iso_weight * perimeter(K) + sum_i weight_i * width(K, theta_i)).
inline double measure_hitting(const MeasureSpec& spec, const ConvexPolygon& poly) {
    double q = spec.iso_weight() * perimeter(poly);
    for (const auto& a : spec.atoms()) q += a.weight * width(poly, a.theta);
    return spec.scale() * q;
}

// Draws from Q( . ∩ [poly]) / Q([poly]). Component choice consumes one
// uniform; the isotropic direction comes from rejection against the
// diameter; the offset is uniform over the support interval.
template <class Rng>
Line sample_line_hitting(const MeasureSpec& spec, const ConvexPolygon& poly, Rng& rng) {
    const double iso_mass = spec.iso_weight() * perimeter(poly);
    double total = iso_mass;
    for (const auto& a : spec.atoms()) total += a.weight * width(poly, a.theta);

    double theta = 0.0;
    double pick = uniform01(rng) * total;
    bool chosen = false;
    if (pick < iso_mass) {
        const double diam = poly.diameter();
        for (;;) {
            const double cand = uniform01(rng) * std::numbers::pi;
            if (uniform01(rng) * diam <= width(poly, cand)) {
                theta = cand;
                break;
            }
        }
        chosen = true;
    } else {
        pick -= iso_mass;
        for (const auto& a : spec.atoms()) {
            const double m = a.weight * width(poly, a.theta);
            if (pick < m) {
                theta = a.theta;
                chosen = true;
                break;
            }
            pick -= m;
        }
    }
    if (!chosen) theta = spec.atoms().back().theta;  // rounding at the upper end

    const auto [lo, hi] = poly.support(theta);
    return Line(theta, uniform(rng, lo, hi));
}

// Scaled copy with Q([subwindow]) = 1. Only meaningful for hitting values
// of subsets of the subwindow and for line sampling inside it.
inline MeasureSpec restrict(const MeasureSpec& spec, const ConvexPolygon& subwindow) {
    const double q = measure_hitting(spec, subwindow);
    if (!(q > 0.0)) throw std::invalid_argument("restrict: subwindow has zero hitting measure");
    return spec.with_scale(spec.scale() / q);
}

}  // namespace mecke
