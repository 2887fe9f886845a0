#pragma once

// Closed-form laws of the jump-clock construction and the hypothesis-test
// machinery used by the verification suites.
//
// Notation: T_j ~ Exp(j R) independent, S_n = T_1 + ... + T_n and
// S_n^k = T_n + ... + T_k.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "mecke/continuous.hpp"

namespace mecke {

class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& what, double error_estimate)
        : std::runtime_error(what + " (error estimate " + std::to_string(error_estimate) + ")"),
          error_estimate_(error_estimate) {}
    double error_estimate() const { return error_estimate_; }

private:
    double error_estimate_;
};

inline constexpr double quadrature_abs_tol = 1e-10;

// Adaptive Gauss-Kronrod (61 points) on [a, b]; b may be +infinity.
inline double integrate(const std::function<double(double)>& f, double a, double b) {
    double error = 0.0;
    double l1 = 0.0;
    const double value =
        boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 25, quadrature_abs_tol, &error, &l1);
    if (!std::isfinite(value) || error > quadrature_abs_tol) {
        throw QuadratureError("integrate: no convergence on [" + std::to_string(a) + ", " + std::to_string(b) + "]",
                              error);
    }
    return value;
}

// P(nu(t) = k) = e^{-Rt} (1 - e^{-Rt})^k.
inline double geometric_pmf(std::uint64_t k, double t, double rate) {
    if (!(t >= 0.0) || !(rate > 0.0)) throw std::invalid_argument("geometric_pmf: need t >= 0 and R > 0");
    const double p = std::exp(-rate * t);
    if (k == 0) return p;
    return p * std::pow(-std::expm1(-rate * t), static_cast<double>(k));
}

// P(S_n <= t) = (1 - e^{-tR})^n.
inline double sum_exp_cdf(std::uint64_t n, double t, double rate) {
    if (n < 1 || !(t >= 0.0) || !(rate > 0.0)) throw std::invalid_argument("sum_exp_cdf: need n >= 1, t >= 0, R > 0");
    return std::pow(-std::expm1(-rate * t), static_cast<double>(n));
}

// Density of S_n^k:
//   k! / ((k-n)! (n-1)!) * R * (e^{Rx} - 1)^{k-n} * e^{-kRx},
// evaluated in log space.
inline double partial_sum_density(std::uint64_t n, std::uint64_t k, double rate, double x) {
    if (n < 1 || n > k) throw std::invalid_argument("partial_sum_density: need 1 <= n <= k");
    if (!(rate > 0.0)) throw std::invalid_argument("partial_sum_density: need R > 0");
    if (x < 0.0) return 0.0;
    const auto dn = static_cast<double>(n), dk = static_cast<double>(k);
    if (x == 0.0) return k == n ? dn * rate : 0.0;
    const double log_coeff = std::lgamma(dk + 1.0) - std::lgamma(dn) - std::lgamma(dk - dn + 1.0);
    // (k-n) ln(e^{Rx} - 1) - kRx rewritten so large x cannot overflow
    const double log_body = (dk - dn) * std::log1p(-std::exp(-rate * x)) - dn * rate * x;
    return std::exp(log_coeff + std::log(rate) + log_body);
}

// P(S_n^k <= t) by quadrature of the density.
inline double partial_sum_cdf(std::uint64_t n, std::uint64_t k, double rate, double t) {
    if (n < 1 || n > k) throw std::invalid_argument("partial_sum_cdf: need 1 <= n <= k");
    if (!(t >= 0.0)) throw std::invalid_argument("partial_sum_cdf: need t >= 0");
    if (t == 0.0) return 0.0;
    const double v = integrate([&](double x) { return partial_sum_density(n, k, rate, x); }, 0.0, t);
    return std::clamp(v, 0.0, 1.0);
}

struct SeriesResult {
    double value = 0.0;
    double tail_bound = 0.0;
    std::uint64_t terms = 0;
};

// Waiting time of a convex S inside a cell, given n quasi-cells at the
// start:
//   sum_{k>=n} P(S_n^k <= t) * (r/k) * prod_{i=n}^{k-1} (1 - r/i),  r = qS/qW.
// The weights sum to one and P(S_n^k <= t) falls in k, so everything from
// term k on is bounded by P(S_n^k <= t) * prod_{i=n}^{k-1} (1 - r/i).
// Stops once that bound is below tol and the last term added is below
// tol/10.
inline SeriesResult lifetime_series(std::uint64_t n, double q_subset, double q_window, double t, double tol) {
    if (n < 1) throw std::invalid_argument("lifetime_series_cdf: need n >= 1");
    if (!(q_subset > 0.0) || !(q_window > 0.0)) throw std::invalid_argument("lifetime_series_cdf: measures must be > 0");
    if (q_subset > q_window) throw std::invalid_argument("lifetime_series_cdf: subset measure exceeds window measure");
    if (!(t >= 0.0) || !(tol > 0.0)) throw std::invalid_argument("lifetime_series_cdf: need t >= 0 and tol > 0");

    const double r = q_subset / q_window;
    SeriesResult res;
    double survive = 1.0;  // prod_{i=n}^{k-1} (1 - r/i)
    double last_term = 1.0;
    constexpr std::uint64_t max_terms = 1'000'000;
    for (std::uint64_t k = n; k < n + max_terms; ++k) {
        const double p = partial_sum_cdf(n, k, q_window, t);
        res.tail_bound = p * survive;
        if (res.tail_bound < tol && last_term < tol / 10.0) return res;
        last_term = p * (r / static_cast<double>(k)) * survive;
        res.value += last_term;
        ++res.terms;
        survive *= 1.0 - r / static_cast<double>(k);
    }
    throw std::runtime_error("lifetime_series_cdf: series did not reach the tail tolerance");
}

inline double lifetime_series_cdf(std::uint64_t n, double q_subset, double q_window, double t, double tol) {
    return lifetime_series(n, q_subset, q_window, t, tol).value;
}

// Values plus the number of right-censored observations, all of which lie
// beyond every recorded value. When the censoring time is known the
// empirical CDF is also defined up to it.
struct EmpiricalSample {
    std::vector<double> values;
    std::size_t censored_count = 0;
    std::optional<double> censor_time;

    std::size_t size() const { return values.size() + censored_count; }
};

// sup_x |F_hat(x) - F(x)| over the observed points, and up to the
// censoring time when it is known; censored mass only enters through the
// denominator.
inline double ks_statistic(const EmpiricalSample& sample, const std::function<double(double)>& cdf) {
    const std::size_t total = sample.size();
    if (total == 0) throw std::invalid_argument("ks_statistic: empty sample");
    std::vector<double> v = sample.values;
    std::sort(v.begin(), v.end());
    const auto n = static_cast<double>(total);
    double d = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double f = cdf(v[i]);
        d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
    }
    if (sample.censor_time) d = std::max(d, cdf(*sample.censor_time) - static_cast<double>(v.size()) / n);
    return d;
}

inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const auto na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

// Asymptotic two-sample critical value sqrt(-ln(alpha/2)/2) * sqrt((n+m)/(nm)).
inline double ks_two_sample_critical(std::size_t n, std::size_t m, double alpha) {
    const double c = std::sqrt(-0.5 * std::log(alpha / 2.0));
    const auto dn = static_cast<double>(n), dm = static_cast<double>(m);
    return c * std::sqrt((dn + dm) / (dn * dm));
}

// Upper alpha quantile of chi-square with `dof` degrees of freedom.
inline double chi_square_critical(std::size_t dof, double alpha) {
    if (dof == 0) return 0.0;
    const boost::math::chi_squared dist(static_cast<double>(dof));
    return boost::math::quantile(boost::math::complement(dist, alpha));
}

// sum (obs - exp)^2 / exp over the given bins, no merging.
inline double chi_square_statistic(const std::vector<double>& observed, const std::vector<double>& expected) {
    if (observed.size() != expected.size()) throw std::invalid_argument("chi_square_statistic: bin count mismatch");
    double total = 0.0;
    for (double e : expected) total += e;
    if (!(total > 0.0)) throw std::invalid_argument("chi_square_statistic: all expected counts are zero");
    double s = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        if (expected[i] > 0.0) {
            s += (observed[i] - expected[i]) * (observed[i] - expected[i]) / expected[i];
        } else if (observed[i] > 0.0) {
            return std::numeric_limits<double>::infinity();
        }
    }
    return s;
}

struct ChiSquareResult {
    double statistic = 0.0;
    std::size_t dof = 0;
    double critical = 0.0;
    bool pass() const { return statistic <= critical; }
};

namespace detail {

// Groups consecutive bins until each group reaches `min_expected` under
// `weight`; a short final group joins its predecessor.
inline std::vector<std::size_t> merge_groups(const std::vector<double>& weight, double min_expected) {
    std::vector<std::size_t> group(weight.size(), 0);
    std::size_t g = 0;
    double acc = 0.0;
    std::size_t closed = 0;
    for (std::size_t i = 0; i < weight.size(); ++i) {
        group[i] = g;
        acc += weight[i];
        if (acc >= min_expected) {
            ++g;
            closed = g;
            acc = 0.0;
        }
    }
    if (closed == 0) {
        std::fill(group.begin(), group.end(), 0);
    } else {
        for (auto& x : group) x = std::min(x, closed - 1);
    }
    return group;
}

}  // namespace detail

// Goodness of fit with tail merging: bins are merged in order until each
// has expected count >= 5.
inline ChiSquareResult chi_square_test(const std::vector<double>& observed, const std::vector<double>& expected,
                                       double alpha) {
    if (observed.size() != expected.size()) throw std::invalid_argument("chi_square_test: bin count mismatch");
    const auto group = detail::merge_groups(expected, 5.0);
    const std::size_t groups = group.empty() ? 0 : group.back() + 1;
    std::vector<double> obs(groups, 0.0), exp(groups, 0.0);
    for (std::size_t i = 0; i < group.size(); ++i) {
        obs[group[i]] += observed[i];
        exp[group[i]] += expected[i];
    }
    ChiSquareResult r;
    r.statistic = chi_square_statistic(obs, exp);
    r.dof = groups > 0 ? groups - 1 : 0;
    r.critical = chi_square_critical(r.dof, alpha);
    return r;
}

// Two-sample (2 x B contingency) test on category counts, with pooled
// expected counts and merging until every expected count is >= 5.
inline ChiSquareResult chi_square_two_sample(const std::vector<double>& a, const std::vector<double>& b, double alpha) {
    const std::size_t bins = std::max(a.size(), b.size());
    std::vector<double> ca(bins, 0.0), cb(bins, 0.0);
    std::copy(a.begin(), a.end(), ca.begin());
    std::copy(b.begin(), b.end(), cb.begin());
    const double na = std::accumulate(ca.begin(), ca.end(), 0.0);
    const double nb = std::accumulate(cb.begin(), cb.end(), 0.0);
    if (!(na > 0.0) || !(nb > 0.0)) throw std::invalid_argument("chi_square_two_sample: empty sample");

    // Smaller arm's expected share drives merging.
    const double share = std::min(na, nb) / (na + nb);
    std::vector<double> weight(bins);
    for (std::size_t i = 0; i < bins; ++i) weight[i] = (ca[i] + cb[i]) * share;
    const auto group = detail::merge_groups(weight, 5.0);
    const std::size_t groups = group.empty() ? 0 : group.back() + 1;
    std::vector<double> ga(groups, 0.0), gb(groups, 0.0);
    for (std::size_t i = 0; i < bins; ++i) {
        ga[group[i]] += ca[i];
        gb[group[i]] += cb[i];
    }
    ChiSquareResult r;
    for (std::size_t g = 0; g < groups; ++g) {
        const double pooled = ga[g] + gb[g];
        const double ea = pooled * na / (na + nb);
        const double eb = pooled * nb / (na + nb);
        r.statistic += (ga[g] - ea) * (ga[g] - ea) / ea + (gb[g] - eb) * (gb[g] - eb) / eb;
    }
    r.dof = groups > 0 ? groups - 1 : 0;
    r.critical = chi_square_critical(r.dof, alpha);
    return r;
}

// Histogram of naturals: counts[v] = number of occurrences of v.
inline std::vector<double> count_histogram(const std::vector<std::uint64_t>& values) {
    std::uint64_t hi = 0;
    for (auto v : values) hi = std::max(hi, v);
    std::vector<double> counts(values.empty() ? 0 : hi + 1, 0.0);
    for (auto v : values) counts[v] += 1.0;
    return counts;
}

struct TessSummary {
    std::size_t cell_count = 0;
    double boundary_length = 0.0;
    double area_mean = 0.0;
    double area_var = 0.0;  // population variance
};

inline TessSummary summarize(const Tessellation& tess) {
    TessSummary s;
    s.cell_count = tess.cells.size();
    s.boundary_length = boundary_length(tess);
    if (s.cell_count == 0) return s;
    double sum = 0.0;
    for (const auto& c : tess.cells) sum += area(c.body);
    s.area_mean = sum / static_cast<double>(s.cell_count);
    double var = 0.0;
    for (const auto& c : tess.cells) {
        const double d = area(c.body) - s.area_mean;
        var += d * d;
    }
    s.area_var = var / static_cast<double>(s.cell_count);
    return s;
}

}  // namespace mecke
