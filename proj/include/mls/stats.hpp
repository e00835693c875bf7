#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "mls/common.hpp"

namespace mls {

// Regularized lower incomplete gamma P(a,x) via series expansion (x < a+1)
// and continued fraction (otherwise). Standard Lentz/NR construction.
inline double gamma_p(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw domain_error("gamma_p: requires a > 0, x >= 0");
    if (x == 0.0) return 0.0;
    const double lg = std::lgamma(a);
    if (x < a + 1.0) {
        double ap = a;
        double sum = 1.0 / a;
        double del = sum;
        for (int i = 0; i < 1000; ++i) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
        }
        return sum * std::exp(-x + a * std::log(x) - lg);
    }
    // Continued fraction for Q(a,x), then P = 1 - Q.
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 1000; ++i) {
        double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < 1e-16) break;
    }
    double q = std::exp(-x + a * std::log(x) - lg) * h;
    return 1.0 - q;
}

inline double gamma_q(double a, double x) { return 1.0 - gamma_p(a, x); }

// Survival function of the chi-squared distribution with k degrees of freedom.
inline double chi2_sf(double x, double k) {
    if (x <= 0.0) return 1.0;
    return gamma_q(0.5 * k, 0.5 * x);
}

struct Chi2Result {
    double statistic = 0.0;
    double dof = 0.0;
    double p_value = 1.0;
    std::size_t bins_used = 0;
};

// Pearson goodness-of-fit with pooling: bins with expected count below
// `min_expected` are merged into a single pooled bin.
inline Chi2Result chi2_gof(const std::vector<double>& observed, const std::vector<double>& expected,
                           double min_expected = 5.0) {
    if (observed.size() != expected.size()) throw domain_error("chi2_gof: size mismatch");
    double pooled_obs = 0.0, pooled_exp = 0.0, stat = 0.0;
    std::size_t used = 0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        if (expected[i] < min_expected) {
            pooled_obs += observed[i];
            pooled_exp += expected[i];
        } else {
            double d = observed[i] - expected[i];
            stat += d * d / expected[i];
            ++used;
        }
    }
    if (pooled_exp > 0.0) {
        double d = pooled_obs - pooled_exp;
        stat += d * d / pooled_exp;
        ++used;
    }
    Chi2Result res;
    res.statistic = stat;
    res.bins_used = used;
    res.dof = used > 1 ? static_cast<double>(used - 1) : 1.0;
    res.p_value = chi2_sf(stat, res.dof);
    return res;
}

inline double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

inline double stddev_of(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    double m = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace mls
