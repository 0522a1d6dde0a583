#pragma once

// Statistical test instruments used by the test suites only. These are kept
// independent of the library's implementation paths on purpose.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <vector>

namespace checks {

// Regularized lower incomplete gamma P(a, x) via series / continued fraction.
inline double gamma_p(double a, double x) {
    if (x <= 0.0) return 0.0;
    const double log_gamma_a = std::lgamma(a);
    if (x < a + 1.0) {
        double term = 1.0 / a;
        double sum = term;
        double ap = a;
        for (int k = 0; k < 500; ++k) {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if (std::fabs(term) < std::fabs(sum) * 1e-15) break;
        }
        return sum * std::exp(-x + a * std::log(x) - log_gamma_a);
    }
    // Lentz continued fraction for Q(a, x)
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < 1e-15) break;
    }
    const double q = std::exp(-x + a * std::log(x) - log_gamma_a) * h;
    return 1.0 - q;
}

// Upper tail of the chi-square distribution with df degrees of freedom.
inline double chi_square_sf(double x, double df) {
    return 1.0 - gamma_p(df / 2.0, x / 2.0);
}

// Goodness-of-fit chi-square p-value of observed counts against expected
// probabilities (cells with tiny expectation are pooled into the last cell).
inline double chi_square_gof_p(const std::vector<double>& observed,
                               const std::vector<double>& expected_prob) {
    double total = 0.0;
    for (double o : observed) total += o;
    double stat = 0.0;
    int cells = 0;
    double pooled_obs = 0.0, pooled_exp = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        const double e = expected_prob[i] * total;
        if (e < 5.0) {
            pooled_obs += observed[i];
            pooled_exp += e;
            continue;
        }
        stat += (observed[i] - e) * (observed[i] - e) / e;
        ++cells;
    }
    if (pooled_exp > 0.0) {
        stat += (pooled_obs - pooled_exp) * (pooled_obs - pooled_exp) / pooled_exp;
        ++cells;
    }
    if (cells <= 1) return 1.0;
    return chi_square_sf(stat, static_cast<double>(cells - 1));
}

// Asymptotic two-sample Kolmogorov-Smirnov p-value.
inline double ks_two_sample_p(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    double d = 0.0;
    std::size_t ia = 0, ib = 0;
    while (ia < a.size() && ib < b.size()) {
        const double x = std::min(a[ia], b[ib]);
        while (ia < a.size() && a[ia] <= x) ++ia;
        while (ib < b.size() && b[ib] <= x) ++ib;
        d = std::max(d, std::fabs(static_cast<double>(ia) / na -
                                  static_cast<double>(ib) / nb));
    }
    const double ne = std::sqrt(na * nb / (na + nb));
    const double lambda = (ne + 0.12 + 0.11 / ne) * d;
    double p = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * lambda * lambda * k * k);
        p += sign * term;
        sign = -sign;
        if (term < 1e-12) break;
    }
    return std::min(1.0, std::max(0.0, 2.0 * p));
}

// Total variation distance between two distributions given as maps.
template <typename Key>
double tv_distance(const std::map<Key, double>& p, const std::map<Key, double>& q) {
    double acc = 0.0;
    for (const auto& [key, value] : p) {
        const auto it = q.find(key);
        acc += std::fabs(value - (it == q.end() ? 0.0 : it->second));
    }
    for (const auto& [key, value] : q) {
        if (p.find(key) == p.end()) acc += value;
    }
    return 0.5 * acc;
}

} // namespace checks
