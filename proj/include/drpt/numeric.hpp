#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

namespace drpt {

// Shortest round-trip decimal representation; used everywhere a double is
// serialized so that identical values always yield identical bytes.
inline std::string format_double(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / 1.4142135623730950488016887242097);
}

// Acklam's rational approximation to the standard normal quantile,
// refined with one Halley step; accurate to ~1e-15 over (0,1).
double normal_quantile(double p);

inline double log_binomial(double n, double k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// log(sum(exp(v))) without overflow.
double log_sum_exp(const std::vector<double>& values);

inline double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

inline double binomial_se(double rate, std::size_t trials) {
    if (trials == 0) return 0.0;
    return std::sqrt(rate * (1.0 - rate) / static_cast<double>(trials));
}

} // namespace drpt
