#include "drpt/kernel.hpp"

#include <algorithm>
#include <cmath>

namespace drpt {

namespace {

double sq_distance(std::span<const double> x, std::span<const double> y) {
    double s = 0.0;
    for (std::size_t d = 0; d < x.size(); ++d) {
        const double diff = x[d] - y[d];
        s += diff * diff;
    }
    return s;
}

double l1_distance(std::span<const double> x, std::span<const double> y) {
    double s = 0.0;
    for (std::size_t d = 0; d < x.size(); ++d) s += std::fabs(x[d] - y[d]);
    return s;
}

constexpr double kInvSqrtPi = 0.56418958354775628694807945156077;

} // namespace

double median_heuristic(const PooledSample& sample) {
    const std::size_t total = sample.size();
    require(total >= 2, ErrorCode::DegenerateSample, "median heuristic needs >= 2 points");

    std::vector<double> dists;
    dists.reserve(total * (total - 1) / 2);
    for (std::size_t i = 0; i < total; ++i) {
        for (std::size_t j = i + 1; j < total; ++j) {
            double d;
            if (sample.is_categorical()) {
                d = std::fabs(static_cast<double>(sample.category(i) - sample.category(j)));
            } else {
                d = std::sqrt(sq_distance(sample.point(i), sample.point(j)));
            }
            if (d > 0.0) dists.push_back(d);
        }
    }
    require(!dists.empty(), ErrorCode::DegenerateSample,
            "all points identical: median heuristic undefined");

    const std::size_t len = dists.size();
    const std::size_t upper = len / 2;
    std::nth_element(dists.begin(), dists.begin() + upper, dists.end());
    double med = dists[upper];
    if (len % 2 == 0) {
        const auto lower_it = std::max_element(dists.begin(), dists.begin() + upper);
        med = 0.5 * (*lower_it + med);
    }
    return 1.0 / med;
}

double resolve_bandwidth(const KernelSpec& spec, const PooledSample& sample) {
    if (spec.family == KernelFamily::Collision) return 1.0;
    if (!spec.median_heuristic) {
        require(spec.bandwidth > 0.0, ErrorCode::InvalidArgument,
                "fixed kernel bandwidth must be positive");
        return spec.bandwidth;
    }
    return median_heuristic(sample);
}

double kernel_eval(const KernelSpec& spec, double zeta, std::span<const double> x,
                   std::span<const double> y) {
    require(x.size() == y.size() && !x.empty(), ErrorCode::DomainMismatch,
            "kernel arguments must share a positive dimension");
    const double d = static_cast<double>(x.size());
    switch (spec.family) {
        case KernelFamily::Gaussian:
            return std::pow(zeta, d) * std::pow(kInvSqrtPi, d) *
                   std::exp(-zeta * zeta * sq_distance(x, y));
        case KernelFamily::Laplace:
            return std::pow(zeta, d) * std::pow(0.5, d) * std::exp(-zeta * l1_distance(x, y));
        case KernelFamily::Collision:
            fail(ErrorCode::DomainMismatch, "collision kernel requires categorical data");
    }
    fail(ErrorCode::Internal, "unreachable kernel family");
}

double kernel_eval_categories(const KernelSpec& spec, double zeta, int a, int b) {
    if (spec.family == KernelFamily::Collision) return a == b ? 1.0 : 0.0;
    const double xa = static_cast<double>(a);
    const double xb = static_cast<double>(b);
    return kernel_eval(spec, zeta, std::span<const double>(&xa, 1),
                       std::span<const double>(&xb, 1));
}

std::vector<double> gram_matrix(const PooledSample& sample, const KernelSpec& spec,
                                double zeta) {
    const std::size_t total = sample.size();
    std::vector<double> gram(total * total);
    if (sample.is_categorical()) {
        const std::size_t cats = sample.num_categories();
        const auto table = category_kernel_table(cats, spec, zeta);
        for (std::size_t i = 0; i < total; ++i) {
            for (std::size_t j = 0; j < total; ++j) {
                gram[i * total + j] =
                    table[static_cast<std::size_t>(sample.category(i)) * cats +
                          static_cast<std::size_t>(sample.category(j))];
            }
        }
        return gram;
    }
    for (std::size_t i = 0; i < total; ++i) {
        gram[i * total + i] = kernel_eval(spec, zeta, sample.point(i), sample.point(i));
        for (std::size_t j = i + 1; j < total; ++j) {
            const double v = kernel_eval(spec, zeta, sample.point(i), sample.point(j));
            gram[i * total + j] = v;
            gram[j * total + i] = v;
        }
    }
    return gram;
}

std::vector<double> category_kernel_table(std::size_t num_categories, const KernelSpec& spec,
                                          double zeta) {
    std::vector<double> table(num_categories * num_categories);
    for (std::size_t a = 0; a < num_categories; ++a) {
        for (std::size_t b = 0; b < num_categories; ++b) {
            table[a * num_categories + b] =
                kernel_eval_categories(spec, zeta, static_cast<int>(a), static_cast<int>(b));
        }
    }
    return table;
}

const char* kernel_family_name(KernelFamily family) noexcept {
    switch (family) {
        case KernelFamily::Gaussian: return "gaussian";
        case KernelFamily::Laplace: return "laplace";
        case KernelFamily::Collision: return "collision";
    }
    return "unknown";
}

} // namespace drpt
