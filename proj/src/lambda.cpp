#include "drpt/lambda.hpp"

#include <cmath>
#include <functional>

namespace drpt {

namespace {

constexpr double kTolerance = 1e-12;
constexpr int kMaxIterations = 200;

// Root of a strictly decreasing function on [lo, hi] with fn(lo) >= 0 >= fn(hi).
// Secant steps accelerate plain bisection but are only accepted inside the
// current bracket, so convergence is guaranteed.
LambdaEstimate solve_decreasing(double lo, double hi, const std::function<double(double)>& fn) {
    double flo = fn(lo);
    double fhi = fn(hi);
    require(std::isfinite(flo) && std::isfinite(fhi), ErrorCode::NoBracket,
            "defining equation is not finite at the bracket endpoints");
    if (flo <= 0.0) return {lo, flo, 0};
    if (fhi >= 0.0) return {hi, fhi, 0};

    double x = 0.5 * (lo + hi);
    double fx = fn(x);
    int iter = 0;
    while (++iter <= kMaxIterations) {
        if (fx >= 0.0) {
            lo = x;
            flo = fx;
        } else {
            hi = x;
            fhi = fx;
        }
        if (std::abs(fx) <= kTolerance || (hi - lo) <= kTolerance * hi) {
            return {x, fx, iter};
        }
        double next = x - fx * (hi - lo) / (fhi - flo); // secant through the bracket
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        x = next;
        fx = fn(x);
    }
    if (std::abs(fx) <= 1e-9) return {x, fx, iter};
    fail(ErrorCode::NoConvergence, "normalizer solve did not converge in " +
                                       std::to_string(kMaxIterations) + " iterations");
}

} // namespace

LambdaEstimate solve_lambda_hat_counts(std::size_t n, std::size_t m,
                                       const std::vector<double>& tots,
                                       const std::vector<double>& r_by_category) {
    require(n >= 1 && m >= 1, ErrorCode::InvalidArgument, "need n, m >= 1");
    require(tots.size() == r_by_category.size() && !tots.empty(), ErrorCode::InvalidArgument,
            "count and ratio vectors must align");
    const double nn = static_cast<double>(n);
    const double mm = static_cast<double>(m);

    double total = 0.0, sum_r = 0.0, sum_inv = 0.0;
    for (std::size_t j = 0; j < tots.size(); ++j) {
        const double w = tots[j];
        const double r = r_by_category[j];
        require(w >= 0.0, ErrorCode::InvalidArgument, "negative count");
        require(std::isfinite(r) && r > 0.0, ErrorCode::NoBracket,
                "ratio values must be finite and positive");
        total += w;
        sum_r += w * r;
        sum_inv += w / r;
    }
    require(total == nn + mm, ErrorCode::InvalidArgument, "counts must sum to n+m");

    const double mean_r = sum_r / total;
    const double mean_inv = sum_inv / total;
    const double lo = 1.0 / mean_r;
    const double hi = mean_inv;

    auto fn = [&](double lambda) {
        double s = 0.0;
        for (std::size_t j = 0; j < tots.size(); ++j) {
            s += tots[j] / (nn + lambda * mm * r_by_category[j]);
        }
        return s - 1.0;
    };

    if (lo == hi) return {lo, fn(lo), 0}; // constant r: closed form 1/c
    return solve_decreasing(lo, hi, fn);
}

LambdaEstimate solve_lambda_hat(std::size_t n, std::size_t m,
                                const std::vector<double>& rvalues) {
    require(rvalues.size() == n + m, ErrorCode::InvalidArgument,
            "need one ratio value per pooled point");
    return solve_lambda_hat_counts(n, m, std::vector<double>(rvalues.size(), 1.0), rvalues);
}

void PopulationModel::validate() const {
    require(f.size() == g.size() && f.size() == r.size() && !f.empty(),
            ErrorCode::InvalidArgument, "model vectors must have equal nonzero length");
    double sf = 0.0, sg = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j) {
        require(f[j] >= 0.0 && g[j] >= 0.0, ErrorCode::InvalidArgument,
                "pmf entries must be nonnegative");
        require(std::isfinite(r[j]) && r[j] > 0.0, ErrorCode::InvalidArgument,
                "weights must be finite and positive");
        sf += f[j];
        sg += g[j];
    }
    require(std::abs(sf - 1.0) <= 1e-12 && std::abs(sg - 1.0) <= 1e-12,
            ErrorCode::InvalidArgument, "pmfs must sum to 1 within 1e-12");
}

PopulationModel PopulationModel::null_model(std::vector<double> f, std::vector<double> r) {
    PopulationModel model;
    model.g.resize(f.size());
    double norm = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j) norm += r[j] * f[j];
    for (std::size_t j = 0; j < f.size(); ++j) model.g[j] = r[j] * f[j] / norm;
    model.f = std::move(f);
    model.r = std::move(r);
    model.validate();
    return model;
}

double solve_lambda_zero(const PopulationModel& model, std::size_t n, std::size_t m) {
    model.validate();
    require(n >= 1 && m >= 1, ErrorCode::InvalidArgument, "need n, m >= 1");
    const double nn = static_cast<double>(n);
    const double mm = static_cast<double>(m);

    // F(lambda) = sum_j (n f_j + m g_j)/(n + lambda m r_j) is strictly
    // decreasing with F(0+) = 1 + m/n and F(inf) = 0; bracket like lambda-hat.
    double mean_r = 0.0, mean_inv = 0.0;
    for (std::size_t j = 0; j < model.f.size(); ++j) {
        const double mix = (nn * model.f[j] + mm * model.g[j]) / (nn + mm);
        mean_r += mix * model.r[j];
        mean_inv += mix / model.r[j];
    }
    auto fn = [&](double lambda) {
        double s = 0.0;
        for (std::size_t j = 0; j < model.f.size(); ++j) {
            s += (nn * model.f[j] + mm * model.g[j]) / (nn + lambda * mm * model.r[j]);
        }
        return s - 1.0;
    };
    const double lo = 1.0 / mean_r;
    const double hi = mean_inv;
    if (lo == hi) return lo;
    return solve_decreasing(lo, hi, fn).value;
}

std::vector<double> point_weights(std::size_t n, std::size_t m, double lambda,
                                  const std::vector<double>& rvalues) {
    const double nn = static_cast<double>(n);
    const double lm = lambda * static_cast<double>(m);
    std::vector<double> q(rvalues.size());
    for (std::size_t i = 0; i < rvalues.size(); ++i) {
        q[i] = lm * rvalues[i] / (nn + lm * rvalues[i]);
    }
    return q;
}

} // namespace drpt
