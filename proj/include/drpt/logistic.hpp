#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "drpt/kernel.hpp"
#include "drpt/sample.hpp"

namespace drpt {

// Ridge-penalized binomial log-likelihood of class membership (label 1 for
// the second sample) evaluated on an explicit design matrix. The intercept
// column is never penalized. Exposed so tests can probe the objective and
// gradient directly.
struct LogisticProblem {
    std::vector<double> design; // rows x cols, intercept column first
    std::vector<int> labels;    // 0/1 per row
    std::size_t rows = 0;
    std::size_t cols = 0;
    double ridge = 0.0;

    double objective(const std::vector<double>& w) const;
    std::vector<double> gradient(const std::vector<double>& w) const;

    // Damped Newton with backtracking line search from the given start.
    std::vector<double> solve(std::vector<double> start, int max_steps = 500) const;
};

struct LogisticModel {
    enum class Kind { Linear, Kernel };

    Kind kind = Kind::Linear;
    std::vector<double> weights; // intercept first
    double ridge = 0.0;
    std::size_t n_train = 0;
    std::size_t m_train = 0;

    // kernel variant
    KernelSpec spec = KernelSpec::gaussian_median();
    double bandwidth = 0.0;
    std::vector<double> centers; // num_centers x dim, row-major
    std::size_t center_dim = 0;

    double linear_predictor(std::span<const double> point) const;

    // r-hat(z) = (n_train/m_train) * exp(eta(z)), clipped to [1e-6, 1e6].
    double predict_ratio(std::span<const double> point) const;

    std::string to_json() const;
    static LogisticModel from_json(const std::string& text);
};

struct RatioPrediction {
    std::vector<double> values;
    std::size_t clipped = 0;
};

RatioPrediction predict_ratio_on(const LogisticModel& model, const PooledSample& sample);

// Scale-free default penalty: 1e-4 * trace(feature second moment) / dims.
double default_ridge(const PooledSample& train);

LogisticModel fit_linear_logistic(const PooledSample& train, double ridge);

// Logistic regression on kernel features k(., c) for at most max_centers
// centers subsampled uniformly from the training points.
LogisticModel fit_kernel_logistic(const PooledSample& train, const KernelSpec& spec,
                                  double ridge, std::size_t max_centers, std::uint64_t seed);

} // namespace drpt
