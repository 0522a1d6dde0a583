#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "drpt/kernel.hpp"
#include "drpt/permutation.hpp"
#include "drpt/ratio.hpp"
#include "drpt/sample.hpp"
#include "drpt/statistic.hpp"

namespace drpt {

enum class ResamplingPath { Auto, Mcmc, DiscreteExact };

struct TestConfig {
    std::size_t sweeps = 0; // 0: ceil(8*max(n/m,m/n)*log(n+m))
    std::size_t copies = 99;
    std::uint64_t seed = 0;
    StatKind statistic = StatKind::UStat;
    KernelSpec kernel = KernelSpec::gaussian_median();
    AcceptanceVariant variant = AcceptanceVariant::Plain;
    ResamplingPath path = ResamplingPath::Auto;
    double alpha = 0.05;
    unsigned threads = 1;
    std::vector<DictionaryFn> ipm_dictionary; // empty: default dictionary

    void validate() const;
};

struct TestResult {
    double p_value = 1.0;
    double t_observed = 0.0;
    std::vector<double> t_permuted;
    double lambda_hat = 0.0;
    double bandwidth = 0.0;         // 0 when the statistic uses no kernel
    ResamplingPath path_used = ResamplingPath::Mcmc;
    std::size_t sweeps_used = 0;
    bool reject = false;            // p_value <= alpha
    double alpha = 0.05;
    StatKind statistic = StatKind::UStat;
    std::uint64_t seed = 0;
    double elapsed_ms = 0.0;        // telemetry; never serialized

    // Deterministic payload (config echo + outcome, no wall-clock fields).
    std::string to_json() const;
};

// The density ratio permutation test: draws exchangeable copies (star-shaped
// MCMC, or i.i.d. count tables on the discrete fast path), evaluates the
// statistic on the data and each copy, and returns
// p = (1 + #{t_h >= t_obs}) / (1 + H).
TestResult run_drpt(const PooledSample& sample, const RatioFunction& ratio,
                    const TestConfig& config);

struct CandidateOutcome {
    double p_value = 0.0;
    bool accepted = false;
};

// Tests every candidate ratio at level alpha, each with an independent seed
// derived from config.seed. Accepted = not rejected.
std::vector<CandidateOutcome> invert_confidence_set(const PooledSample& sample,
                                                    const std::vector<RatioFunction>& candidates,
                                                    double alpha, const TestConfig& config);

// Wald interval for the odds multiplier rho in w1/w0 = rho * b1/b0 from two
// binary samples: first sample x1 ones out of n, second y1 ones out of m.
// All four cells must be nonzero.
std::pair<double, double> wald_odds_interval(std::int64_t x1, std::int64_t n,
                                             std::int64_t y1, std::int64_t m, double alpha);

// Plug-in ratio estimator: returns r-hat at every point of `test`, having
// been fitted on `train` only.
using RatioEstimator =
    std::function<std::vector<double>(const PooledSample& train, const PooledSample& test)>;

struct CompositeResult {
    TestResult test;
    std::vector<double> ratio_values; // clipped r-hat on the test points
    double ratio_min = 0.0;
    double ratio_max = 0.0;
    std::size_t clipped = 0;
};

// Composite-null workflow: fit the ratio on the training sample, clip to
// [1e-6, 1e6], and run the test on the held-out sample.
CompositeResult composite_drpt(const PooledSample& train, const PooledSample& test,
                               const RatioEstimator& estimator, const TestConfig& config);

// Seeded 80/20 split of a pooled sample into (train, test), stratified so
// both halves keep points from both samples.
std::pair<PooledSample, PooledSample> train_test_split(const PooledSample& sample,
                                                       double train_fraction,
                                                       std::uint64_t seed);

const char* stat_kind_name(StatKind kind) noexcept;
const char* path_name(ResamplingPath path) noexcept;

} // namespace drpt
