#pragma once

#include <functional>
#include <vector>

#include "drpt/count_table.hpp"
#include "drpt/kernel.hpp"
#include "drpt/lambda.hpp"
#include "drpt/permutation.hpp"
#include "drpt/sample.hpp"

namespace drpt {

enum class StatKind { VStat, UStat, DiscreteAbs, GenericIpm };

struct StatisticValue {
    double value = 0.0;
    StatKind kind = StatKind::VStat;
    double lambda_hat = 0.0;
    double bandwidth = 0.0;
};

// Reusable state for evaluating the shifted-MMD statistics over many
// permutations of one dataset: the Gram matrix is permutation-invariant and
// the per-point weights q_i = lambda*m*r_i/(n+lambda*m*r_i) travel with the
// points, so each permuted statistic is an O(N^2) weighted quadratic form.
struct MmdContext {
    std::vector<double> gram; // N x N row-major
    std::vector<double> q;    // per original point index
    std::size_t n = 0;
    std::size_t m = 0;
    double norm = 0.0; // (n+m)/(n*m)
    double bandwidth = 0.0;
};

MmdContext make_mmd_context(const PooledSample& sample, const std::vector<double>& rvalues,
                            double lambda_hat, const KernelSpec& spec);

// Statistic of the permuted dataset Z_sigma. Positive and negative
// contributions are accumulated separately so that exact cancellations
// (identical samples, fully tied data) survive floating point.
double shifted_mmd_permuted(const MmdContext& ctx, const Permutation& sigma, StatKind kind);

// Three-term sums of the V-statistic (kind VStat) and the U-statistic with
// within-sample diagonals removed (kind UStat). Verifies that lambda_hat
// solves its defining equation for this data (LambdaMismatch otherwise).
StatisticValue vstat_shifted_mmd(const PooledSample& sample, const std::vector<double>& rvalues,
                                 double lambda_hat, const KernelSpec& spec);
StatisticValue ustat_shifted_mmd(const PooledSample& sample, const std::vector<double>& rvalues,
                                 double lambda_hat, const KernelSpec& spec);

// Finite-dictionary version of the weighted-sum IPM statistic: the maximum
// absolute weighted mean difference over the supplied functions.
using DictionaryFn = std::function<double(const PooledSample&, std::size_t)>;

struct IpmContext {
    std::vector<double> phi; // dictionary_size x N, phi values per point
    std::vector<double> q;
    std::size_t n = 0;
    std::size_t m = 0;
    std::size_t dictionary_size = 0;
    double norm = 0.0;
};

IpmContext make_ipm_context(const PooledSample& sample, const std::vector<double>& rvalues,
                            double lambda_hat, const std::vector<DictionaryFn>& dictionary);
double ipm_permuted(const IpmContext& ctx, const Permutation& sigma);
double generic_ipm_statistic(const PooledSample& sample, const std::vector<double>& rvalues,
                             double lambda_hat, const std::vector<DictionaryFn>& dictionary);

// Dictionary used by the command-line `--stat ipm`: category indicators for
// categorical data, coordinate projections for continuous data.
std::vector<DictionaryFn> default_ipm_dictionary(const PooledSample& sample);

// Population shifted MMD^2 of a discrete model (Prop-style three-term sum
// over the support); nonnegative, zero iff g is proportional to r*f when the
// kernel is characteristic on the support.
double population_shifted_mmd(const PopulationModel& model, std::size_t n, std::size_t m,
                              double lambda0, const KernelSpec& spec);

// Count-level absolute-difference statistic for discrete data; r is
// normalized so its first entry is 1.
double discrete_abs_statistic(const CountTable& table, const std::vector<double>& r);

// O(J^2) count form of the shifted-MMD statistics for categorical data;
// agrees with the dense form.
double shifted_mmd_from_counts(const CountTable& table, const std::vector<double>& q_by_category,
                               const std::vector<double>& category_kernel, StatKind kind);

} // namespace drpt
