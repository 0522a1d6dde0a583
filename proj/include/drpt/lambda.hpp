#pragma once

#include <cstddef>
#include <vector>

#include "drpt/error.hpp"

namespace drpt {

struct LambdaEstimate {
    double value = 0.0;   // the normalizer itself
    double residual = 0.0; // defining-equation value minus 1 at `value`
    int iterations = 0;
};

// Solves sum_i 1/(n + lambda*m*r_i) = 1 for lambda > 0. The left side is
// strictly decreasing in lambda, and the solution is bracketed by
// [1/mean(r), mean(1/r)], so a guarded bisection/secant hybrid always
// converges. Relative tolerance 1e-12, at most 200 iterations.
LambdaEstimate solve_lambda_hat(std::size_t n, std::size_t m,
                                const std::vector<double>& rvalues);

// Same equation with per-category multiplicities: sum_j tot_j/(n+lambda*m*r_j) = 1.
LambdaEstimate solve_lambda_hat_counts(std::size_t n, std::size_t m,
                                       const std::vector<double>& tots,
                                       const std::vector<double>& r_by_category);

// Discrete population model used as a simulation oracle.
struct PopulationModel {
    std::vector<double> f; // pmf of the first sample
    std::vector<double> g; // pmf of the second sample
    std::vector<double> r; // positive weights

    void validate() const;

    // g proportional to r*f: the null family member with the given f and r.
    static PopulationModel null_model(std::vector<double> f, std::vector<double> r);
};

// Population normalizer: sum_j (n f_j + m g_j)/(n + lambda0 m r_j) = 1.
double solve_lambda_zero(const PopulationModel& model, std::size_t n, std::size_t m);

// Per-point weights q_i = lambda*m*r_i/(n + lambda*m*r_i); the complementary
// weight 1-q_i = n/(n + lambda*m*r_i) attaches to second-sample positions.
std::vector<double> point_weights(std::size_t n, std::size_t m, double lambda,
                                  const std::vector<double>& rvalues);

} // namespace drpt
