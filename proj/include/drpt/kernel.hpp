#pragma once

#include <span>
#include <string>
#include <vector>

#include "drpt/sample.hpp"

namespace drpt {

enum class KernelFamily { Gaussian, Laplace, Collision };

// Product kernel with an explicit bandwidth prefactor:
//   Gaussian: zeta^d * pi^(-d/2) * exp(-zeta^2 ||x-y||_2^2)
//   Laplace:  zeta^d * 2^(-d)    * exp(-zeta   ||x-y||_1)
//   Collision: 1{x == y} on category codes (bandwidth-free)
struct KernelSpec {
    KernelFamily family = KernelFamily::Gaussian;
    bool median_heuristic = true;
    double bandwidth = 0.0; // used when median_heuristic is false

    static KernelSpec gaussian_median() { return {KernelFamily::Gaussian, true, 0.0}; }
    static KernelSpec gaussian(double zeta) { return {KernelFamily::Gaussian, false, zeta}; }
    static KernelSpec laplace(double zeta) { return {KernelFamily::Laplace, false, zeta}; }
    static KernelSpec laplace_median() { return {KernelFamily::Laplace, true, 0.0}; }
    static KernelSpec collision() { return {KernelFamily::Collision, false, 1.0}; }
};

// 1 / median of the nonzero pairwise Euclidean distances of the pooled
// sample. Errors with DegenerateSample when all points coincide.
double median_heuristic(const PooledSample& sample);

// Bandwidth actually used for this sample (resolves the median rule).
double resolve_bandwidth(const KernelSpec& spec, const PooledSample& sample);

double kernel_eval(const KernelSpec& spec, double zeta, std::span<const double> x,
                   std::span<const double> y);
double kernel_eval_categories(const KernelSpec& spec, double zeta, int a, int b);

// Dense N x N Gram matrix over the pooled points (row-major, symmetric).
std::vector<double> gram_matrix(const PooledSample& sample, const KernelSpec& spec,
                                double zeta);

// (J+1) x (J+1) kernel table over category codes.
std::vector<double> category_kernel_table(std::size_t num_categories, const KernelSpec& spec,
                                          double zeta);

const char* kernel_family_name(KernelFamily family) noexcept;

} // namespace drpt
