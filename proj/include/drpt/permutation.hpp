#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "drpt/error.hpp"
#include "drpt/rng.hpp"

namespace drpt {

// A permutation of the pooled indices {0..n+m-1}. Position p of the permuted
// dataset holds original point sigma[p]; positions [0,n) form the first
// sample, [n,n+m) the second.
using Permutation = std::vector<std::uint32_t>;

Permutation identity_permutation(std::size_t size);
bool is_permutation(const Permutation& sigma);

enum class AcceptanceVariant { Plain, LambdaWeighted };

struct ChainConfig {
    std::size_t sweeps = 0;  // S; 0 means the default below
    std::size_t copies = 1;  // H
    AcceptanceVariant variant = AcceptanceVariant::Plain;
    std::uint64_t seed = 0;
    unsigned threads = 1;
};

// Default sweep count ceil(8 * max(n/m, m/n) * log(n+m)).
std::size_t default_sweeps(std::size_t n, std::size_t m);

// Swap probability r_i/(r_i + r_j) for a candidate pair with the first-
// sample slot holding ratio value r_i.
double acceptance_plain(double r_i, double r_j);

// Swap probability lambda*m*n*r_i / [(n+lambda*m*r_i)(n+lambda*m*r_j)].
// Same swap odds r_i/r_j as the plain variant, different holding probability.
double acceptance_weighted(double r_i, double r_j, double lambda_hat,
                           std::size_t n, std::size_t m);

// One sweep of the pairwise sampler: K = min(n,m) disjoint couples drawn as
// uniform partial shuffles of the two position blocks, each swapped with its
// acceptance probability. Mutates sigma in place.
void sweep(Permutation& sigma, const std::vector<double>& rvalues,
           AcceptanceVariant variant, std::size_t n, std::size_t m, double lambda_hat,
           RngStream& rng);

struct StarDraw {
    Permutation hub;                // sigma_* after S sweeps from identity
    std::vector<Permutation> copies; // H further chains of S sweeps from the hub
};

// Star-shaped scheme: hub from identity, then H conditionally independent
// copies from the hub. Deterministic given (seed, S, H) for any thread count.
StarDraw run_star_scheme(std::size_t n, std::size_t m, const std::vector<double>& rvalues,
                         const ChainConfig& config, double lambda_hat);

// Indices occupying the second-sample positions, sorted: the "split" that
// identifies the statistic-relevant part of a permutation.
std::vector<std::uint32_t> second_block_split(const Permutation& sigma, std::size_t n);

// Exact weighted-permutation law collapsed to splits: probability of a split
// is proportional to the product of r over the indices in the second block.
// Guarded at n+m <= 12.
std::map<std::vector<std::uint32_t>, double> exact_permutation_distribution(
    std::size_t n, std::size_t m, const std::vector<double>& rvalues);

} // namespace drpt
