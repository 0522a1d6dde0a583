#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "drpt/rng.hpp"
#include "drpt/sample.hpp"

namespace drpt {

// Sufficient statistic of a categorical pooled sample: per-category pooled
// counts tot_j and second-sample counts w_j = N_{Y,j}.
struct CountTable {
    std::vector<std::int64_t> tots;
    std::vector<std::int64_t> w;
    std::size_t n = 0;
    std::size_t m = 0;

    void validate() const;
    std::string to_json() const;
    static CountTable from_json(const std::string& text);
};

CountTable tabulate(const PooledSample& sample);

// A categorical pooled sample whose tabulation reproduces the table
// (category-sorted within each block).
PooledSample reconstruct_sample(const CountTable& table);

// Fisher's multivariate noncentral hypergeometric law of w given the pooled
// counts: P(w) proportional to prod_j r_j^{w_j} C(tot_j, w_j) over the
// feasible lattice. All weights are handled in log space; r is normalized so
// min_j r_j = 1, which leaves the law unchanged.
class FisherNcmh {
public:
    // enumeration_guard caps the lattice size for which the joint pmf is
    // materialized; larger lattices are sampled by sequential conditionals.
    FisherNcmh(std::vector<std::int64_t> tots, std::vector<double> r, std::size_t n,
               std::size_t m, double enumeration_guard = 1e6);

    // Number of feasible w vectors.
    double lattice_size() const noexcept { return lattice_size_; }

    // Full pmf; requires the lattice to be enumerable (guarded at 1e6 states).
    std::vector<std::pair<std::vector<std::int64_t>, double>> pmf() const;

    double log_weight(const std::vector<std::int64_t>& w) const;

    // One exact draw. Enumerable lattices invert the joint CDF; larger ones
    // sample category by category, each conditional being a univariate
    // noncentral hypergeometric inverted over its 1-D support.
    std::vector<std::int64_t> sample(RngStream& rng) const;

    std::vector<CountTable> sample_tables(std::size_t count, RngStream rng,
                                          unsigned threads = 1) const;

private:
    void build_enumeration();

    std::vector<std::int64_t> tots_;
    std::vector<double> log_r_;
    std::size_t n_ = 0;
    std::size_t m_ = 0;
    double lattice_size_ = 0.0;

    // Feasible per-category bounds and their suffix sums.
    std::vector<std::int64_t> lo_, hi_, suffix_lo_, suffix_hi_;

    // suffix_weight_[j][s]: log total weight of assigning s units to
    // categories j..J; built for j >= 1 only (category 0 is conditioned on).
    std::vector<std::vector<double>> suffix_weight_;

    bool enumerated_ = false;
    std::vector<std::vector<std::int64_t>> lattice_;
    std::vector<double> cumulative_;
};

// Limiting fraction of ones among the permuted second sample for binary data
// (closed form; tau is the limit of n/m). Inputs with r < 1 are reduced by
// relabelling the samples and inverting r.
double gamma1(double f1, double g1, double r, double tau);

} // namespace drpt
