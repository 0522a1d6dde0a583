#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "drpt/error.hpp"

namespace drpt {

// Pooled two-sample dataset Z = (X_1..X_n, Y_1..Y_m). Either continuous
// (dim >= 1, row-major coordinates) or categorical (dim == 0, codes in
// {0..J}). Immutable after construction.
class PooledSample {
public:
    static PooledSample continuous(std::vector<double> coords, std::size_t dim,
                                   std::size_t n, std::size_t m);
    static PooledSample categorical(std::vector<int> codes, std::size_t n, std::size_t m);

    std::size_t n() const noexcept { return n_; }
    std::size_t m() const noexcept { return m_; }
    std::size_t size() const noexcept { return n_ + m_; }
    std::size_t dim() const noexcept { return dim_; }
    bool is_categorical() const noexcept { return dim_ == 0; }

    std::span<const double> point(std::size_t i) const {
        return {coords_.data() + i * dim_, dim_};
    }
    int category(std::size_t i) const { return codes_[i]; }

    // Largest category code + 1 (categorical samples only).
    std::size_t num_categories() const;

    const std::vector<double>& coords() const noexcept { return coords_; }
    const std::vector<int>& codes() const noexcept { return codes_; }

    // New sample with the two roles exchanged: (Y_1..Y_m, X_1..X_n).
    PooledSample swapped() const;

    // Contiguous subset of points with fresh split sizes.
    PooledSample subset(const std::vector<std::size_t>& first_idx,
                        const std::vector<std::size_t>& second_idx) const;

private:
    PooledSample() = default;

    std::size_t n_ = 0;
    std::size_t m_ = 0;
    std::size_t dim_ = 0;
    std::vector<double> coords_;
    std::vector<int> codes_;
};

struct CsvSample {
    PooledSample sample;
    std::vector<double> ratio_column; // empty when the csv has no `r` column
};

// One row per observation: columns x1..xd (or `cat`), `sample` in {1,2},
// optional `r`. Header row required. Points are reordered so the first
// sample precedes the second, preserving file order within each.
CsvSample read_sample_csv(const std::string& path);
CsvSample parse_sample_csv(const std::string& text);

} // namespace drpt
