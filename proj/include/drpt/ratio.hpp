#pragma once

#include <string>
#include <vector>

#include "drpt/expression.hpp"
#include "drpt/sample.hpp"

namespace drpt {

// Hypothesized density ratio r. Three variants: a per-category table, values
// precomputed for one specific pooled sample, or an arithmetic expression
// over the coordinates. Every evaluation must be finite and strictly
// positive; violations raise NonPositiveRatio rather than being clipped.
class RatioFunction {
public:
    enum class Kind { Table, Precomputed, ExpressionKind };

    static RatioFunction table(std::vector<double> per_category);
    static RatioFunction precomputed(std::vector<double> per_point);
    static RatioFunction expression(const std::string& text,
                                    const std::map<std::string, double>& constants = {});
    static RatioFunction expression(Expression expr);

    Kind kind() const noexcept { return kind_; }
    const std::string& expression_text() const noexcept { return expr_text_; }
    const std::vector<double>& table_values() const noexcept { return values_; }

    // r at one point of a pooled sample. Precomputed requires the index to
    // address its stored vector; the other variants evaluate the point.
    double eval(const PooledSample& sample, std::size_t index) const;

    // r evaluated at a raw category code (Table variant only).
    double eval_category(int code) const;

    // r at every point of the sample, validated finite and > 0.
    std::vector<double> values_for(const PooledSample& sample) const;

private:
    RatioFunction() = default;

    Kind kind_ = Kind::Table;
    std::vector<double> values_;
    std::vector<Expression> expr_; // 0 or 1 entries
    std::string expr_text_;
};

// Ratio 1/r for the relabelled problem, aligned to sample.swapped().
// Table/Precomputed invert the stored values; expressions wrap as 1/(...).
RatioFunction swapped_reciprocal(const RatioFunction& r, const PooledSample& sample);

} // namespace drpt
