#include "drpt/ratio.hpp"

#include <cmath>

namespace drpt {

namespace {

double checked_positive(double v, const std::string& where) {
    require(std::isfinite(v) && v > 0.0, ErrorCode::NonPositiveRatio,
            "ratio is not finite and positive " + where + " (value " + std::to_string(v) + ")");
    return v;
}

} // namespace

RatioFunction RatioFunction::table(std::vector<double> per_category) {
    require(!per_category.empty(), ErrorCode::InvalidArgument, "empty ratio table");
    for (std::size_t j = 0; j < per_category.size(); ++j) {
        checked_positive(per_category[j], "in table entry " + std::to_string(j));
    }
    RatioFunction r;
    r.kind_ = Kind::Table;
    r.values_ = std::move(per_category);
    return r;
}

RatioFunction RatioFunction::precomputed(std::vector<double> per_point) {
    require(!per_point.empty(), ErrorCode::InvalidArgument, "empty precomputed ratio");
    for (std::size_t i = 0; i < per_point.size(); ++i) {
        checked_positive(per_point[i], "at precomputed index " + std::to_string(i));
    }
    RatioFunction r;
    r.kind_ = Kind::Precomputed;
    r.values_ = std::move(per_point);
    return r;
}

RatioFunction RatioFunction::expression(const std::string& text,
                                        const std::map<std::string, double>& constants) {
    return expression(Expression::parse(text, constants));
}

RatioFunction RatioFunction::expression(Expression expr) {
    RatioFunction r;
    r.kind_ = Kind::ExpressionKind;
    r.expr_text_ = expr.text();
    r.expr_.push_back(std::move(expr));
    return r;
}

double RatioFunction::eval_category(int code) const {
    require(kind_ == Kind::Table, ErrorCode::DomainMismatch,
            "eval_category requires the table variant");
    require(code >= 0 && static_cast<std::size_t>(code) < values_.size(),
            ErrorCode::DomainMismatch,
            "category " + std::to_string(code) + " is not in the ratio table");
    return values_[static_cast<std::size_t>(code)];
}

double RatioFunction::eval(const PooledSample& sample, std::size_t index) const {
    require(index < sample.size(), ErrorCode::InvalidArgument, "point index out of range");
    switch (kind_) {
        case Kind::Table:
            require(sample.is_categorical(), ErrorCode::DomainMismatch,
                    "table ratio requires categorical data");
            return eval_category(sample.category(index));
        case Kind::Precomputed:
            require(values_.size() == sample.size(), ErrorCode::DomainMismatch,
                    "precomputed ratio length does not match the sample");
            return checked_positive(values_[index],
                                    "at precomputed index " + std::to_string(index));
        case Kind::ExpressionKind: {
            // categorical codes are exposed to expressions as x1
            double v;
            if (sample.is_categorical()) {
                const double code = static_cast<double>(sample.category(index));
                v = expr_.front().eval(std::span<const double>(&code, 1));
            } else {
                v = expr_.front().eval(sample.point(index));
            }
            return checked_positive(v, "at point index " + std::to_string(index));
        }
    }
    fail(ErrorCode::Internal, "unreachable ratio kind");
}

std::vector<double> RatioFunction::values_for(const PooledSample& sample) const {
    std::vector<double> out(sample.size());
    for (std::size_t i = 0; i < sample.size(); ++i) out[i] = eval(sample, i);
    return out;
}

RatioFunction swapped_reciprocal(const RatioFunction& r, const PooledSample& sample) {
    switch (r.kind()) {
        case RatioFunction::Kind::Table: {
            std::vector<double> inv = r.table_values();
            for (double& v : inv) v = 1.0 / v;
            return RatioFunction::table(std::move(inv));
        }
        case RatioFunction::Kind::ExpressionKind:
            return RatioFunction::expression("1/(" + r.expression_text() + ")");
        case RatioFunction::Kind::Precomputed: {
            // Values must follow the points into their swapped positions.
            const std::vector<double> orig = r.values_for(sample);
            std::vector<double> inv;
            inv.reserve(orig.size());
            for (std::size_t j = sample.n(); j < sample.size(); ++j) inv.push_back(1.0 / orig[j]);
            for (std::size_t i = 0; i < sample.n(); ++i) inv.push_back(1.0 / orig[i]);
            return RatioFunction::precomputed(std::move(inv));
        }
    }
    fail(ErrorCode::Internal, "unreachable ratio kind");
}

} // namespace drpt
