#pragma once

#include <map>
#include <memory>
#include <span>
#include <string>

namespace drpt {

// Parsed arithmetic expression over coordinates x1..xd with +, -, *, /, ^,
// exp, log, abs, and named constants. `x`, `y`, `z` alias x1, x2, x3.
class Expression {
public:
    static Expression parse(const std::string& text,
                            const std::map<std::string, double>& constants = {});

    double eval(std::span<const double> coords) const;

    // Highest coordinate index referenced (0 when constant).
    std::size_t max_coordinate() const noexcept { return max_coord_; }

    const std::string& text() const noexcept { return text_; }

    Expression(const Expression&);
    Expression(Expression&&) noexcept;
    Expression& operator=(Expression);
    ~Expression();

    struct Node;

private:
    Expression() = default;

    std::shared_ptr<const Node> root_;
    std::size_t max_coord_ = 0;
    std::string text_;
};

} // namespace drpt
