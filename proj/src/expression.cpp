#include "drpt/expression.hpp"

#include <cctype>
#include <cmath>
#include <utility>
#include <vector>

#include "drpt/error.hpp"

namespace drpt {

struct Expression::Node {
    enum class Op { Constant, Coordinate, Add, Sub, Mul, Div, Pow, Neg, Exp, Log, Abs };

    Op op;
    double value = 0.0;     // Constant
    std::size_t coord = 0;  // Coordinate (0-based)
    std::shared_ptr<const Node> lhs;
    std::shared_ptr<const Node> rhs;

    double eval(std::span<const double> coords) const {
        switch (op) {
            case Op::Constant: return value;
            case Op::Coordinate:
                require(coord < coords.size(), ErrorCode::DomainMismatch,
                        "expression references coordinate x" + std::to_string(coord + 1) +
                            " but data has dimension " + std::to_string(coords.size()));
                return coords[coord];
            case Op::Add: return lhs->eval(coords) + rhs->eval(coords);
            case Op::Sub: return lhs->eval(coords) - rhs->eval(coords);
            case Op::Mul: return lhs->eval(coords) * rhs->eval(coords);
            case Op::Div: return lhs->eval(coords) / rhs->eval(coords);
            case Op::Pow: return std::pow(lhs->eval(coords), rhs->eval(coords));
            case Op::Neg: return -lhs->eval(coords);
            case Op::Exp: return std::exp(lhs->eval(coords));
            case Op::Log: return std::log(lhs->eval(coords));
            case Op::Abs: return std::fabs(lhs->eval(coords));
        }
        return 0.0;
    }
};

namespace {

using Node = Expression::Node;
using NodePtr = std::shared_ptr<const Node>;

NodePtr make_leaf(double v) {
    auto n = std::make_shared<Node>();
    n->op = Node::Op::Constant;
    n->value = v;
    return n;
}

NodePtr make_coord(std::size_t idx) {
    auto n = std::make_shared<Node>();
    n->op = Node::Op::Coordinate;
    n->coord = idx;
    return n;
}

NodePtr make_unary(Node::Op op, NodePtr a) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->lhs = std::move(a);
    return n;
}

NodePtr make_binary(Node::Op op, NodePtr a, NodePtr b) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->lhs = std::move(a);
    n->rhs = std::move(b);
    return n;
}

class Parser {
public:
    Parser(const std::string& text, const std::map<std::string, double>& constants)
        : text_(text), constants_(constants) {}

    NodePtr run(std::size_t& max_coord) {
        NodePtr root = parse_sum();
        skip_ws();
        require(pos_ == text_.size(), ErrorCode::ParseError,
                "unexpected trailing input in expression at position " + std::to_string(pos_));
        max_coord = max_coord_;
        return root;
    }

private:
    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    NodePtr parse_sum() {
        NodePtr acc = parse_product();
        for (;;) {
            if (accept('+')) {
                acc = make_binary(Node::Op::Add, acc, parse_product());
            } else if (accept('-')) {
                acc = make_binary(Node::Op::Sub, acc, parse_product());
            } else {
                return acc;
            }
        }
    }

    NodePtr parse_product() {
        NodePtr acc = parse_unary();
        for (;;) {
            if (accept('*')) {
                acc = make_binary(Node::Op::Mul, acc, parse_unary());
            } else if (accept('/')) {
                acc = make_binary(Node::Op::Div, acc, parse_unary());
            } else {
                return acc;
            }
        }
    }

    NodePtr parse_unary() {
        if (accept('-')) return make_unary(Node::Op::Neg, parse_unary());
        if (accept('+')) return parse_unary();
        return parse_power();
    }

    NodePtr parse_power() {
        NodePtr base = parse_atom();
        if (accept('^')) {
            // right-associative
            return make_binary(Node::Op::Pow, base, parse_unary());
        }
        return base;
    }

    NodePtr parse_atom() {
        skip_ws();
        require(pos_ < text_.size(), ErrorCode::ParseError, "unexpected end of expression");
        const char c = text_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_name();
        if (accept('(')) {
            NodePtr inner = parse_sum();
            require(accept(')'), ErrorCode::ParseError, "missing closing parenthesis");
            return inner;
        }
        fail(ErrorCode::ParseError,
             std::string("unexpected character '") + c + "' in expression");
    }

    NodePtr parse_number() {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(text_.substr(pos_), &used);
        } catch (const std::exception&) {
            fail(ErrorCode::ParseError, "malformed number in expression");
        }
        pos_ += used;
        return make_leaf(v);
    }

    NodePtr parse_name() {
        std::size_t end = pos_;
        while (end < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[end])) || text_[end] == '_')) {
            ++end;
        }
        const std::string name = text_.substr(pos_, end - pos_);
        pos_ = end;

        if (name == "exp" || name == "log" || name == "abs") {
            require(accept('('), ErrorCode::ParseError, name + " requires parentheses");
            NodePtr arg = parse_sum();
            require(accept(')'), ErrorCode::ParseError, "missing closing parenthesis");
            const Node::Op op = name == "exp"   ? Node::Op::Exp
                                : name == "log" ? Node::Op::Log
                                                : Node::Op::Abs;
            return make_unary(op, arg);
        }

        if (name == "x" || name == "y" || name == "z") {
            const std::size_t idx = name == "x" ? 0 : name == "y" ? 1 : 2;
            max_coord_ = std::max(max_coord_, idx + 1);
            return make_coord(idx);
        }
        if (name.size() >= 2 && name[0] == 'x') {
            bool digits = true;
            for (std::size_t i = 1; i < name.size(); ++i) {
                if (!std::isdigit(static_cast<unsigned char>(name[i]))) digits = false;
            }
            if (digits) {
                const int idx = std::stoi(name.substr(1));
                require(idx >= 1, ErrorCode::ParseError, "coordinates are numbered from x1");
                max_coord_ = std::max(max_coord_, static_cast<std::size_t>(idx));
                return make_coord(static_cast<std::size_t>(idx - 1));
            }
        }
        if (name == "pi") return make_leaf(3.14159265358979323846);
        if (name == "e") return make_leaf(2.71828182845904523536);
        const auto it = constants_.find(name);
        require(it != constants_.end(), ErrorCode::ParseError,
                "unknown identifier '" + name + "' in expression");
        return make_leaf(it->second);
    }

    const std::string& text_;
    const std::map<std::string, double>& constants_;
    std::size_t pos_ = 0;
    std::size_t max_coord_ = 0;
};

} // namespace

Expression Expression::parse(const std::string& text,
                             const std::map<std::string, double>& constants) {
    Expression e;
    Parser parser(text, constants);
    e.root_ = parser.run(e.max_coord_);
    e.text_ = text;
    return e;
}

double Expression::eval(std::span<const double> coords) const {
    require(static_cast<bool>(root_), ErrorCode::Internal, "empty expression");
    return root_->eval(coords);
}

Expression::Expression(const Expression&) = default;
Expression::Expression(Expression&&) noexcept = default;
Expression& Expression::operator=(Expression other) {
    root_ = std::move(other.root_);
    max_coord_ = other.max_coord_;
    text_ = std::move(other.text_);
    return *this;
}
Expression::~Expression() = default;

} // namespace drpt
