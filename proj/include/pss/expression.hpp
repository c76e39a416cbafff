#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pss/scalar.hpp"

namespace pss {

class ParseError : public std::runtime_error {
  public:
    enum class Kind { Syntax, UnknownIdentifier, Arity };
    ParseError(Kind kind, std::size_t offset, const std::string& msg)
        : std::runtime_error(msg + " at offset " + std::to_string(offset)), kind_(kind), offset_(offset) {}
    Kind kind() const { return kind_; }
    std::size_t offset() const { return offset_; }

  private:
    Kind kind_;
    std::size_t offset_;
};

class DomainError : public std::runtime_error {
  public:
    DomainError(const std::string& what, std::string node)
        : std::runtime_error(what + " in '" + node + "'"), node_(std::move(node)) {}
    const std::string& node() const { return node_; }

  private:
    std::string node_;
};

enum class Op : std::uint8_t { Const, Var, Neg, Add, Sub, Mul, Div, Pow, Exp, Sin, Cos, Tan, Sqrt, Atan };

struct Node {
    Op op = Op::Const;
    double value = 0.0;  // Const
    int index = 0;       // Var: slot; Pow: integer exponent
    std::shared_ptr<const Node> a, b;
};

std::string to_string(const Node& n, const std::vector<std::string>& vars);

class Expression {
  public:
    Expression() = default;
    Expression(std::shared_ptr<const Node> root, std::vector<std::string> vars, std::string source)
        : root_(std::move(root)), vars_(std::move(vars)), source_(std::move(source)) {}

    const std::vector<std::string>& variables() const { return vars_; }
    const std::string& source() const { return source_; }
    std::string to_string() const { return pss::to_string(*root_, vars_); }
    bool empty() const { return !root_; }
    const Node& root() const { return *root_; }

    // slots whose variable actually appears in the tree
    std::vector<bool> used_variables() const;
    bool uses(std::string_view name) const;

    template <class T> T eval(std::span<const T> values) const;
    template <class T> T eval(std::initializer_list<T> values) const {
        return eval<T>(std::span<const T>(values.begin(), values.size()));
    }
    double operator()(std::span<const double> values) const { return eval<double>(values); }

  private:
    std::shared_ptr<const Node> root_;
    std::vector<std::string> vars_;
    std::string source_;
};

// Grammar: + - * / ^ (integer exponent, right-assoc), unary minus, parentheses,
// numeric literals, pi, exp sin cos tan sqrt atan (arctan) of one argument.
Expression parse_expression(std::string_view source, std::vector<std::string> variables);

namespace detail {

template <class T> T eval_node(const Node& n, std::span<const T> vals, const std::vector<std::string>& vars) {
    using std::atan;
    using std::cos;
    using std::exp;
    using std::sin;
    using std::sqrt;
    using std::tan;
    auto fail = [&](const char* what) -> T { throw DomainError(what, pss::to_string(n, vars)); };
    T r{};
    switch (n.op) {
        case Op::Const: return constant<T>(n.value);
        case Op::Var: return vals[static_cast<std::size_t>(n.index)];
        case Op::Neg: r = -eval_node(*n.a, vals, vars); break;
        case Op::Add: r = eval_node(*n.a, vals, vars) + eval_node(*n.b, vals, vars); break;
        case Op::Sub: r = eval_node(*n.a, vals, vars) - eval_node(*n.b, vals, vars); break;
        case Op::Mul: r = eval_node(*n.a, vals, vars) * eval_node(*n.b, vals, vars); break;
        case Op::Div: {
            T num = eval_node(*n.a, vals, vars);
            T den = eval_node(*n.b, vals, vars);
            if (primal(den) == 0.0) return fail("division by zero");
            r = num / den;
            break;
        }
        case Op::Pow: {
            T base = eval_node(*n.a, vals, vars);
            if (n.index < 0 && primal(base) == 0.0) return fail("division by zero");
            r = powi(base, n.index);
            break;
        }
        case Op::Exp: r = exp(eval_node(*n.a, vals, vars)); break;
        case Op::Sin: r = sin(eval_node(*n.a, vals, vars)); break;
        case Op::Cos: r = cos(eval_node(*n.a, vals, vars)); break;
        case Op::Tan: {
            T arg = eval_node(*n.a, vals, vars);
            if (std::abs(std::cos(primal(arg))) < 1e-15) return fail("tan at pole");
            r = tan(arg);
            break;
        }
        case Op::Sqrt: {
            T arg = eval_node(*n.a, vals, vars);
            double p = primal(arg);
            if (p < 0.0) return fail("sqrt of negative value");
            if (p == 0.0 && is_ad_scalar<T>::value) return fail("sqrt not differentiable at 0");
            r = sqrt(arg);
            break;
        }
        case Op::Atan: r = atan(eval_node(*n.a, vals, vars)); break;
    }
    if (!std::isfinite(primal(r))) return fail("non-finite value");
    return r;
}

}  // namespace detail

template <class T> T Expression::eval(std::span<const T> values) const {
    if (values.size() < vars_.size())
        throw std::invalid_argument("expression '" + source_ + "' expects " + std::to_string(vars_.size()) +
                                    " values");
    return detail::eval_node<T>(*root_, values, vars_);
}

}  // namespace pss
