#include "pss/expression.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <numbers>
#include <sstream>

namespace pss {

namespace {

using NodePtr = std::shared_ptr<const Node>;

NodePtr make(Op op, NodePtr a = nullptr, NodePtr b = nullptr) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

struct FunctionName {
    std::string_view name;
    Op op;
};
constexpr FunctionName kFunctions[] = {
    {"exp", Op::Exp}, {"sin", Op::Sin},   {"cos", Op::Cos},     {"tan", Op::Tan},
    {"sqrt", Op::Sqrt}, {"atan", Op::Atan}, {"arctan", Op::Atan},
};

class Parser {
  public:
    Parser(std::string_view src, const std::vector<std::string>& vars) : src_(src), vars_(vars) {}

    NodePtr parse() {
        NodePtr e = expr();
        skip();
        if (pos_ != src_.size()) syntax("unexpected character '" + std::string(1, src_[pos_]) + "'");
        return e;
    }

  private:
    std::string_view src_;
    const std::vector<std::string>& vars_;
    std::size_t pos_ = 0;

    [[noreturn]] void syntax(const std::string& msg, std::size_t at) {
        throw ParseError(ParseError::Kind::Syntax, at, msg);
    }
    [[noreturn]] void syntax(const std::string& msg) { syntax(msg, pos_); }

    void skip() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }
    bool accept(char c) {
        skip();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr expr() {
        NodePtr lhs = term();
        for (;;) {
            if (accept('+')) lhs = make(Op::Add, lhs, term());
            else if (accept('-')) lhs = make(Op::Sub, lhs, term());
            else return lhs;
        }
    }
    NodePtr term() {
        NodePtr lhs = unary();
        for (;;) {
            if (accept('*')) lhs = make(Op::Mul, lhs, unary());
            else if (accept('/')) lhs = make(Op::Div, lhs, unary());
            else return lhs;
        }
    }
    // unary minus binds looser than ^ so that -z0^2 = -(z0^2)
    NodePtr unary() {
        if (accept('-')) return make(Op::Neg, unary());
        if (accept('+')) return unary();
        return power();
    }
    NodePtr power() {
        NodePtr base = primary();
        skip();
        if (!accept('^')) return base;
        skip();
        std::size_t at = pos_;
        int sign = 1;
        bool paren = accept('(');
        if (accept('-')) sign = -1;
        else accept('+');
        skip();
        std::size_t start = pos_;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        if (start == pos_) syntax("exponent must be an integer constant", at);
        if (pos_ < src_.size() && (src_[pos_] == '.' || src_[pos_] == 'e' || src_[pos_] == 'E'))
            syntax("exponent must be an integer constant", at);
        int value = 0;
        std::from_chars(src_.data() + start, src_.data() + pos_, value);
        if (paren && !accept(')')) syntax("expected ')'");
        auto n = std::make_shared<Node>();
        n->op = Op::Pow;
        n->index = sign * value;
        n->a = base;
        return n;
    }
    NodePtr number() {
        std::size_t start = pos_;
        while (pos_ < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.')) ++pos_;
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t save = pos_++;
            if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
            if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
            } else {
                pos_ = save;
            }
        }
        std::string text(src_.substr(start, pos_ - start));
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(text, &used);
        } catch (const std::exception&) {
            syntax("malformed number", start);
        }
        if (used != text.size()) syntax("malformed number", start);
        auto n = std::make_shared<Node>();
        n->op = Op::Const;
        n->value = v;
        return n;
    }
    NodePtr primary() {
        skip();
        if (pos_ >= src_.size()) syntax("unexpected end of input");
        char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr e = expr();
            if (!accept(')')) syntax("expected ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::islower(static_cast<unsigned char>(c))) {
            std::size_t start = pos_;
            while (pos_ < src_.size() &&
                   (std::islower(static_cast<unsigned char>(src_[pos_])) || std::isdigit(static_cast<unsigned char>(src_[pos_]))))
                ++pos_;
            std::string_view name = src_.substr(start, pos_ - start);
            for (const auto& f : kFunctions) {
                if (f.name == name) return call(f.op, start);
            }
            auto it = std::find(vars_.begin(), vars_.end(), name);
            if (it != vars_.end()) {
                auto n = std::make_shared<Node>();
                n->op = Op::Var;
                n->index = static_cast<int>(it - vars_.begin());
                return n;
            }
            if (name == "pi") {
                auto n = std::make_shared<Node>();
                n->value = std::numbers::pi;
                return n;
            }
            throw ParseError(ParseError::Kind::UnknownIdentifier, start, "unknown identifier '" + std::string(name) + "'");
        }
        syntax("unexpected character '" + std::string(1, c) + "'");
    }
    NodePtr call(Op op, std::size_t at) {
        if (!accept('(')) throw ParseError(ParseError::Kind::Arity, at, "function expects one argument");
        skip();
        if (pos_ < src_.size() && src_[pos_] == ')')
            throw ParseError(ParseError::Kind::Arity, at, "function expects one argument");
        NodePtr arg = expr();
        if (accept(',')) throw ParseError(ParseError::Kind::Arity, at, "function expects one argument");
        if (!accept(')')) syntax("expected ')'");
        return make(op, arg);
    }
};

void collect(const Node& n, std::vector<bool>& used) {
    if (n.op == Op::Var) used[static_cast<std::size_t>(n.index)] = true;
    if (n.a) collect(*n.a, used);
    if (n.b) collect(*n.b, used);
}

const char* fname(Op op) {
    switch (op) {
        case Op::Exp: return "exp";
        case Op::Sin: return "sin";
        case Op::Cos: return "cos";
        case Op::Tan: return "tan";
        case Op::Sqrt: return "sqrt";
        case Op::Atan: return "atan";
        default: return "?";
    }
}

}  // namespace

std::string to_string(const Node& n, const std::vector<std::string>& vars) {
    auto bin = [&](const char* op) { return "(" + to_string(*n.a, vars) + " " + op + " " + to_string(*n.b, vars) + ")"; };
    switch (n.op) {
        case Op::Const: {
            std::ostringstream os;
            os.precision(17);
            os << n.value;
            return os.str();
        }
        case Op::Var: return vars[static_cast<std::size_t>(n.index)];
        case Op::Neg: return "(-" + to_string(*n.a, vars) + ")";
        case Op::Add: return bin("+");
        case Op::Sub: return bin("-");
        case Op::Mul: return bin("*");
        case Op::Div: return bin("/");
        case Op::Pow: return "(" + to_string(*n.a, vars) + "^" + std::to_string(n.index) + ")";
        default: return std::string(fname(n.op)) + "(" + to_string(*n.a, vars) + ")";
    }
}

std::vector<bool> Expression::used_variables() const {
    std::vector<bool> used(vars_.size(), false);
    if (root_) collect(*root_, used);
    return used;
}

bool Expression::uses(std::string_view name) const {
    auto it = std::find(vars_.begin(), vars_.end(), name);
    if (it == vars_.end()) return false;
    return used_variables()[static_cast<std::size_t>(it - vars_.begin())];
}

Expression parse_expression(std::string_view source, std::vector<std::string> variables) {
    Parser p(source, variables);
    NodePtr root = p.parse();
    return Expression(std::move(root), std::move(variables), std::string(source));
}

}  // namespace pss
