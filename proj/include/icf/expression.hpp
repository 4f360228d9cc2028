#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "icf/errors.hpp"

// Small arithmetic expression language used to define scalar functions in
// config files:
//
//   expr   := term (('+' | '-') term)*
//   term   := unary (('*' | '/') unary)*
//   unary  := '-' unary | power
//   power  := atom ('^' ['-'] integer)*
//   atom   := number | variable | fn '(' expr ')' | '(' expr ')'
//   fn     := exp | log | sin | cos | sqrt
//
// Exactly one free variable per expression. Exponents are restricted to
// integer literals so symbolic derivatives stay closed under the grammar.
// Same-precedence binaries associate to the left.

namespace icf::expr {

enum class UnaryOp { Neg, Exp, Log, Sin, Cos, Sqrt };
enum class BinaryOp { Add, Sub, Mul, Div };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
    enum class Kind { Constant, Variable, Unary, Binary, Power };
    Kind kind = Kind::Constant;
    double constant = 0.0;
    UnaryOp uop = UnaryOp::Neg;
    BinaryOp bop = BinaryOp::Add;
    int exponent = 0;
    NodePtr lhs;
    NodePtr rhs;
};

inline std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// -- node construction with constant folding ---------------------------------

inline NodePtr make_constant(double v) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Constant;
    n->constant = v;
    return n;
}

inline NodePtr make_variable() {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Variable;
    return n;
}

inline bool is_constant(const NodePtr& n) {
    return n->kind == Node::Kind::Constant;
}

inline bool is_constant(const NodePtr& n, double v) {
    return is_constant(n) && n->constant == v;
}

inline std::optional<double> fold_unary(UnaryOp op, double v) {
    switch (op) {
    case UnaryOp::Neg: return -v;
    case UnaryOp::Exp: {
        const double r = std::exp(v);
        if (!std::isfinite(r)) return std::nullopt;
        return r;
    }
    case UnaryOp::Log:
        if (v <= 0.0) return std::nullopt;
        return std::log(v);
    case UnaryOp::Sin: return std::sin(v);
    case UnaryOp::Cos: return std::cos(v);
    case UnaryOp::Sqrt:
        if (v < 0.0) return std::nullopt;
        return std::sqrt(v);
    }
    return std::nullopt;
}

inline NodePtr make_unary(UnaryOp op, NodePtr child) {
    if (is_constant(child))
        if (auto v = fold_unary(op, child->constant)) return make_constant(*v);
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Unary;
    n->uop = op;
    n->lhs = std::move(child);
    return n;
}

// Folds constant operands and drops additive/multiplicative identities; the
// latter keeps repeated differentiation from ballooning the tree. Folding is
// skipped where it would hide a runtime domain error (division by zero).
inline NodePtr make_binary(BinaryOp op, NodePtr l, NodePtr r) {
    if (is_constant(l) && is_constant(r)) {
        const double a = l->constant, b = r->constant;
        switch (op) {
        case BinaryOp::Add: return make_constant(a + b);
        case BinaryOp::Sub: return make_constant(a - b);
        case BinaryOp::Mul: {
            const double v = a * b;
            if (std::isfinite(v)) return make_constant(v);
            break;
        }
        case BinaryOp::Div:
            if (b != 0.0 && std::isfinite(a / b)) return make_constant(a / b);
            break;
        }
    }
    switch (op) {
    case BinaryOp::Add:
        if (is_constant(l, 0.0)) return r;
        if (is_constant(r, 0.0)) return l;
        break;
    case BinaryOp::Sub:
        if (is_constant(r, 0.0)) return l;
        if (is_constant(l, 0.0)) return make_unary(UnaryOp::Neg, std::move(r));
        break;
    case BinaryOp::Mul:
        if (is_constant(l, 0.0) || is_constant(r, 0.0)) return make_constant(0.0);
        if (is_constant(l, 1.0)) return r;
        if (is_constant(r, 1.0)) return l;
        break;
    case BinaryOp::Div:
        if (is_constant(l, 0.0)) return make_constant(0.0);
        if (is_constant(r, 1.0)) return l;
        break;
    }
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Binary;
    n->bop = op;
    n->lhs = std::move(l);
    n->rhs = std::move(r);
    return n;
}

inline NodePtr make_power(NodePtr base, int exponent) {
    if (exponent == 0) return make_constant(1.0);
    if (exponent == 1) return base;
    if (is_constant(base)) {
        const double v = std::pow(base->constant, exponent);
        if (std::isfinite(v)) return make_constant(v);
    }
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Power;
    n->exponent = exponent;
    n->lhs = std::move(base);
    return n;
}

// -- rendering ----------------------------------------------------------------

namespace detail {

// Precedence levels: + - (1), * / (2), unary - (3), ^ (4), atoms (5).
// Negative constants render with a leading '-', so they bind like a negation.
inline int precedence(const Node& n) {
    switch (n.kind) {
    case Node::Kind::Constant: return n.constant < 0.0 ? 3 : 5;
    case Node::Kind::Variable: return 5;
    case Node::Kind::Unary: return n.uop == UnaryOp::Neg ? 3 : 5;
    case Node::Kind::Binary:
        return (n.bop == BinaryOp::Add || n.bop == BinaryOp::Sub) ? 1 : 2;
    case Node::Kind::Power: return 4;
    }
    return 5;
}

inline void render(const Node& n, const std::string& var, std::string& out,
                   int min_prec) {
    const bool parens = precedence(n) < min_prec;
    if (parens) out += '(';
    switch (n.kind) {
    case Node::Kind::Constant:
        out += format_number(n.constant);
        break;
    case Node::Kind::Variable:
        out += var;
        break;
    case Node::Kind::Unary:
        switch (n.uop) {
        case UnaryOp::Neg:
            out += '-';
            render(*n.lhs, var, out, 3);
            break;
        case UnaryOp::Exp: out += "exp("; render(*n.lhs, var, out, 0); out += ')'; break;
        case UnaryOp::Log: out += "log("; render(*n.lhs, var, out, 0); out += ')'; break;
        case UnaryOp::Sin: out += "sin("; render(*n.lhs, var, out, 0); out += ')'; break;
        case UnaryOp::Cos: out += "cos("; render(*n.lhs, var, out, 0); out += ')'; break;
        case UnaryOp::Sqrt: out += "sqrt("; render(*n.lhs, var, out, 0); out += ')'; break;
        }
        break;
    case Node::Kind::Binary: {
        const int own = precedence(n);
        render(*n.lhs, var, out, own);
        switch (n.bop) {
        case BinaryOp::Add: out += '+'; break;
        case BinaryOp::Sub: out += '-'; break;
        case BinaryOp::Mul: out += '*'; break;
        case BinaryOp::Div: out += '/'; break;
        }
        render(*n.rhs, var, out, own + 1);
        break;
    }
    case Node::Kind::Power:
        render(*n.lhs, var, out, 5);
        out += '^';
        out += std::to_string(n.exponent);
        break;
    }
    if (parens) out += ')';
}

inline std::string render_node(const Node& n, const std::string& var) {
    std::string out;
    render(n, var, out, 0);
    return out;
}

inline double eval_node(const Node& n, const std::string& var, double x) {
    switch (n.kind) {
    case Node::Kind::Constant: return n.constant;
    case Node::Kind::Variable: return x;
    case Node::Kind::Unary: {
        const double v = eval_node(*n.lhs, var, x);
        switch (n.uop) {
        case UnaryOp::Neg: return -v;
        case UnaryOp::Exp: {
            const double r = std::exp(v);
            if (!std::isfinite(r))
                throw EvalError("overflow in " + render_node(n, var));
            return r;
        }
        case UnaryOp::Log:
            if (v <= 0.0)
                throw EvalError("log of non-positive argument in " +
                                render_node(n, var));
            return std::log(v);
        case UnaryOp::Sin: return std::sin(v);
        case UnaryOp::Cos: return std::cos(v);
        case UnaryOp::Sqrt:
            if (v < 0.0)
                throw EvalError("sqrt of negative argument in " +
                                render_node(n, var));
            return std::sqrt(v);
        }
        break;
    }
    case Node::Kind::Binary: {
        const double l = eval_node(*n.lhs, var, x);
        const double r = eval_node(*n.rhs, var, x);
        switch (n.bop) {
        case BinaryOp::Add: return l + r;
        case BinaryOp::Sub: return l - r;
        case BinaryOp::Mul: {
            const double v = l * r;
            if (!std::isfinite(v))
                throw EvalError("overflow in " + render_node(n, var));
            return v;
        }
        case BinaryOp::Div:
            if (r == 0.0)
                throw EvalError("division by zero in " + render_node(n, var));
            return l / r;
        }
        break;
    }
    case Node::Kind::Power: {
        const double b = eval_node(*n.lhs, var, x);
        const double r = std::pow(b, n.exponent);
        if (!std::isfinite(r))
            throw EvalError("non-finite power in " + render_node(n, var));
        return r;
    }
    }
    throw EvalError("malformed expression node");
}

inline NodePtr derive_node(const NodePtr& n) {
    switch (n->kind) {
    case Node::Kind::Constant: return make_constant(0.0);
    case Node::Kind::Variable: return make_constant(1.0);
    case Node::Kind::Unary: {
        const NodePtr& u = n->lhs;
        NodePtr du = derive_node(u);
        switch (n->uop) {
        case UnaryOp::Neg: return make_unary(UnaryOp::Neg, std::move(du));
        case UnaryOp::Exp:
            return make_binary(BinaryOp::Mul, make_unary(UnaryOp::Exp, u),
                               std::move(du));
        case UnaryOp::Log: return make_binary(BinaryOp::Div, std::move(du), u);
        case UnaryOp::Sin:
            return make_binary(BinaryOp::Mul, make_unary(UnaryOp::Cos, u),
                               std::move(du));
        case UnaryOp::Cos:
            return make_unary(
                UnaryOp::Neg,
                make_binary(BinaryOp::Mul, make_unary(UnaryOp::Sin, u),
                            std::move(du)));
        case UnaryOp::Sqrt:
            return make_binary(
                BinaryOp::Div, std::move(du),
                make_binary(BinaryOp::Mul, make_constant(2.0),
                            make_unary(UnaryOp::Sqrt, u)));
        }
        break;
    }
    case Node::Kind::Binary: {
        NodePtr dl = derive_node(n->lhs);
        NodePtr dr = derive_node(n->rhs);
        switch (n->bop) {
        case BinaryOp::Add:
            return make_binary(BinaryOp::Add, std::move(dl), std::move(dr));
        case BinaryOp::Sub:
            return make_binary(BinaryOp::Sub, std::move(dl), std::move(dr));
        case BinaryOp::Mul:
            return make_binary(
                BinaryOp::Add, make_binary(BinaryOp::Mul, std::move(dl), n->rhs),
                make_binary(BinaryOp::Mul, n->lhs, std::move(dr)));
        case BinaryOp::Div:
            return make_binary(
                BinaryOp::Div,
                make_binary(
                    BinaryOp::Sub,
                    make_binary(BinaryOp::Mul, std::move(dl), n->rhs),
                    make_binary(BinaryOp::Mul, n->lhs, std::move(dr))),
                make_power(n->rhs, 2));
        }
        break;
    }
    case Node::Kind::Power:
        return make_binary(
            BinaryOp::Mul,
            make_binary(BinaryOp::Mul, make_constant(n->exponent),
                        make_power(n->lhs, n->exponent - 1)),
            derive_node(n->lhs));
    }
    throw ValidationError("malformed expression node");
}

}  // namespace detail

// -- public AST handle --------------------------------------------------------

class Ast {
public:
    Ast() = default;
    Ast(NodePtr root, std::string variable)
        : root_(std::move(root)), var_(std::move(variable)) {}

    double eval(double x) const {
        require_root();
        return detail::eval_node(*root_, var_, x);
    }

    /// Exact symbolic derivative with respect to the free variable. May be
    /// applied repeatedly for higher orders.
    Ast derivative() const {
        require_root();
        return Ast(detail::derive_node(root_), var_);
    }

    std::string text() const {
        require_root();
        return detail::render_node(*root_, var_);
    }

    const std::string& variable() const noexcept { return var_; }
    const NodePtr& root() const noexcept { return root_; }

private:
    void require_root() const {
        if (!root_) throw ValidationError("empty expression");
    }

    NodePtr root_;
    std::string var_;
};

// -- parser -------------------------------------------------------------------

namespace detail {

class Parser {
public:
    Parser(std::string_view text, std::string_view var)
        : text_(text), var_(var) {}

    NodePtr run() {
        NodePtr root = parse_sum();
        skip_ws();
        if (pos_ != text_.size()) fail("trailing characters");
        return root;
    }

private:
    std::string_view text_;
    std::string var_;
    std::size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < text_.size() &&
               (text_[pos_] == ' ' || text_[pos_] == '\t'))
            ++pos_;
    }

    bool at_end() const { return pos_ >= text_.size(); }
    char peek() const { return text_[pos_]; }

    bool consume(char c) {
        if (!at_end() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw ParseError(what + " at position " + std::to_string(pos_), pos_);
    }

    NodePtr parse_sum() {
        NodePtr node = parse_product();
        for (;;) {
            skip_ws();
            if (consume('+'))
                node = make_binary(BinaryOp::Add, node, parse_product());
            else if (consume('-'))
                node = make_binary(BinaryOp::Sub, node, parse_product());
            else
                return node;
        }
    }

    NodePtr parse_product() {
        NodePtr node = parse_unary();
        for (;;) {
            skip_ws();
            if (consume('*'))
                node = make_binary(BinaryOp::Mul, node, parse_unary());
            else if (consume('/'))
                node = make_binary(BinaryOp::Div, node, parse_unary());
            else
                return node;
        }
    }

    NodePtr parse_unary() {
        skip_ws();
        if (consume('-')) return make_unary(UnaryOp::Neg, parse_unary());
        return parse_power();
    }

    NodePtr parse_power() {
        NodePtr node = parse_atom();
        for (;;) {
            skip_ws();
            if (!consume('^')) return node;
            skip_ws();
            const bool negative = consume('-');
            skip_ws();
            if (at_end() || peek() < '0' || peek() > '9')
                fail("expected integer exponent");
            int value = 0;
            const char* begin = text_.data() + pos_;
            const char* end = text_.data() + text_.size();
            auto [ptr, ec] = std::from_chars(begin, end, value);
            if (ec != std::errc()) fail("invalid integer exponent");
            pos_ = static_cast<std::size_t>(ptr - text_.data());
            node = make_power(node, negative ? -value : value);
        }
    }

    NodePtr parse_atom() {
        skip_ws();
        if (at_end()) fail("unexpected end of expression");
        const char c = peek();
        if ((c >= '0' && c <= '9') || c == '.') return parse_number();
        if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_')
            return parse_identifier();
        if (consume('(')) {
            NodePtr inner = parse_sum();
            skip_ws();
            if (!consume(')')) fail("missing closing parenthesis");
            return inner;
        }
        fail(std::string("unexpected character '") + c + "'");
    }

    NodePtr parse_number() {
        const std::size_t start = pos_;
        while (!at_end() && ((peek() >= '0' && peek() <= '9') || peek() == '.'))
            ++pos_;
        if (!at_end() && (peek() == 'e' || peek() == 'E')) {
            const std::size_t mark = pos_;
            ++pos_;
            if (!at_end() && (peek() == '+' || peek() == '-')) ++pos_;
            if (at_end() || peek() < '0' || peek() > '9')
                pos_ = mark;  // the 'e' belongs to something else
            else
                while (!at_end() && peek() >= '0' && peek() <= '9') ++pos_;
        }
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(text_.data() + start,
                                         text_.data() + pos_, value);
        if (ec != std::errc() || ptr != text_.data() + pos_) {
            pos_ = start;
            fail("invalid number literal");
        }
        return make_constant(value);
    }

    NodePtr parse_identifier() {
        const std::size_t start = pos_;
        while (!at_end() &&
               ((peek() >= 'a' && peek() <= 'z') ||
                (peek() >= 'A' && peek() <= 'Z') ||
                (peek() >= '0' && peek() <= '9') || peek() == '_'))
            ++pos_;
        const std::string id(text_.substr(start, pos_ - start));
        if (id == var_) return make_variable();
        UnaryOp op;
        if (id == "exp") op = UnaryOp::Exp;
        else if (id == "log") op = UnaryOp::Log;
        else if (id == "sin") op = UnaryOp::Sin;
        else if (id == "cos") op = UnaryOp::Cos;
        else if (id == "sqrt") op = UnaryOp::Sqrt;
        else {
            pos_ = start;
            fail("unknown identifier '" + id + "'");
        }
        skip_ws();
        if (!consume('(')) fail("expected '(' after function name");
        NodePtr arg = parse_sum();
        skip_ws();
        if (!consume(')')) fail("missing closing parenthesis");
        return make_unary(op, std::move(arg));
    }
};

}  // namespace detail

inline Ast parse(std::string_view text, std::string_view var_name) {
    if (text.empty()) throw ParseError("empty expression", 0);
    detail::Parser parser(text, var_name);
    return Ast(parser.run(), std::string(var_name));
}

inline double eval_at(const Ast& ast, double x) { return ast.eval(x); }
inline Ast derive(const Ast& ast) { return ast.derivative(); }
inline std::string unparse(const Ast& ast) { return ast.text(); }

}  // namespace icf::expr
