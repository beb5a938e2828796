#pragma once

// Small arithmetic-expression language over the chart coordinates x and y.
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('+' | '-') unary | power
//   power   := primary ('^' unary)?          right associative
//   primary := number | 'x' | 'y' | 'pi' | func '(' expr ')' | '(' expr ')'
//   func    := exp | log | sin | cos | sinh | cosh | sqrt
//
// Expressions evaluate on any scalar that provides the usual arithmetic and
// the listed functions (double and Jet<N>), and differentiate symbolically.

#include <cctype>
#include <cmath>
#include <cstdio>
#include <memory>
#include <numbers>
#include <string>
#include <string_view>
#include <utility>

#include "cmc/errors.hpp"

namespace cmc {

class Expression {
public:
    enum class Op { constant, var_x, var_y, add, sub, mul, div, pow, neg, exp, log, sin, cos, sinh, cosh, sqrt };

    Expression() : Expression(constant(0.0)) {}

    static Expression parse(std::string_view text);

    static Expression constant(double c) { return Expression(std::make_shared<Node>(Op::constant, c)); }
    static Expression x() { return Expression(std::make_shared<Node>(Op::var_x, 0.0)); }
    static Expression y() { return Expression(std::make_shared<Node>(Op::var_y, 0.0)); }

    /// Symbolic partial derivative; `var` is 'x' or 'y'.
    Expression derivative(char var) const;

    template <class S>
    S evaluate(const S& x, const S& y) const {
        return eval(*node_, x, y);
    }

    bool is_constant() const { return node_->op == Op::constant; }
    double constant_value() const { return node_->value; }

    std::string to_string() const { return print(*node_); }

    friend Expression operator+(const Expression& a, const Expression& b) { return binary(Op::add, a, b); }
    friend Expression operator-(const Expression& a, const Expression& b) { return binary(Op::sub, a, b); }
    friend Expression operator*(const Expression& a, const Expression& b) { return binary(Op::mul, a, b); }
    friend Expression operator/(const Expression& a, const Expression& b) { return binary(Op::div, a, b); }
    friend Expression operator-(const Expression& a) { return unary(Op::neg, a); }
    static Expression power(const Expression& a, const Expression& b) { return binary(Op::pow, a, b); }
    static Expression apply(Op fn, const Expression& a) { return unary(fn, a); }

private:
    struct Node {
        Node(Op o, double v) : op(o), value(v) {}
        Node(Op o, std::shared_ptr<const Node> l, std::shared_ptr<const Node> r)
            : op(o), lhs(std::move(l)), rhs(std::move(r)) {}
        Op op;
        double value = 0.0;
        std::shared_ptr<const Node> lhs, rhs;
    };
    using NodePtr = std::shared_ptr<const Node>;

    explicit Expression(NodePtr n) : node_(std::move(n)) {}

    static bool is_const(const Expression& e, double v) {
        return e.node_->op == Op::constant && e.node_->value == v;
    }

    // Constant folding plus the identities 0+a, a*1, a*0, a^1.
    static Expression binary(Op op, const Expression& a, const Expression& b) {
        if (a.is_constant() && b.is_constant()) {
            const double x = a.constant_value(), y = b.constant_value();
            switch (op) {
                case Op::add: return constant(x + y);
                case Op::sub: return constant(x - y);
                case Op::mul: return constant(x * y);
                case Op::div: return constant(x / y);
                case Op::pow: return constant(std::pow(x, y));
                default: break;
            }
        }
        switch (op) {
            case Op::add:
                if (is_const(a, 0.0)) return b;
                if (is_const(b, 0.0)) return a;
                break;
            case Op::sub:
                if (is_const(b, 0.0)) return a;
                if (is_const(a, 0.0)) return -b;
                break;
            case Op::mul:
                if (is_const(a, 0.0) || is_const(b, 0.0)) return constant(0.0);
                if (is_const(a, 1.0)) return b;
                if (is_const(b, 1.0)) return a;
                break;
            case Op::div:
                if (is_const(a, 0.0)) return constant(0.0);
                if (is_const(b, 1.0)) return a;
                break;
            case Op::pow:
                if (is_const(b, 1.0)) return a;
                if (is_const(b, 0.0)) return constant(1.0);
                break;
            default: break;
        }
        return Expression(std::make_shared<Node>(op, a.node_, b.node_));
    }

    static Expression unary(Op op, const Expression& a) {
        if (a.is_constant()) {
            const double x = a.constant_value();
            switch (op) {
                case Op::neg: return constant(-x);
                case Op::exp: return constant(std::exp(x));
                case Op::log: return constant(std::log(x));
                case Op::sin: return constant(std::sin(x));
                case Op::cos: return constant(std::cos(x));
                case Op::sinh: return constant(std::sinh(x));
                case Op::cosh: return constant(std::cosh(x));
                case Op::sqrt: return constant(std::sqrt(x));
                default: break;
            }
        }
        if (op == Op::neg && a.node_->op == Op::neg) return Expression(a.node_->lhs);
        return Expression(std::make_shared<Node>(op, a.node_, nullptr));
    }

    template <class S>
    static S eval(const Node& n, const S& x, const S& y) {
        using std::cos;
        using std::cosh;
        using std::exp;
        using std::log;
        using std::pow;
        using std::sin;
        using std::sinh;
        using std::sqrt;
        switch (n.op) {
            case Op::constant: return S(n.value);
            case Op::var_x: return x;
            case Op::var_y: return y;
            case Op::add: return eval(*n.lhs, x, y) + eval(*n.rhs, x, y);
            case Op::sub: return eval(*n.lhs, x, y) - eval(*n.rhs, x, y);
            case Op::mul: return eval(*n.lhs, x, y) * eval(*n.rhs, x, y);
            case Op::div: return eval(*n.lhs, x, y) / eval(*n.rhs, x, y);
            case Op::pow: {
                const S base = eval(*n.lhs, x, y);
                if (n.rhs->op == Op::constant) {
                    const double e = n.rhs->value;
                    if (e == std::floor(e) && std::abs(e) <= 16.0) return integer_power(base, static_cast<int>(e));
                    return pow(base, e);
                }
                return exp(eval(*n.rhs, x, y) * log(base));
            }
            case Op::neg: return -eval(*n.lhs, x, y);
            case Op::exp: return exp(eval(*n.lhs, x, y));
            case Op::log: return log(eval(*n.lhs, x, y));
            case Op::sin: return sin(eval(*n.lhs, x, y));
            case Op::cos: return cos(eval(*n.lhs, x, y));
            case Op::sinh: return sinh(eval(*n.lhs, x, y));
            case Op::cosh: return cosh(eval(*n.lhs, x, y));
            case Op::sqrt: return sqrt(eval(*n.lhs, x, y));
        }
        return S(0.0);
    }

    template <class S>
    static S integer_power(const S& base, int e) {
        if (e < 0) return S(1.0) / integer_power(base, -e);
        S r(1.0);
        for (int k = 0; k < e; ++k) r = r * base;
        return r;
    }

    static Expression diff(const NodePtr& n, char var);
    static std::string print(const Node& n);

    NodePtr node_;
};

inline Expression Expression::derivative(char var) const { return diff(node_, var); }

inline Expression Expression::diff(const NodePtr& n, char var) {
    const Expression a(n->lhs ? n->lhs : n);
    const Expression self(n);
    switch (n->op) {
        case Op::constant: return constant(0.0);
        case Op::var_x: return constant(var == 'x' ? 1.0 : 0.0);
        case Op::var_y: return constant(var == 'y' ? 1.0 : 0.0);
        case Op::add: return diff(n->lhs, var) + diff(n->rhs, var);
        case Op::sub: return diff(n->lhs, var) - diff(n->rhs, var);
        case Op::mul: {
            const Expression b(n->rhs);
            return diff(n->lhs, var) * b + a * diff(n->rhs, var);
        }
        case Op::div: {
            const Expression b(n->rhs);
            return (diff(n->lhs, var) * b - a * diff(n->rhs, var)) / (b * b);
        }
        case Op::pow: {
            const Expression b(n->rhs);
            if (b.is_constant())
                return b * power(a, constant(b.constant_value() - 1.0)) * diff(n->lhs, var);
            return self * (diff(n->rhs, var) * apply(Op::log, a) + b * diff(n->lhs, var) / a);
        }
        case Op::neg: return -diff(n->lhs, var);
        case Op::exp: return self * diff(n->lhs, var);
        case Op::log: return diff(n->lhs, var) / a;
        case Op::sin: return apply(Op::cos, a) * diff(n->lhs, var);
        case Op::cos: return -(apply(Op::sin, a) * diff(n->lhs, var));
        case Op::sinh: return apply(Op::cosh, a) * diff(n->lhs, var);
        case Op::cosh: return apply(Op::sinh, a) * diff(n->lhs, var);
        case Op::sqrt: return diff(n->lhs, var) / (constant(2.0) * self);
    }
    return constant(0.0);
}

inline std::string Expression::print(const Node& n) {
    auto fn = [&](const char* name) { return std::string(name) + "(" + print(*n.lhs) + ")"; };
    auto bin = [&](const char* op) { return "(" + print(*n.lhs) + " " + op + " " + print(*n.rhs) + ")"; };
    switch (n.op) {
        case Op::constant: {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.17g", n.value);
            return buf;
        }
        case Op::var_x: return "x";
        case Op::var_y: return "y";
        case Op::add: return bin("+");
        case Op::sub: return bin("-");
        case Op::mul: return bin("*");
        case Op::div: return bin("/");
        case Op::pow: return bin("^");
        case Op::neg: return "(-" + print(*n.lhs) + ")";
        case Op::exp: return fn("exp");
        case Op::log: return fn("log");
        case Op::sin: return fn("sin");
        case Op::cos: return fn("cos");
        case Op::sinh: return fn("sinh");
        case Op::cosh: return fn("cosh");
        case Op::sqrt: return fn("sqrt");
    }
    return "?";
}

namespace detail {

class ExpressionParser {
public:
    explicit ExpressionParser(std::string_view text) : text_(text) {}

    Expression parse() {
        Expression e = expr();
        skip_space();
        if (pos_ < text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw ParseError("expression: " + what, 1, static_cast<int>(pos_) + 1);
    }

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    Expression expr() {
        Expression e = term();
        for (;;) {
            if (accept('+')) e = e + term();
            else if (accept('-')) e = e - term();
            else return e;
        }
    }

    Expression term() {
        Expression e = unary();
        for (;;) {
            if (accept('*')) e = e * unary();
            else if (accept('/')) e = e / unary();
            else return e;
        }
    }

    Expression unary() {
        if (accept('-')) return -unary();
        if (accept('+')) return unary();
        return power();
    }

    Expression power() {
        Expression base = primary();
        if (accept('^')) return Expression::power(base, unary());
        return base;
    }

    Expression primary() {
        skip_space();
        if (pos_ >= text_.size()) fail("unexpected end of expression");
        const char c = text_[pos_];
        if (accept('(')) {
            Expression e = expr();
            if (!accept(')')) fail("expected ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c))) {
            const std::size_t start = pos_;
            while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            const std::string_view word = text_.substr(start, pos_ - start);
            if (word == "x") return Expression::x();
            if (word == "y") return Expression::y();
            if (word == "pi") return Expression::constant(std::numbers::pi);
            Expression::Op fn{};
            if (word == "exp") fn = Expression::Op::exp;
            else if (word == "log") fn = Expression::Op::log;
            else if (word == "sin") fn = Expression::Op::sin;
            else if (word == "cos") fn = Expression::Op::cos;
            else if (word == "sinh") fn = Expression::Op::sinh;
            else if (word == "cosh") fn = Expression::Op::cosh;
            else if (word == "sqrt") fn = Expression::Op::sqrt;
            else {
                pos_ = start;
                fail("unknown identifier '" + std::string(word) + "'");
            }
            if (!accept('(')) fail("expected '(' after function name");
            Expression arg = expr();
            if (!accept(')')) fail("expected ')'");
            return Expression::apply(fn, arg);
        }
        fail("unexpected '" + std::string(1, c) + "'");
    }

    Expression number() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.'))
            ++pos_;
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t p = pos_ + 1;
            if (p < text_.size() && (text_[p] == '+' || text_[p] == '-')) ++p;
            if (p < text_.size() && std::isdigit(static_cast<unsigned char>(text_[p]))) {
                pos_ = p;
                while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            }
        }
        const std::string token(text_.substr(start, pos_ - start));
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(token, &used);
        } catch (const std::exception&) {
            pos_ = start;
            fail("malformed number '" + token + "'");
        }
        if (used != token.size()) {
            pos_ = start;
            fail("malformed number '" + token + "'");
        }
        return Expression::constant(v);
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

}  // namespace detail

inline Expression Expression::parse(std::string_view text) { return detail::ExpressionParser(text).parse(); }

}  // namespace cmc
