#include "fredop/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>

#include "fredop/errors.hpp"

namespace fredop {

std::string_view var_name(Var v) noexcept {
    switch (v) {
        case Var::x1: return "x1";
        case Var::x2: return "x2";
        case Var::y1: return "y1";
        case Var::y2: return "y2";
        case Var::u: return "u";
    }
    return "?";
}

namespace {

std::uint8_t var_bit(Var v) { return static_cast<std::uint8_t>(1u << static_cast<unsigned>(v)); }

std::optional<Var> lookup_var(std::string_view name) {
    if (name == "x1" || name == "x") return Var::x1;
    if (name == "x2") return Var::x2;
    if (name == "y1" || name == "y") return Var::y1;
    if (name == "y2") return Var::y2;
    if (name == "u") return Var::u;
    return std::nullopt;
}

std::optional<UnaryOp> lookup_function(std::string_view name) {
    if (name == "sin") return UnaryOp::sin;
    if (name == "cos") return UnaryOp::cos;
    if (name == "exp") return UnaryOp::exp;
    if (name == "tanh") return UnaryOp::tanh;
    if (name == "abs") return UnaryOp::abs;
    return std::nullopt;
}

}  // namespace

Expr Expr::constant(double value) {
    return Expr(std::make_shared<const Node>(Constant{value}));
}

Expr Expr::variable(Var v) {
    Expr e(std::make_shared<const Node>(Variable{v}));
    e.free_vars_ = var_bit(v);
    return e;
}

Expr Expr::unary(UnaryOp op, Expr child) {
    const auto vars = child.free_vars_;
    Expr e(std::make_shared<const Node>(Unary{op, std::move(child)}));
    e.free_vars_ = vars;
    return e;
}

Expr Expr::binary(BinaryOp op, Expr lhs, Expr rhs) {
    if (op == BinaryOp::pow && rhs.depends_on_u()) {
        throw Error("exponent must not depend on u");
    }
    const auto vars = static_cast<std::uint8_t>(lhs.free_vars_ | rhs.free_vars_);
    Expr e(std::make_shared<const Node>(Binary{op, std::move(lhs), std::move(rhs)}));
    e.free_vars_ = vars;
    return e;
}

bool Expr::depends_on(Var v) const noexcept { return (free_vars_ & var_bit(v)) != 0; }

bool Expr::is_zero_constant() const noexcept {
    const auto* c = std::get_if<Constant>(node_.get());
    return c != nullptr && c->value == 0.0;
}

Bindings Bindings::from_map(const std::map<std::string, double>& values) {
    Bindings b;
    for (const auto& [name, value] : values) {
        const auto v = lookup_var(name);
        if (!v) throw UnknownIdentifier(0, name);
        b.set(*v, value);
    }
    return b;
}

// ---------------------------------------------------------------------------
// Parser

namespace {

class Parser {
public:
    explicit Parser(std::string_view src) : src_(src) {}

    Expr parse_all() {
        Expr e = parse_sum();
        skip_ws();
        if (pos_ != src_.size()) {
            throw SyntaxError(pos_, std::string("unexpected '") + src_[pos_] + "'");
        }
        return e;
    }

private:
    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) {
            throw SyntaxError(pos_, pos_ < src_.size() ? std::string("expected '") + c + "'"
                                                       : std::string("unexpected end of input, expected '") + c + "'");
        }
    }

    Expr parse_sum() {
        Expr lhs = parse_product();
        for (;;) {
            if (accept('+')) {
                lhs = Expr::binary(BinaryOp::add, std::move(lhs), parse_product());
            } else if (accept('-')) {
                lhs = Expr::binary(BinaryOp::sub, std::move(lhs), parse_product());
            } else {
                return lhs;
            }
        }
    }

    Expr parse_product() {
        Expr lhs = parse_unary();
        for (;;) {
            if (accept('*')) {
                lhs = Expr::binary(BinaryOp::mul, std::move(lhs), parse_unary());
            } else if (accept('/')) {
                lhs = Expr::binary(BinaryOp::div, std::move(lhs), parse_unary());
            } else {
                return lhs;
            }
        }
    }

    Expr parse_unary() {
        if (accept('-')) return Expr::unary(UnaryOp::neg, parse_unary());
        return parse_power();
    }

    // The exponent is a unary so that "2^-1" and "2^3^2" = 2^(3^2) both work.
    Expr parse_power() {
        Expr base = parse_primary();
        if (!accept('^')) return base;
        skip_ws();
        const std::size_t exponent_pos = pos_;
        Expr exponent = parse_unary();
        if (exponent.depends_on_u()) {
            throw SyntaxError(exponent_pos, "exponent must not depend on u");
        }
        return Expr::binary(BinaryOp::pow, std::move(base), std::move(exponent));
    }

    Expr parse_primary() {
        skip_ws();
        if (pos_ >= src_.size()) throw SyntaxError(pos_, "unexpected end of input");
        const char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            Expr e = parse_sum();
            expect(')');
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
        throw SyntaxError(pos_, std::string("unexpected '") + c + "'");
    }

    Expr parse_number() {
        const std::size_t start = pos_;
        auto is_digit = [&](std::size_t i) {
            return i < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i]));
        };
        std::size_t i = pos_;
        bool digits = false;
        while (is_digit(i)) ++i, digits = true;
        if (i < src_.size() && src_[i] == '.') {
            ++i;
            while (is_digit(i)) ++i, digits = true;
        }
        if (!digits) throw SyntaxError(start, "malformed number");
        if (i < src_.size() && (src_[i] == 'e' || src_[i] == 'E')) {
            std::size_t j = i + 1;
            if (j < src_.size() && (src_[j] == '+' || src_[j] == '-')) ++j;
            if (!is_digit(j)) throw SyntaxError(j, "malformed exponent in number");
            while (is_digit(j)) ++j;
            i = j;
        }
        double value = 0.0;
        const auto [ptr, ec] = std::from_chars(src_.data() + start, src_.data() + i, value);
        if (ec != std::errc() || ptr != src_.data() + i) throw SyntaxError(start, "number out of range");
        pos_ = i;
        return Expr::constant(value);
    }

    Expr parse_identifier() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
            ++pos_;
        }
        const std::string_view name = src_.substr(start, pos_ - start);
        if (const auto fn = lookup_function(name)) {
            skip_ws();
            if (pos_ >= src_.size() || src_[pos_] != '(') {
                throw SyntaxError(pos_, "expected '(' after function '" + std::string(name) + "'");
            }
            ++pos_;
            Expr arg = parse_sum();
            expect(')');
            return Expr::unary(*fn, std::move(arg));
        }
        if (const auto v = lookup_var(name)) return Expr::variable(*v);
        throw UnknownIdentifier(start, std::string(name));
    }

    std::string_view src_;
    std::size_t pos_ = 0;
};

}  // namespace

Expr parse(std::string_view source) { return Parser(source).parse_all(); }

// ---------------------------------------------------------------------------
// Evaluation

namespace {

double checked_pow(double base, double exponent) {
    if (base == 0.0 && exponent < 0.0) throw NumericDomainError("0 raised to a negative power");
    if (base < 0.0 && std::trunc(exponent) != exponent) {
        throw NumericDomainError("negative base raised to a non-integer power");
    }
    return std::pow(base, exponent);
}

struct Evaluator {
    const Bindings& b;

    double operator()(const Expr::Constant& c) const { return c.value; }

    double operator()(const Expr::Variable& v) const {
        if (!b.has(v.var)) throw MissingBinding("no value bound for '" + std::string(var_name(v.var)) + "'");
        return b.get(v.var);
    }

    double operator()(const Expr::Unary& n) const {
        const double a = std::visit(*this, n.child.node());
        switch (n.op) {
            case UnaryOp::neg: return -a;
            case UnaryOp::sin: return std::sin(a);
            case UnaryOp::cos: return std::cos(a);
            case UnaryOp::exp: return std::exp(a);
            case UnaryOp::tanh: return std::tanh(a);
            case UnaryOp::abs: return std::abs(a);
            case UnaryOp::sign: return a > 0.0 ? 1.0 : (a < 0.0 ? -1.0 : 0.0);
        }
        return 0.0;
    }

    double operator()(const Expr::Binary& n) const {
        const double l = std::visit(*this, n.lhs.node());
        const double r = std::visit(*this, n.rhs.node());
        switch (n.op) {
            case BinaryOp::add: return l + r;
            case BinaryOp::sub: return l - r;
            case BinaryOp::mul: return l * r;
            case BinaryOp::div:
                if (r == 0.0) throw NumericDomainError("division by zero");
                return l / r;
            case BinaryOp::pow: return checked_pow(l, r);
        }
        return 0.0;
    }
};

}  // namespace

double evaluate(const Expr& expr, const Bindings& bindings) {
    return std::visit(Evaluator{bindings}, expr.node());
}

// ---------------------------------------------------------------------------
// Differentiation

namespace {

Expr mul(Expr a, Expr b) { return Expr::binary(BinaryOp::mul, std::move(a), std::move(b)); }
Expr sub(Expr a, Expr b) { return Expr::binary(BinaryOp::sub, std::move(a), std::move(b)); }
Expr un(UnaryOp op, Expr a) { return Expr::unary(op, std::move(a)); }

Expr chain(Expr outer, const Expr& inner_derivative) { return mul(std::move(outer), inner_derivative); }

}  // namespace

Expr differentiate_u(const Expr& expr) {
    if (!expr.depends_on_u()) return Expr::constant(0.0);

    return std::visit(
        [&](const auto& n) -> Expr {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Expr::Constant>) {
                return Expr::constant(0.0);
            } else if constexpr (std::is_same_v<T, Expr::Variable>) {
                return Expr::constant(n.var == Var::u ? 1.0 : 0.0);
            } else if constexpr (std::is_same_v<T, Expr::Unary>) {
                const Expr& a = n.child;
                const Expr da = differentiate_u(a);
                switch (n.op) {
                    case UnaryOp::neg: return un(UnaryOp::neg, da);
                    case UnaryOp::sin: return chain(un(UnaryOp::cos, a), da);
                    case UnaryOp::cos: return chain(un(UnaryOp::neg, un(UnaryOp::sin, a)), da);
                    case UnaryOp::exp: return chain(un(UnaryOp::exp, a), da);
                    case UnaryOp::tanh: {
                        Expr t = un(UnaryOp::tanh, a);
                        return chain(sub(Expr::constant(1.0), mul(t, t)), da);
                    }
                    case UnaryOp::abs: return chain(un(UnaryOp::sign, a), da);
                    case UnaryOp::sign: return Expr::constant(0.0);
                }
                return Expr::constant(0.0);
            } else {
                const Expr& a = n.lhs;
                const Expr& b = n.rhs;
                switch (n.op) {
                    case BinaryOp::add:
                        return Expr::binary(BinaryOp::add, differentiate_u(a), differentiate_u(b));
                    case BinaryOp::sub: return sub(differentiate_u(a), differentiate_u(b));
                    case BinaryOp::mul:
                        return Expr::binary(BinaryOp::add, mul(differentiate_u(a), b), mul(a, differentiate_u(b)));
                    case BinaryOp::div:
                        return Expr::binary(BinaryOp::div,
                                            sub(mul(differentiate_u(a), b), mul(a, differentiate_u(b))),
                                            mul(b, b));
                    case BinaryOp::pow: {
                        // exponent is u-free
                        Expr reduced = Expr::binary(BinaryOp::pow, a, sub(b, Expr::constant(1.0)));
                        return chain(mul(b, reduced), differentiate_u(a));
                    }
                }
                return Expr::constant(0.0);
            }
        },
        expr.node());
}

// ---------------------------------------------------------------------------
// Printing

namespace {

std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", std::abs(v));
    return v < 0.0 || std::signbit(v) ? "(-" + std::string(buf) + ")" : std::string(buf);
}

std::string_view unary_name(UnaryOp op) {
    switch (op) {
        case UnaryOp::neg: return "-";
        case UnaryOp::sin: return "sin";
        case UnaryOp::cos: return "cos";
        case UnaryOp::exp: return "exp";
        case UnaryOp::tanh: return "tanh";
        case UnaryOp::abs: return "abs";
        case UnaryOp::sign: return "sign";
    }
    return "?";
}

char binary_symbol(BinaryOp op) {
    switch (op) {
        case BinaryOp::add: return '+';
        case BinaryOp::sub: return '-';
        case BinaryOp::mul: return '*';
        case BinaryOp::div: return '/';
        case BinaryOp::pow: return '^';
    }
    return '?';
}

}  // namespace

std::string to_string(const Expr& expr) {
    return std::visit(
        [](const auto& n) -> std::string {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Expr::Constant>) {
                return format_number(n.value);
            } else if constexpr (std::is_same_v<T, Expr::Variable>) {
                return std::string(var_name(n.var));
            } else if constexpr (std::is_same_v<T, Expr::Unary>) {
                if (n.op == UnaryOp::neg) return "(-" + to_string(n.child) + ")";
                return std::string(unary_name(n.op)) + "(" + to_string(n.child) + ")";
            } else {
                return "(" + to_string(n.lhs) + " " + binary_symbol(n.op) + " " + to_string(n.rhs) + ")";
            }
        },
        expr.node());
}

}  // namespace fredop
