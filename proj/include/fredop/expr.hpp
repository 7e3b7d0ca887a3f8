#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace fredop {

/// Free variables a kernel formula may reference. Spatial points are at most
/// two-dimensional: x = (x1, x2) is the evaluation point, y = (y1, y2) the
/// integration point and u the solution value at y.
enum class Var : std::uint8_t { x1 = 0, x2, y1, y2, u };

inline constexpr std::size_t kVarCount = 5;

std::string_view var_name(Var v) noexcept;

/// `sign` never comes out of the parser; it only appears in derivatives of
/// `abs` (with sign(0) = 0).
enum class UnaryOp : std::uint8_t { neg, sin, cos, exp, tanh, abs, sign };
enum class BinaryOp : std::uint8_t { add, sub, mul, div, pow };

/// Immutable expression tree. Copies share structure.
class Expr {
public:
    struct Constant {
        double value;
    };
    struct Variable {
        Var var;
    };
    struct Unary;
    struct Binary;
    using Node = std::variant<Constant, Variable, Unary, Binary>;

    static Expr constant(double value);
    static Expr variable(Var v);
    static Expr unary(UnaryOp op, Expr child);
    /// Rejects a pow whose exponent depends on u.
    static Expr binary(BinaryOp op, Expr lhs, Expr rhs);

    const Node& node() const noexcept;

    bool depends_on(Var v) const noexcept;
    bool depends_on_u() const noexcept { return depends_on(Var::u); }
    bool is_zero_constant() const noexcept;

private:
    explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    std::shared_ptr<const Node> node_;
    std::uint8_t free_vars_ = 0;  // bit i set when Var(i) occurs
};

struct Expr::Unary {
    UnaryOp op;
    Expr child;
};

struct Expr::Binary {
    BinaryOp op;
    Expr lhs;
    Expr rhs;
};

inline const Expr::Node& Expr::node() const noexcept { return *node_; }

/// Values for the free variables of an expression.
class Bindings {
public:
    Bindings() = default;
    /// Accepts the names x1, x2, y1, y2, u and the aliases x (= x1), y (= y1).
    static Bindings from_map(const std::map<std::string, double>& values);

    Bindings& set(Var v, double value) noexcept {
        values_[static_cast<std::size_t>(v)] = value;
        bound_ |= static_cast<std::uint8_t>(1u << static_cast<unsigned>(v));
        return *this;
    }
    bool has(Var v) const noexcept { return (bound_ >> static_cast<unsigned>(v)) & 1u; }
    double get(Var v) const noexcept { return values_[static_cast<std::size_t>(v)]; }

private:
    std::array<double, kVarCount> values_{};
    std::uint8_t bound_ = 0;
};

/// Parses a kernel formula. Precedence, tightest first: `^` (right
/// associative), unary minus, `* /`, `+ -`. Throws SyntaxError or
/// UnknownIdentifier, both carrying a 0-based character position.
Expr parse(std::string_view source);

/// Throws MissingBinding for unbound variables and NumericDomainError for
/// division by zero, 0^negative and negative^non-integer.
double evaluate(const Expr& expr, const Bindings& bindings);

/// Symbolic d/du. Subtrees that do not contain u differentiate to the
/// constant 0; nothing else is simplified. abs'(a) is taken as sign(a).
Expr differentiate_u(const Expr& expr);

/// Fully parenthesised infix text that `parse` reads back to an
/// evaluation-equivalent tree (except for `sign`, which is not in the grammar).
std::string to_string(const Expr& expr);

}  // namespace fredop
