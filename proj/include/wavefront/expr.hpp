#pragma once

#include "wavefront/error.hpp"
#include "wavefront/jet.hpp"
#include "wavefront/scalar.hpp"

#include <memory>
#include <span>
#include <string>
#include <vector>

namespace wavefront {

struct ExprNode;

/// Immutable expression tree over variables x_0..x_{n-1}. Copies share structure.
class Expr {
public:
    enum class Op { Var, Const, Add, Sub, Mul, Div, Pow, Neg, Sin, Cos, Exp, Log, Sqrt };

    Expr() = default;

    static Expr variable(int index, SourceLoc loc = {});
    /// Negative real constants are stored as Neg(Const(|c|)), matching what the parser produces.
    static Expr constant(Scalar c, SourceLoc loc = {});
    static Expr constant(double c, SourceLoc loc = {}) { return constant(Scalar{c, 0.0}, loc); }
    /// Raw node constructors; no folding. Used by the parser.
    static Expr make_unary(Op op, Expr arg, SourceLoc loc = {});
    static Expr make_binary(Op op, Expr lhs, Expr rhs, SourceLoc loc = {});
    static Expr make_power(Expr base, int exponent, SourceLoc loc = {});

    bool valid() const noexcept { return static_cast<bool>(node_); }
    Op op() const;
    int var() const;
    Scalar value() const;
    int exponent() const;
    const Expr& lhs() const;
    const Expr& rhs() const;
    SourceLoc loc() const;
    const ExprNode* id() const noexcept { return node_.get(); }

    bool is_constant(Scalar c) const;
    /// Largest variable index referenced, or -1.
    int max_variable() const;
    /// Structural equality ignoring source locations.
    bool same_as(const Expr& other) const;

private:
    explicit Expr(std::shared_ptr<const ExprNode> node) : node_(std::move(node)) {}
    std::shared_ptr<const ExprNode> node_;
};

struct ExprNode {
    Expr::Op op;
    int var = -1;
    Scalar value{};
    int exponent = 0;
    Expr lhs, rhs;
    SourceLoc loc;
};

// Builders with light constant folding (0 + x, 1 * x, 0 * x, ...).
Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr pow(const Expr& a, int exponent);
Expr sin(const Expr& a);
Expr cos(const Expr& a);
Expr exp(const Expr& a);
Expr log(const Expr& a);
Expr sqrt(const Expr& a);

Expr differentiate(const Expr& e, int var);
/// Replaces variable i by replacements[i].
Expr substitute(const Expr& e, std::span<const Expr> replacements);
/// Sum_a c_a * prod_v (x_v - p_v)^a_v for the Taylor data held by `taylor`.
Expr taylor_polynomial(const Jet& taylor);

/// Evaluates several expressions sharing one memo table; inputs are jets for x_0..x_{n-1}.
std::vector<Jet> evaluate(std::span<const Expr> exprs, std::span<const Jet> inputs);
Jet evaluate(const Expr& e, std::span<const Jet> inputs);
/// Jet of e at p to order d.
Jet eval_jet(const Expr& e, const Point& p, int order, Field field = Field::Real);
/// Plain evaluation; same domain rules as the jet evaluator.
Scalar evaluate(const Expr& e, std::span<const Scalar> x, Field field = Field::Real);

/// Infix text that parses back to the same tree.
std::string to_string(const Expr& e, std::span<const std::string> names);
std::string format_number(double v);

} // namespace wavefront
