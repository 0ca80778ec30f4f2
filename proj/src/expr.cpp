#include "wavefront/expr.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <unordered_map>

namespace wavefront {

namespace {

using Op = Expr::Op;

std::shared_ptr<ExprNode> new_node(Op op, SourceLoc loc) {
    auto n = std::make_shared<ExprNode>();
    n->op = op;
    n->loc = loc;
    return n;
}

const char* function_name(Op op) {
    switch (op) {
    case Op::Sin: return "sin";
    case Op::Cos: return "cos";
    case Op::Exp: return "exp";
    case Op::Log: return "log";
    case Op::Sqrt: return "sqrt";
    default: return "?";
    }
}

} // namespace

Expr Expr::variable(int index, SourceLoc loc) {
    auto n = new_node(Op::Var, loc);
    n->var = index;
    return Expr(std::move(n));
}

Expr Expr::constant(Scalar c, SourceLoc loc) {
    if (c.imag() == 0.0 && (c.real() < 0.0 || std::signbit(c.real())) && c.real() != 0.0) {
        return make_unary(Op::Neg, constant(Scalar{-c.real(), 0.0}, loc), loc);
    }
    auto n = new_node(Op::Const, loc);
    n->value = c.real() == 0.0 && c.imag() == 0.0 ? Scalar{} : c;
    return Expr(std::move(n));
}

Expr Expr::make_unary(Op op, Expr arg, SourceLoc loc) {
    auto n = new_node(op, loc);
    n->lhs = std::move(arg);
    return Expr(std::move(n));
}

Expr Expr::make_binary(Op op, Expr lhs, Expr rhs, SourceLoc loc) {
    auto n = new_node(op, loc);
    n->lhs = std::move(lhs);
    n->rhs = std::move(rhs);
    return Expr(std::move(n));
}

Expr Expr::make_power(Expr base, int exponent, SourceLoc loc) {
    auto n = new_node(Op::Pow, loc);
    n->lhs = std::move(base);
    n->exponent = exponent;
    return Expr(std::move(n));
}

Expr::Op Expr::op() const { return node_->op; }
int Expr::var() const { return node_->var; }
Scalar Expr::value() const { return node_->value; }
int Expr::exponent() const { return node_->exponent; }
const Expr& Expr::lhs() const { return node_->lhs; }
const Expr& Expr::rhs() const { return node_->rhs; }
SourceLoc Expr::loc() const { return node_->loc; }

bool Expr::is_constant(Scalar c) const {
    if (op() == Op::Const) return value() == c;
    if (op() == Op::Neg && lhs().op() == Op::Const) return -lhs().value() == c;
    return false;
}

int Expr::max_variable() const {
    switch (op()) {
    case Op::Var: return var();
    case Op::Const: return -1;
    default: {
        int m = lhs().max_variable();
        if (rhs().valid()) m = std::max(m, rhs().max_variable());
        return m;
    }
    }
}

bool Expr::same_as(const Expr& other) const {
    if (node_ == other.node_) return true;
    if (!valid() || !other.valid()) return false;
    if (op() != other.op()) return false;
    switch (op()) {
    case Op::Var: return var() == other.var();
    case Op::Const: return value() == other.value();
    case Op::Pow: return exponent() == other.exponent() && lhs().same_as(other.lhs());
    default:
        if (!lhs().same_as(other.lhs())) return false;
        if (rhs().valid() != other.rhs().valid()) return false;
        return !rhs().valid() || rhs().same_as(other.rhs());
    }
}

Expr operator+(const Expr& a, const Expr& b) {
    if (a.is_constant(0.0)) return b;
    if (b.is_constant(0.0)) return a;
    if (a.op() == Op::Const && b.op() == Op::Const) return Expr::constant(a.value() + b.value());
    if (b.op() == Op::Neg) return Expr::make_binary(Op::Sub, a, b.lhs());
    return Expr::make_binary(Op::Add, a, b);
}

Expr operator-(const Expr& a, const Expr& b) {
    if (b.is_constant(0.0)) return a;
    if (a.is_constant(0.0)) return -b;
    if (a.op() == Op::Const && b.op() == Op::Const) return Expr::constant(a.value() - b.value());
    if (b.op() == Op::Neg) return Expr::make_binary(Op::Add, a, b.lhs());
    return Expr::make_binary(Op::Sub, a, b);
}

Expr operator*(const Expr& a, const Expr& b) {
    if (a.is_constant(0.0) || b.is_constant(0.0)) return Expr::constant(0.0);
    if (a.is_constant(1.0)) return b;
    if (b.is_constant(1.0)) return a;
    if (a.is_constant(-1.0)) return -b;
    if (b.is_constant(-1.0)) return -a;
    if (a.op() == Op::Const && b.op() == Op::Const) return Expr::constant(a.value() * b.value());
    return Expr::make_binary(Op::Mul, a, b);
}

Expr operator/(const Expr& a, const Expr& b) {
    if (b.is_constant(1.0)) return a;
    if (a.is_constant(0.0)) return Expr::constant(0.0);
    return Expr::make_binary(Op::Div, a, b);
}

Expr operator-(const Expr& a) {
    if (a.op() == Op::Const) return Expr::constant(-a.value());
    if (a.op() == Op::Neg) return a.lhs();
    return Expr::make_unary(Op::Neg, a);
}

Expr pow(const Expr& a, int exponent) {
    if (exponent == 0) return Expr::constant(1.0);
    if (exponent == 1) return a;
    if (a.is_constant(0.0)) return Expr::constant(0.0);
    return Expr::make_power(a, exponent);
}

Expr sin(const Expr& a) { return Expr::make_unary(Op::Sin, a); }
Expr cos(const Expr& a) { return Expr::make_unary(Op::Cos, a); }
Expr exp(const Expr& a) { return Expr::make_unary(Op::Exp, a); }
Expr log(const Expr& a) { return Expr::make_unary(Op::Log, a); }
Expr sqrt(const Expr& a) { return Expr::make_unary(Op::Sqrt, a); }

namespace {

struct Differentiator {
    int var;
    std::unordered_map<const ExprNode*, Expr> memo;

    Expr run(const Expr& e) {
        if (auto it = memo.find(e.id()); it != memo.end()) return it->second;
        Expr d = compute(e);
        memo.emplace(e.id(), d);
        return d;
    }

    Expr compute(const Expr& e) {
        switch (e.op()) {
        case Op::Var: return Expr::constant(e.var() == var ? 1.0 : 0.0);
        case Op::Const: return Expr::constant(0.0);
        case Op::Add: return run(e.lhs()) + run(e.rhs());
        case Op::Sub: return run(e.lhs()) - run(e.rhs());
        case Op::Mul: return run(e.lhs()) * e.rhs() + e.lhs() * run(e.rhs());
        case Op::Div:
            return (run(e.lhs()) * e.rhs() - e.lhs() * run(e.rhs())) / pow(e.rhs(), 2);
        case Op::Pow:
            return Expr::constant(double(e.exponent())) * pow(e.lhs(), e.exponent() - 1) * run(e.lhs());
        case Op::Neg: return -run(e.lhs());
        case Op::Sin: return cos(e.lhs()) * run(e.lhs());
        case Op::Cos: return -(sin(e.lhs()) * run(e.lhs()));
        case Op::Exp: return e * run(e.lhs());
        case Op::Log: return run(e.lhs()) / e.lhs();
        case Op::Sqrt: return run(e.lhs()) / (Expr::constant(2.0) * e);
        }
        return {};
    }
};

struct Substituter {
    std::span<const Expr> replacements;
    std::unordered_map<const ExprNode*, Expr> memo;

    Expr run(const Expr& e) {
        if (auto it = memo.find(e.id()); it != memo.end()) return it->second;
        Expr r = compute(e);
        memo.emplace(e.id(), r);
        return r;
    }

    Expr compute(const Expr& e) {
        switch (e.op()) {
        case Op::Var:
            if (e.var() >= static_cast<int>(replacements.size()))
                throw PreconditionError("substitute: variable index out of range");
            return replacements[static_cast<std::size_t>(e.var())];
        case Op::Const: return e;
        case Op::Add: return run(e.lhs()) + run(e.rhs());
        case Op::Sub: return run(e.lhs()) - run(e.rhs());
        case Op::Mul: return run(e.lhs()) * run(e.rhs());
        case Op::Div: return run(e.lhs()) / run(e.rhs());
        case Op::Pow: return pow(run(e.lhs()), e.exponent());
        case Op::Neg: return -run(e.lhs());
        default: return Expr::make_unary(e.op(), run(e.lhs()), e.loc());
        }
    }
};

void check_log_domain(Scalar a, Field field, SourceLoc loc) {
    if (a == Scalar{}) throw DomainError(loc, "log of zero");
    if (field == Field::Real && (a.imag() != 0.0 || a.real() <= 0.0)) throw DomainError(loc, "log of a nonpositive real");
}

void check_sqrt_domain(Scalar a, Field field, bool differentiated, SourceLoc loc) {
    if (field == Field::Real && (a.imag() != 0.0 || a.real() < 0.0)) throw DomainError(loc, "sqrt of a negative real");
    if (differentiated && a == Scalar{}) throw DomainError(loc, "sqrt is not differentiable at zero");
}

struct JetEvaluator {
    std::span<const Jet> inputs;
    JetSpacePtr space;
    std::unordered_map<const ExprNode*, Jet> memo;

    const Jet& run(const Expr& e) {
        if (auto it = memo.find(e.id()); it != memo.end()) return it->second;
        Jet j = compute(e);
        return memo.emplace(e.id(), std::move(j)).first->second;
    }

    Jet compute(const Expr& e) {
        try {
            switch (e.op()) {
            case Op::Var:
                if (e.var() >= static_cast<int>(inputs.size()))
                    throw PreconditionError("expression references variable " + std::to_string(e.var()) +
                                            " beyond the input dimension");
                return inputs[static_cast<std::size_t>(e.var())];
            case Op::Const: return Jet::constant(space, e.value());
            case Op::Add: return run(e.lhs()) + run(e.rhs());
            case Op::Sub: return run(e.lhs()) - run(e.rhs());
            case Op::Mul: return run(e.lhs()) * run(e.rhs());
            case Op::Div: {
                const Jet& d = run(e.rhs());
                if (d.value() == Scalar{}) throw DomainError(e.loc(), "division by zero");
                return run(e.lhs()) / d;
            }
            case Op::Pow: {
                const Jet& b = run(e.lhs());
                if (e.exponent() < 0 && b.value() == Scalar{}) throw DomainError(e.loc(), "division by zero");
                return pow(b, e.exponent());
            }
            case Op::Neg: return -run(e.lhs());
            case Op::Sin: return sin(run(e.lhs()));
            case Op::Cos: return cos(run(e.lhs()));
            case Op::Exp: return exp(run(e.lhs()));
            case Op::Log: {
                const Jet& a = run(e.lhs());
                check_log_domain(a.value(), space->field, e.loc());
                return log(a);
            }
            case Op::Sqrt: {
                const Jet& a = run(e.lhs());
                check_sqrt_domain(a.value(), space->field, space->order() > 0, e.loc());
                return sqrt(a);
            }
            }
        } catch (const DomainError& err) {
            if (err.location().line == 0 && e.loc().line > 0) throw DomainError(e.loc(), err.what());
            throw;
        }
        return {};
    }
};

struct ScalarEvaluator {
    std::span<const Scalar> x;
    Field field;
    std::unordered_map<const ExprNode*, Scalar> memo;

    Scalar run(const Expr& e) {
        if (auto it = memo.find(e.id()); it != memo.end()) return it->second;
        Scalar v = compute(e);
        memo.emplace(e.id(), v);
        return v;
    }

    Scalar compute(const Expr& e) {
        switch (e.op()) {
        case Op::Var:
            if (e.var() >= static_cast<int>(x.size())) throw PreconditionError("variable index beyond input dimension");
            return x[static_cast<std::size_t>(e.var())];
        case Op::Const: return e.value();
        case Op::Add: return run(e.lhs()) + run(e.rhs());
        case Op::Sub: return run(e.lhs()) - run(e.rhs());
        case Op::Mul: return run(e.lhs()) * run(e.rhs());
        case Op::Div: {
            Scalar d = run(e.rhs());
            if (d == Scalar{}) throw DomainError(e.loc(), "division by zero");
            return run(e.lhs()) / d;
        }
        case Op::Pow: {
            Scalar b = run(e.lhs());
            int k = e.exponent();
            if (k < 0 && b == Scalar{}) throw DomainError(e.loc(), "division by zero");
            Scalar r{1.0};
            Scalar base = k < 0 ? 1.0 / b : b;
            for (int i = 0, m = std::abs(k); i < m; ++i) r *= base;
            return r;
        }
        case Op::Neg: return -run(e.lhs());
        case Op::Sin: return std::sin(run(e.lhs()));
        case Op::Cos: return std::cos(run(e.lhs()));
        case Op::Exp: return std::exp(run(e.lhs()));
        case Op::Log: {
            Scalar a = run(e.lhs());
            check_log_domain(a, field, e.loc());
            return std::log(a);
        }
        case Op::Sqrt: {
            Scalar a = run(e.lhs());
            check_sqrt_domain(a, field, false, e.loc());
            return std::sqrt(a);
        }
        }
        return {};
    }
};

// Precedence levels for printing.
int precedence(const Expr& e) {
    switch (e.op()) {
    case Op::Add:
    case Op::Sub: return 1;
    case Op::Mul:
    case Op::Div: return 2;
    case Op::Neg: return 3;
    case Op::Pow: return 4;
    default: return 5;
    }
}

void print(const Expr& e, std::span<const std::string> names, std::string& out);

void print_child(const Expr& e, int min_prec, std::span<const std::string> names, std::string& out) {
    if (precedence(e) < min_prec) {
        out += '(';
        print(e, names, out);
        out += ')';
    } else {
        print(e, names, out);
    }
}

void print(const Expr& e, std::span<const std::string> names, std::string& out) {
    switch (e.op()) {
    case Op::Var:
        if (e.var() < static_cast<int>(names.size()))
            out += names[static_cast<std::size_t>(e.var())];
        else
            out += "x" + std::to_string(e.var() + 1);
        return;
    case Op::Const:
        if (e.value().imag() != 0.0) throw PreconditionError("complex constants have no text form");
        out += format_number(e.value().real());
        return;
    case Op::Add:
    case Op::Sub:
        print_child(e.lhs(), 1, names, out);
        out += e.op() == Op::Add ? " + " : " - ";
        print_child(e.rhs(), 2, names, out);
        return;
    case Op::Mul:
    case Op::Div:
        print_child(e.lhs(), 2, names, out);
        out += e.op() == Op::Mul ? "*" : "/";
        print_child(e.rhs(), 3, names, out);
        return;
    case Op::Neg:
        out += '-';
        print_child(e.lhs(), 3, names, out);
        return;
    case Op::Pow:
        print_child(e.lhs(), 5, names, out);
        out += '^';
        out += std::to_string(e.exponent());
        return;
    default:
        out += function_name(e.op());
        out += '(';
        print(e.lhs(), names, out);
        out += ')';
        return;
    }
}

} // namespace

Expr differentiate(const Expr& e, int var) {
    Differentiator d{var, {}};
    return d.run(e);
}

Expr substitute(const Expr& e, std::span<const Expr> replacements) {
    Substituter s{replacements, {}};
    return s.run(e);
}

Expr taylor_polynomial(const Jet& taylor) {
    const auto& layout = *taylor.space()->layout;
    const auto& p = taylor.space()->point;
    const int n = taylor.nvars();
    std::vector<Expr> shifted;
    for (int v = 0; v < n; ++v) {
        Expr x = Expr::variable(v);
        shifted.push_back(p[v] == Scalar{} ? x : x - Expr::constant(p[v]));
    }
    Expr sum = Expr::constant(0.0);
    for (std::size_t i = 0; i < layout.size(); ++i) {
        const Scalar c = taylor[i];
        if (c == Scalar{}) continue;
        Expr term = Expr::constant(c);
        for (int v = 0; v < n; ++v) term = term * pow(shifted[static_cast<std::size_t>(v)], layout.exponent(i, v));
        sum = sum + term;
    }
    return sum;
}

std::vector<Jet> evaluate(std::span<const Expr> exprs, std::span<const Jet> inputs) {
    if (inputs.empty()) throw PreconditionError("evaluate: no input jets");
    JetEvaluator ev{inputs, inputs.front().space(), {}};
    std::vector<Jet> out;
    out.reserve(exprs.size());
    for (const auto& e : exprs) out.push_back(ev.run(e));
    return out;
}

Jet evaluate(const Expr& e, std::span<const Jet> inputs) { return evaluate(std::span<const Expr>(&e, 1), inputs).front(); }

Jet eval_jet(const Expr& e, const Point& p, int order, Field field) {
    if (order < 0) throw PreconditionError("jet order must be >= 0");
    auto space = JetSpace::make(p, order, field);
    std::vector<Jet> vars;
    for (int v = 0; v < static_cast<int>(p.size()); ++v) vars.push_back(Jet::variable(space, v));
    if (vars.empty()) {
        JetEvaluator ev{{}, space, {}};
        return ev.run(e);
    }
    return evaluate(e, vars);
}

Scalar evaluate(const Expr& e, std::span<const Scalar> x, Field field) {
    ScalarEvaluator ev{x, field, {}};
    return ev.run(e);
}

std::string to_string(const Expr& e, std::span<const std::string> names) {
    std::string out;
    print(e, names, out);
    return out;
}

std::string format_number(double v) {
    if (!std::isfinite(v)) throw PreconditionError("non-finite constant has no text form");
    char buf[64];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

} // namespace wavefront
