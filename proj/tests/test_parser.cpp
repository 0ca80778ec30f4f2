#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "wavefront/front.hpp"

#include <random>

using namespace wavefront;

TEST_CASE("plane cusp parses to n = 1 with two components") {
    auto f = parse_front("front cusp\nvars t\nmap (2*t^3, -3*t^2)\n");
    CHECK(f.n == 1);
    CHECK(f.map.size() == 2);
    CHECK_FALSE(f.has_normal());
    CHECK(f.field == Field::Real);
}

TEST_CASE("empty map list is a dimension mismatch") {
    try {
        (void)parse_front("front bad\nvars t\nmap ()\n");
        FAIL("expected an error");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("dimension mismatch") != std::string::npos);
        CHECK(e.location().line == 3);
    }
}

TEST_CASE("swallowtail with normal") {
    auto f = parse_front(R"(# swallowtail
front swallowtail
dim 2
vars t, x
map (3*t^4 + t^2*x, -4*t^3 - 2*t*x, x)
normal (1, t, t^2)
)");
    CHECK(f.n == 2);
    CHECK(f.normal.size() == 3);
    // <f_t, nu> and <f_x, nu> vanish identically
    auto rep = check_front_condition(f, 50, 1e-12);
    CHECK(rep.ok);
    CHECK(rep.worst < 1e-14);
}

TEST_CASE("syntax errors report line and column") {
    try {
        (void)parse_front("front f\nvars t\nmap (t +* 2, t)\n");
        FAIL("expected an error");
    } catch (const ParseError& e) {
        CHECK(e.location().line == 3);
        CHECK(e.location().column == 9);
    }
    try {
        (void)parse_front("front f\nvars t\nmap (t, u)\n");
        FAIL("expected an error");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("unknown identifier 'u'") != std::string::npos);
        CHECK(e.location().column == 9);
    }
    CHECK_THROWS_AS(parse_front("front f\ndim 2\nvars t\nmap (t, t)\n"), ParseError);
    CHECK_THROWS_AS(parse_front("front f\nvars t\nmap (t, t, t)\n"), ParseError);
    CHECK_THROWS_AS(parse_front("front f\nvars t\nmap (t, t)\nmap (t, t)\n"), ParseError);
    CHECK_THROWS_AS(parse_front("front f\nvars t\nmap (t^2^3, t)\n"), ParseError);
    CHECK_THROWS_AS(parse_front("front f\nvars t\nmap (t, t\n"), ParseError);
    CHECK_THROWS_AS(parse_front("fron f\nvars t\nmap (t, t)\n"), ParseError);
}

TEST_CASE("vars may follow map") {
    auto f = parse_front("front f map (x*y, x, y) vars x, y");
    CHECK(f.n == 2);
    CHECK(f.map[0].op() == Expr::Op::Mul);
}

TEST_CASE("dim alone yields default names") {
    auto f = parse_front("front f\ndim 2\nmap (x1, x2, x1*x2)\n");
    CHECK(f.vars == std::vector<std::string>{"x1", "x2"});
}

namespace {

Expr random_expr(std::mt19937_64& rng, int depth, int nvars) {
    std::uniform_int_distribution<int> kind(0, depth <= 0 ? 1 : 12);
    std::uniform_real_distribution<double> num(-5.0, 5.0);
    switch (kind(rng)) {
    case 0: return Expr::variable(static_cast<int>(rng() % static_cast<unsigned>(nvars)));
    case 1: {
        double v = num(rng);
        if (rng() % 3 == 0) v = std::round(v);
        if (rng() % 5 == 0) v *= 1e-7;
        return Expr::constant(v);
    }
    case 2: return Expr::make_binary(Expr::Op::Add, random_expr(rng, depth - 1, nvars), random_expr(rng, depth - 1, nvars));
    case 3: return Expr::make_binary(Expr::Op::Sub, random_expr(rng, depth - 1, nvars), random_expr(rng, depth - 1, nvars));
    case 4: return Expr::make_binary(Expr::Op::Mul, random_expr(rng, depth - 1, nvars), random_expr(rng, depth - 1, nvars));
    case 5: return Expr::make_binary(Expr::Op::Div, random_expr(rng, depth - 1, nvars), random_expr(rng, depth - 1, nvars));
    case 6: return Expr::make_power(random_expr(rng, depth - 1, nvars), static_cast<int>(rng() % 7) - 2);
    case 7: return Expr::make_unary(Expr::Op::Neg, random_expr(rng, depth - 1, nvars));
    case 8: return Expr::make_unary(Expr::Op::Sin, random_expr(rng, depth - 1, nvars));
    case 9: return Expr::make_unary(Expr::Op::Cos, random_expr(rng, depth - 1, nvars));
    case 10: return Expr::make_unary(Expr::Op::Exp, random_expr(rng, depth - 1, nvars));
    case 11: return Expr::make_unary(Expr::Op::Log, random_expr(rng, depth - 1, nvars));
    default: return Expr::make_unary(Expr::Op::Sqrt, random_expr(rng, depth - 1, nvars));
    }
}

} // namespace

TEST_CASE("parse, print, parse is a fixed point") {
    std::vector<std::string> names{"t", "x", "y"};
    std::mt19937_64 rng(3);
    for (int i = 0; i < 500; ++i) {
        Expr e = random_expr(rng, 5, 3);
        std::string text = to_string(e, names);
        Expr back = parse_expression(text, names);
        INFO(text);
        CHECK(back.same_as(e));
        CHECK(to_string(back, names) == text);
    }
}

TEST_CASE("front text round-trips") {
    auto f = parse_front("front s\nvars t, x\nmap (3*t^4 + t^2*x, -4*t^3 - 2*t*x, x)\nnormal (1, t, t^2)\nfield complex\n");
    auto g = parse_front(to_text(f));
    CHECK(same_structure(f, g));
    CHECK(to_text(f) == to_text(g));
}

TEST_CASE("loop definitions") {
    auto l = parse_loop("loop circle\nparam s\nmap (cos(2*pi*s))\nsamples 4096\nbase_normal -\n");
    CHECK(l.map.size() == 1);
    CHECK(l.samples == 4096);
    CHECK(l.base_normal == -1);
    auto back = parse_loop(to_text(l));
    CHECK(back.map[0].same_as(l.map[0]));
    CHECK_THROWS_AS(parse_loop("loop c\nvars t\nmap (t)\n"), ParseError);
}

TEST_CASE("equidimensional maps") {
    auto m = parse_morin_map("front cusp\nvars z1, z2\nmap (z1*z2 + z2^3, z1)\n");
    CHECK(m.n == 2);
    CHECK_THROWS_AS(parse_morin_map("front cusp\nvars z1, z2\nmap (z1, z2, z1)\n"), ParseError);
}
