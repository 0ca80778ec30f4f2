#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "fixtures.hpp"
#include "wavefront/oracle.hpp"
#include "wavefront/zigzag.hpp"

#include <algorithm>
#include <numbers>
#include <random>

using namespace wavefront;

namespace {

std::vector<int> signs(const std::string& s) {
    std::vector<int> out;
    for (char c : s) out.push_back(c == '+' ? 1 : -1);
    return out;
}

std::string text(const std::vector<int>& v) {
    std::string s;
    for (int e : v) s += e > 0 ? '+' : '-';
    return s;
}

LoopSpec line_loop(double lo, double hi) {
    LoopSpec l;
    Expr s = Expr::variable(0);
    l.map = {Expr::constant(lo) + Expr::constant(hi - lo) * s};
    return l;
}

} // namespace

TEST_CASE("normalization") {
    CHECK(text(normalize(signs("+-+-+--+--++"))) == "+-+-");
    CHECK(normalize(signs("++")).empty());
    CHECK(normalize(signs("+--+")).empty());
    CHECK(make_sign_sequence(signs("+-+-+--+--++")).z == 2);
    CHECK(make_sign_sequence(signs("++-+")).z == 1);
}

TEST_CASE("raw sequence recursion") {
    CHECK(text(raw_sequence({})) == "++");
    CrossingRecord a, b;
    a.s_minus = -1;
    a.s_plus = +1;
    b.s_minus = -1;
    b.s_plus = +1;
    // eps_1 = s_1^-, eps_2 = eps_1 s_1^+ s_2^-, eps_3 = eps_2 s_2^+
    CHECK(text(raw_sequence({a, b})) == "+-++");
}

TEST_CASE("model cusp traversal: s^- = +1, s^+ = -1") {
    auto f = ak_front_normal_form(1, 1);
    auto loop = line_loop(-0.5, 0.5);
    auto t = transport_normal(f, loop, 64);
    auto cr = detect_crossings(f, loop, t);
    REQUIRE(cr.size() == 1);
    CHECK(std::abs(cr[0].s - 0.5) < 1e-12);
    CHECK(cr[0].cls.is_a(2));
    CHECK(cr[0].s_minus == +1);
    CHECK(cr[0].s_plus == -1);
    CHECK(std::abs(cr[0].lambda) <= 1e-10);
}

TEST_CASE("inward side agrees with root counting on the versal cubic") {
    // (2t^3, -3t^2) is {F = F_t = 0} for F = t^3 + u1 t + u0, with (u0, u1) the target coordinates.
    // The inward side is where F gains roots: discriminant -4 u1^3 - 27 u0^2 > 0.
    auto f = ak_front_normal_form(1, 1);
    auto loop = line_loop(-0.5, 0.5);
    auto cr = detect_crossings(f, loop, transport_normal(f, loop, 64));
    REQUIRE(cr.size() == 1);
    for (double t : {-0.4, -0.2, -0.05, 0.05, 0.2, 0.4}) {
        // the transported normal is +(1, t) along this loop; s^- / s^+ say whether it is inward
        const int inward_sign = t < 0 ? cr[0].s_minus : cr[0].s_plus;
        const double eps = 1e-6 * inward_sign / std::sqrt(1 + t * t);
        const double u0 = 2 * t * t * t + eps, u1 = -3 * t * t + eps * t;
        CAPTURE(t);
        CHECK(-4 * u1 * u1 * u1 - 27 * u0 * u0 > 0);
    }
}

TEST_CASE("circle") {
    auto r = analyze_loop(fixture_front("circle"), fixture_loop("circle"));
    CHECK(r.coorientable);
    CHECK(r.crossings.empty());
    REQUIRE(r.sequence);
    CHECK(text(r.sequence->raw) == "++");
    CHECK(r.sequence->z == 0);
    CHECK(*r.maslov == 0);
    // the curvature map of the unit circle is constant
    for (const auto& [s, th] : r.angle_trace) CHECK(std::abs(th - r.angle_trace.front().second) < 1e-12);
}

TEST_CASE("astroid") {
    auto front = fixture_front("astroid");
    auto loop = fixture_loop("shifted");
    auto t = transport_normal(front, loop, 4096);
    CHECK(t.coorientable);
    auto cr = detect_crossings(front, loop, t);
    REQUIRE(cr.size() == 4);
    for (const auto& c : cr) {
        CHECK(c.cls.is_a(2));
        CHECK(c.s_minus == -c.s_plus);
    }
    auto theta = normal_curvature_map(front, loop, t);
    double worst = 0.0;
    for (std::size_t i = 1; i < theta.size(); ++i) worst = std::max(worst, std::abs(theta[i] - theta[i - 1]));
    CHECK(worst < std::numbers::pi / 8);
    double closing = std::remainder(theta.back() - theta.front(), std::numbers::pi);
    CHECK(std::abs(closing) < 1e-9);
    auto r = analyze_loop(front, loop);
    CHECK(*r.consistent);
}

TEST_CASE("deltoid is not co-orientable") {
    auto r = analyze_loop(fixture_front("deltoid"), fixture_loop("shifted"));
    CHECK_FALSE(r.coorientable);
    CHECK(r.rho == 1);
    CHECK_FALSE(r.sequence);
    CHECK_FALSE(r.maslov);
}

TEST_CASE("twelve-sign curve") {
    auto r = analyze_loop(fixture_front("twelve_signs"), fixture_loop("twelve_signs"));
    REQUIRE(r.sequence);
    CHECK(r.crossings.size() == 10);
    CHECK(text(r.sequence->raw) == "+-+-+--+--++");
    CHECK(text(r.sequence->normalized) == "+-+-");
    CHECK(r.sequence->z == 2);
    CHECK(std::abs(*r.maslov) == 2);
}

TEST_CASE("cusp pair has one zig") {
    auto r = analyze_loop(fixture_front("cusp_pair"), fixture_loop("circle"));
    REQUIRE(r.sequence);
    CHECK(r.sequence->z == 1);
    CHECK(std::abs(*r.maslov) == 1);
}

TEST_CASE("flipping the base normal negates mu and keeps z") {
    auto front = fixture_front("cusp_pair");
    auto loop = fixture_loop("circle");
    auto a = analyze_loop(front, loop);
    loop.base_normal = -1;
    auto b = analyze_loop(front, loop);
    CHECK(*b.maslov == -*a.maslov);
    CHECK(b.sequence->z == a.sequence->z);
}

TEST_CASE("reversing the loop keeps z") {
    auto front = fixture_front("twelve_signs");
    auto loop = fixture_loop("twelve_signs");
    auto a = analyze_loop(front, loop);
    Expr s = Expr::variable(0);
    loop.map = {Expr::constant(2 * std::numbers::pi) * (Expr::constant(1.0) - s)};
    auto b = analyze_loop(front, loop);
    CHECK(b.sequence->z == a.sequence->z);
    CHECK(std::abs(*b.maslov) == std::abs(*a.maslov));
}

TEST_CASE("lips (a Morin front) is trivial") {
    auto r = analyze_loop(fixture_front("lips"), fixture_loop("shifted"));
    CHECK(r.crossings.size() == 2);
    CHECK(r.sequence->z == 0);
    CHECK(*r.maslov == 0);
}

TEST_CASE("cylinders over plane fronts") {
    auto r = analyze_loop(fixture_front("twelve_signs_cylinder"), fixture_loop("twelve_signs_cylinder"));
    REQUIRE(r.sequence);
    CHECK(r.null_loop);
    CHECK(r.sequence->z == 2);
    CHECK(*r.consistent);
    auto a = analyze_loop(fixture_front("astroid_cylinder"), fixture_loop("astroid_cylinder"));
    CHECK(a.crossings.size() == 4);
    CHECK(a.sequence->z == 0);
    CHECK(*a.maslov == 0);
}

TEST_CASE("rotation index needs a null loop") {
    // Moves along the cuspidal edge at each crossing: z is defined, mu is not.
    auto r = analyze_loop(fixture_front("twelve_signs_cylinder"), fixture_loop("twelve_signs_cylinder_skew"));
    CHECK_FALSE(r.null_loop);
    REQUIRE(r.sequence);
    CHECK(r.sequence->z == 2);
    CHECK_FALSE(r.maslov);
    CHECK_FALSE(r.consistent);
    CHECK(std::any_of(r.crossings.begin(), r.crossings.end(),
                      [](const CrossingRecord& c) { return c.null_residual > null_loop_tol; }));
}

TEST_CASE("metric changes the angles, not the index") {
    auto front = fixture_front("cusp_pair");
    auto loop = fixture_loop("circle");
    loop.metric = {2.0, 0.3, 0.3, 1.0};
    auto r = analyze_loop(front, loop);
    CHECK(std::abs(*r.maslov) == 1);
    loop.metric = {1.0, 2.0, 2.0, 1.0};
    CHECK_THROWS_AS(analyze_loop(front, loop), PreconditionError);
}

TEST_CASE("preconditions") {
    auto front = fixture_front("astroid");
    LoopSpec open = line_loop(0.3, 2.0);
    CHECK_THROWS_AS(analyze_loop(front, open), PreconditionError);
    LoopSpec base_on_cusp = line_loop(0.0, 2 * std::numbers::pi);
    CHECK_THROWS_AS(analyze_loop(front, base_on_cusp), PreconditionError);
    FrontInstance no_normal = fixture_front("astroid_cylinder");
    no_normal.normal.clear();
    CHECK_THROWS_AS(analyze_loop(no_normal, fixture_loop("astroid_cylinder")), PreconditionError);
    CHECK_THROWS_AS(maslov_index({0.0, 3.3}), NumericError);
}

TEST_CASE("tangential contact is reported") {
    // (t^2, t^3)-type front touched by a loop that stays on one side of S(f) = {x2 = -6 t^2}.
    auto f = ak_front_normal_form(2, 2);
    LoopSpec l;
    Expr s = Expr::variable(0);
    Expr tt = Expr::constant(0.5) * sin(Expr::constant(2 * std::numbers::pi) * s);
    // x2 = -6 t^2 touches S(f) at t = 0 only when 2 pi s = 0 mod pi, and lambda keeps its sign.
    l.map = {tt + Expr::constant(0.1), Expr::constant(-6.0) * pow(tt + Expr::constant(0.1), 2) -
                                          Expr::constant(0.5) * pow(tt, 2)};
    CHECK_THROWS(analyze_loop(f, l));
}

TEST_CASE("small closed perturbations keep z") {
    auto front = fixture_front("cusp_pair");
    Expr s = Expr::variable(0);
    Expr two_pi_s = Expr::constant(2 * std::numbers::pi) * s;
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> amp(-0.01, 0.01);
    for (int trial = 0; trial < 20; ++trial) {
        LoopSpec loop;
        const double a = amp(rng), b = amp(rng);
        const int k = 1 + trial % 3;
        // vanishes with its derivative at s = 0, 1 so the loop stays closed with the same base point
        Expr bump = pow(sin(Expr::constant(std::numbers::pi) * s), 2);
        loop.map = {two_pi_s + Expr::constant(a) * bump * sin(Expr::constant(2.0 * k) * two_pi_s) +
                    Expr::constant(b) * bump};
        auto r = analyze_loop(front, loop);
        CAPTURE(trial);
        REQUIRE(r.sequence);
        CHECK(r.sequence->z == 1);
        CHECK(std::abs(*r.maslov) == 1);
    }
}
