#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "fd_oracle.hpp"
#include "wavefront/core.hpp"
#include "wavefront/oracle.hpp"

#include <random>

using namespace wavefront;

namespace {

// lambda evaluated without jets: symbolic Jacobian, scalar evaluation, Eigen determinant.
double lambda_scalar(const FrontInstance& f, const std::vector<double>& x) {
    const int n = f.n;
    std::vector<Scalar> p(x.begin(), x.end());
    Matrix M(n + 1, n + 1);
    for (int r = 0; r <= n; ++r) {
        for (int c = 0; c < n; ++c) M(r, c) = evaluate(differentiate(f.map[r], c), p);
        M(r, n) = evaluate(f.normal[r], p);
    }
    return M.determinant().real();
}

} // namespace

TEST_CASE("cusp normal form: lambda = 6t(t^2 + 1)") {
    auto f = ak_front_normal_form(1, 1);
    auto L = lambda(f, {0.0}, 3);
    std::vector<double> expect{0, 6, 0, 6};
    for (std::size_t i = 0; i < expect.size(); ++i) CHECK(std::abs(L[i] - expect[i]) < 1e-13);
}

TEST_CASE("A3 normal form: lambda = -2(6t^2 + x)(t^4 + t^2 + 1)") {
    auto f = ak_front_normal_form(2, 2);
    Expr t = Expr::variable(0), x = Expr::variable(1);
    Expr oracle = Expr::constant(-2.0) * (Expr::constant(6.0) * pow(t, 2) + x) *
                  (pow(t, 4) + pow(t, 2) + Expr::constant(1.0));
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> uni(-1, 1);
    for (int s = 0; s < 10; ++s) {
        Point p{uni(rng), uni(rng)};
        auto got = lambda(f, p, 4);
        auto want = eval_jet(oracle, p, 4);
        for (std::size_t i = 0; i < want.coefficients().size(); ++i) CHECK(std::abs(got[i] - want[i]) < 1e-11);
    }
}

TEST_CASE("A3 normal form: null field and second derivative at the origin") {
    auto f = ak_front_normal_form(2, 2);
    auto ch = lambda_chain(f, {0.0, 0.0}, 2);
    CHECK(std::abs(std::abs(ch.eta[0]) - 1.0) < 1e-14);
    CHECK(std::abs(ch.eta[1]) < 1e-14);
    CHECK(std::abs(ch.values[0]) < 1e-14);
    CHECK(std::abs(ch.values[1]) < 1e-14);
    CHECK(std::abs(ch.values[2].real() + 24.0) < 1e-12);
}

TEST_CASE("lambda jet agrees with finite differences of the determinant") {
    auto f = ak_front_normal_form(3, 3);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> uni(-0.8, 0.8);
    fd::Fn g = [&](const std::vector<double>& x) { return lambda_scalar(f, x); };
    for (int s = 0; s < 5; ++s) {
        std::vector<double> x{uni(rng), uni(rng), uni(rng)};
        auto L = lambda(f, {x[0], x[1], x[2]}, 2);
        const auto& layout = *L.space()->layout;
        for (std::size_t i = 1; i < layout.size(); ++i) {
            std::vector<int> alpha(3);
            double fact = 1.0;
            for (int v = 0; v < 3; ++v) {
                alpha[v] = layout.exponent(i, v);
                fact *= fd::factorial(alpha[v]);
            }
            double want = fd::richardson(g, x, alpha, 0.05);
            double got = L[i].real() * fact;
            CHECK(std::abs(got - want) <= 1e-6 * std::max(1.0, std::abs(want)));
        }
    }
}

TEST_CASE("null field is a unit kernel vector of the Jacobian") {
    auto f = ak_front_normal_form(3, 4);
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> uni(-1, 1);
    for (int s = 0; s < 10; ++s) {
        Point p{uni(rng), uni(rng), uni(rng), uni(rng)};
        auto L = front_local(f, p, 2, {});
        auto nf = null_field(L.jac, L.m, L.n, 1e-8, L.scale);
        double nrm = norm(values(nf.eta));
        CHECK(std::abs(nrm - 1.0) < 1e-13);
        // At singular points J eta = 0; everywhere the chosen rows annihilate eta.
        for (int r : nf.rows) {
            Scalar dot{};
            for (int c = 0; c < L.n; ++c) dot += L.jac[static_cast<std::size_t>(r * L.n + c)].value() * nf.eta[c].value();
            CHECK(std::abs(dot) < 1e-12 * L.scale);
        }
    }
}

TEST_CASE("corank two is reported") {
    FrontInstance f;
    f.n = 2;
    f.vars = {"x", "y"};
    Expr x = Expr::variable(0), y = Expr::variable(1);
    f.map = {pow(x, 2), pow(y, 2), x * y};
    f.normal = {Expr::constant(0.0), Expr::constant(0.0), Expr::constant(1.0)};
    CHECK_THROWS_AS(lambda_chain(f, {0.0, 0.0}, 2), CorankTooHigh);
}

TEST_CASE("derived plane normal of the cusp (t^2, t^3)") {
    FrontInstance f;
    f.n = 1;
    f.vars = {"t"};
    Expr t = Expr::variable(0);
    f.map = {pow(t, 2), pow(t, 3)};
    int shift = -1;
    auto nu = derive_plane_normal(f, {0.0}, 3, {}, &shift);
    CHECK(shift == 1);
    // nu = (-3t, 2)
    CHECK(std::abs(nu[0][0]) < 1e-14);
    CHECK(std::abs(nu[0][1] + 3.0) < 1e-14);
    CHECK(std::abs(nu[1][0] - 2.0) < 1e-14);
    CHECK(std::abs(nu[1][1]) < 1e-14);
}

TEST_CASE("lambda chain preconditions") {
    auto f = ak_front_normal_form(1, 2);
    CHECK_THROWS_AS(lambda_chain(f, {0.0}, 1), PreconditionError);
    CHECK_THROWS_AS(lambda_chain(f, {0.0, 0.0}, 3), PreconditionError);
    Tolerances low;
    low.jet_order = 2;
    CHECK_THROWS_AS(lambda_chain(f, {0.0, 0.0}, 2, low), OrderExhausted);
    CHECK_THROWS_AS(lambda(f, {0.0, 0.0}, -1), PreconditionError);
}

TEST_CASE("numerical rank and null space") {
    Matrix m(2, 3);
    m << 1, 2, 3, 2, 4, 6;
    auto r = numerical_rank(m, 1e-6, 0.0);
    CHECK(r.rank == 1);
    auto N = null_space(m, Field::Real, 1e-6, 0.0);
    CHECK(N.cols() == 2);
    CHECK((m * N).norm() < 1e-12);
    Matrix tiny = Matrix::Identity(2, 2) * 1e-12;
    CHECK(numerical_rank(tiny, 1e-6, 0.0).rank == 2);
    CHECK(numerical_rank(tiny, 1e-6, 1e-8).rank == 0);
    Matrix bad(1, 1);
    bad(0, 0) = Scalar(NAN, 0);
    CHECK_THROWS_AS(numerical_rank(bad, 1e-6, 0.0), NumericError);
}

TEST_CASE("bands") {
    CHECK(band(1e-9, 1e-8, 1.0) == Band::Vanishes);
    CHECK(band(5e-8, 1e-8, 1.0) == Band::Ambiguous);
    CHECK(band(1e-7, 1e-8, 1.0) == Band::Nonzero);
    CHECK(band(5e-8, 1e-8, 10.0) == Band::Vanishes);
}
