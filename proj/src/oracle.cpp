#include "wavefront/oracle.hpp"

#include "wavefront/core.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>

namespace wavefront {

FrontInstance ak_front_normal_form(int k, int n) {
    if (k < 1 || k > n) throw PreconditionError("A_{k+1} normal form needs 1 <= k <= n");
    FrontInstance f;
    f.name = "a" + std::to_string(k + 1) + "_front_n" + std::to_string(n);
    f.n = n;
    f.vars.push_back("t");
    for (int j = 2; j <= n; ++j) f.vars.push_back("x" + std::to_string(j));
    Expr t = Expr::variable(0);
    auto x = [](int j) { return Expr::variable(j - 1); };
    auto c = [](double v) { return Expr::constant(v); };
    Expr f1 = c(k + 1) * pow(t, k + 2);
    Expr f2 = c(-(k + 2)) * pow(t, k + 1);
    for (int j = 2; j <= k; ++j) {
        f1 = f1 + c(j - 1) * pow(t, j) * x(j);
        f2 = f2 - c(j) * pow(t, j - 1) * x(j);
    }
    f.map = {f1, f2};
    for (int j = 2; j <= n; ++j) f.map.push_back(x(j));
    f.normal = {c(1), t};
    for (int j = 2; j <= n; ++j) f.normal.push_back(j <= k ? pow(t, j) : c(0));
    return f;
}

MorinMapInstance morin_normal_form(int k, int n) {
    if (k < 1) throw PreconditionError("A_k Morin normal form needs k >= 1 (k = 0 is a regular point)");
    if (k > n) throw PreconditionError("A_k Morin normal form needs k <= n");
    MorinMapInstance m;
    m.name = "a" + std::to_string(k) + "_morin_n" + std::to_string(n);
    m.n = n;
    m.vars = default_names("z", n);
    Expr zn = Expr::variable(n - 1);
    Expr mu = pow(zn, k + 1);
    Expr lower = Expr::constant(0.0);
    for (int i = 1; i <= k - 1; ++i) lower = lower + Expr::variable(i - 1) * pow(zn, i);
    m.map.push_back(lower + mu);
    for (int i = 1; i <= n - 1; ++i) m.map.push_back(Expr::variable(i - 1));
    return m;
}

namespace {

Expr det3(const std::vector<std::vector<Expr>>& m) {
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

} // namespace

FrontInstance tangent_developable_fixture(const std::vector<Expr>& gamma, unsigned seed) {
    if (gamma.size() != 4) throw PreconditionError("gamma needs four components");
    std::vector<std::vector<Expr>> d(5); // d[k][r] = r-th component of the k-th derivative
    d[0] = gamma;
    for (int k = 1; k <= 4; ++k)
        for (const auto& e : d[k - 1]) d[k].push_back(differentiate(e, 0));

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (int s = 0; s < 20; ++s) {
        Scalar z = uni(rng);
        Eigen::Matrix4cd m;
        for (int k = 1; k <= 4; ++k)
            for (int r = 0; r < 4; ++r) m(r, k - 1) = evaluate(d[k][r], std::span<const Scalar>(&z, 1));
        if (std::abs(m.determinant()) <= 1e-9)
            throw PreconditionError("gamma', gamma'', gamma''', gamma'''' are linearly dependent at z = " +
                                    std::to_string(z.real()));
    }

    FrontInstance f;
    f.name = "tangent_developable";
    f.n = 3;
    f.vars = {"z", "u", "v"};
    Expr u = Expr::variable(1), v = Expr::variable(2);
    for (int r = 0; r < 4; ++r) f.map.push_back(d[0][r] + u * d[1][r] + v * d[2][r]);
    // Generalized cross product of the columns gamma', gamma'', gamma'''.
    for (int r = 0; r < 4; ++r) {
        std::vector<std::vector<Expr>> minor;
        for (int q = 0; q < 4; ++q) {
            if (q == r) continue;
            minor.push_back({d[1][q], d[2][q], d[3][q]});
        }
        Expr c = det3(minor);
        f.normal.push_back(r % 2 == 0 ? c : -c);
    }
    return f;
}

MembershipVerdict versal_membership(int k, const std::vector<Scalar>& u, double tol, Field field) {
    if (k < 0) throw PreconditionError("k must be >= 0");
    if (static_cast<int>(u.size()) != k + 1) throw PreconditionError("need coefficients u_0..u_k");
    for (const auto& c : u)
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) throw NumericError("non-finite coefficient");
    double scale = 1.0;
    for (const auto& c : u) scale = std::max(scale, std::abs(c));

    // F(t) = t^{k+2} + sum_{j>=1} u_j t^j + u_0 ; F_t = (k+2) t^{k+1} + sum_{j>=1} j u_j t^{j-1}.
    auto F = [&](Scalar t) {
        Scalar s = std::pow(t, k + 2);
        for (int j = 0; j <= k; ++j) s += u[j] * std::pow(t, j);
        return s;
    };
    auto Ft = [&](Scalar t) {
        Scalar s = double(k + 2) * std::pow(t, k + 1);
        for (int j = 1; j <= k; ++j) s += double(j) * u[j] * std::pow(t, j - 1);
        return s;
    };
    auto Ftt = [&](Scalar t) {
        Scalar s = double((k + 2) * (k + 1)) * std::pow(t, k);
        for (int j = 2; j <= k; ++j) s += double(j * (j - 1)) * u[j] * std::pow(t, j - 2);
        return s;
    };

    // Companion matrix of the monic F_t / (k+2), degree k+1.
    const int deg = k + 1;
    Matrix comp = Matrix::Zero(deg, deg);
    for (int i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
    for (int i = 0; i < deg; ++i) {
        // coefficient of t^i in F_t / (k+2)
        Scalar a = (i + 1 <= k) ? double(i + 1) * u[i + 1] / double(k + 2) : Scalar{};
        comp(i, deg - 1) = -a;
    }
    Eigen::ComplexEigenSolver<Matrix> es(comp, false);
    MembershipVerdict best;
    best.tol = tol;
    double best_res = INFINITY;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        Scalar t = es.eigenvalues()[i];
        if (field == Field::Real) {
            if (std::abs(t.imag()) > 1e-6 * (1.0 + std::abs(t))) continue;
            t = t.real();
        }
        for (int it = 0; it < 2; ++it) {
            Scalar d = Ftt(t);
            if (std::abs(d) == 0.0) break;
            Scalar next = t - Ft(t) / d;
            if (field == Field::Real) next = next.real();
            if (std::abs(Ft(next)) <= std::abs(Ft(t))) t = next;
        }
        double rf = std::abs(F(t)), rft = std::abs(Ft(t));
        double res = std::max(rf, rft);
        if (res < best_res) {
            best_res = res;
            best.witness = t;
            best.residual_f = rf;
            best.residual_ft = rft;
        }
    }
    if (!std::isfinite(best_res)) {
        // No admissible root of F_t: report F at t = 0 as a (large) residual.
        best.residual_f = std::abs(F(0.0));
        best.residual_ft = std::abs(Ft(0.0));
        best.inside = false;
        return best;
    }
    best.inside = best.residual_f <= tol * scale && best.residual_ft <= tol * scale;
    return best;
}

namespace {

// f and nu as jets in t (order 2) with the other source coordinates fixed to Y.
struct LineJets {
    std::vector<Jet> f, nu;
};

LineJets line_jets(const FrontInstance& front, const Point& target, Scalar t, int null_index, int order) {
    const int n = front.n;
    auto space = JetSpace::make(Point{t}, order, front.field);
    std::vector<Jet> inputs;
    for (int v = 0, y = 0; v < n; ++v) {
        if (v == null_index)
            inputs.push_back(Jet::variable(space, 0));
        else
            inputs.push_back(Jet::constant(space, target[static_cast<std::size_t>(2 + y++)]));
    }
    return {evaluate(front.map, inputs), evaluate(front.normal, inputs)};
}

} // namespace

PhiValue phi_unfolding(const FrontInstance& front, const Point& target, Scalar t, int null_index) {
    if (!front.has_normal()) throw PreconditionError("phi_unfolding needs a normal field");
    if (static_cast<int>(target.size()) != front.n + 1) throw PreconditionError("target point must lie in K^{n+1}");
    auto L = line_jets(front, target, t, null_index, 1);
    Jet phi = Jet::constant(L.f[0].space(), Scalar{});
    for (int r = 0; r <= front.n; ++r) phi += L.nu[r] * (L.f[r] - target[static_cast<std::size_t>(r)]);
    return {phi.value(), phi.partial(0)};
}

void check_phi_chart(const FrontInstance& front, int null_index, unsigned seed) {
    if (!front.has_normal()) throw PreconditionError("phi chart needs a normal field");
    const int n = front.n;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (int s = 0; s < 10; ++s) {
        Point x(static_cast<std::size_t>(n));
        for (auto& c : x) c = uni(rng);
        auto space = JetSpace::make(x, 1, front.field);
        std::vector<Jet> vars;
        for (int v = 0; v < n; ++v) vars.push_back(Jet::variable(space, v));
        auto f = evaluate(front.map, vars);
        auto nu = evaluate(front.normal, vars);
        for (int v = 0, y = 0; v < n; ++v) {
            if (v == null_index) continue;
            if (std::abs(f[static_cast<std::size_t>(2 + y)].value() - x[v]) > 1e-12)
                throw PreconditionError("phi chart: target component " + std::to_string(3 + y) +
                                        " does not equal the source coordinate");
            ++y;
        }
        Scalar dot{};
        for (int r = 0; r <= n; ++r) dot += f[r].partial(null_index) * nu[r].value();
        if (std::abs(dot) > 1e-9) throw PreconditionError("phi chart: null coordinate is not orthogonal to nu");
    }
}

MembershipVerdict phi_membership(const FrontInstance& front, const Point& target, double t_lo, double t_hi, double tol,
                                 int null_index) {
    MembershipVerdict best;
    best.tol = tol;
    double scale = 1.0;
    for (const auto& c : target) scale = std::max(scale, std::abs(c));
    double best_res = INFINITY;
    constexpr int seeds = 41;
    auto consider = [&](Scalar t) {
        PhiValue v = phi_unfolding(front, target, t, null_index);
        double res = std::max(std::abs(v.phi), std::abs(v.phi_t));
        if (res < best_res) {
            best_res = res;
            best.witness = t;
            best.residual_f = std::abs(v.phi);
            best.residual_ft = std::abs(v.phi_t);
        }
    };
    for (int s = 0; s < seeds; ++s) {
        Scalar t = t_lo + (t_hi - t_lo) * s / (seeds - 1);
        consider(t);
        // Newton on Phi_t = 0.
        for (int it = 0; it < 30; ++it) {
            auto L = line_jets(front, target, t, null_index, 2);
            Jet phi = Jet::constant(L.f[0].space(), Scalar{});
            for (int r = 0; r <= front.n; ++r) phi += L.nu[r] * (L.f[r] - target[static_cast<std::size_t>(r)]);
            Scalar d1 = phi[1], d2 = 2.0 * phi[2];
            if (std::abs(d2) == 0.0) break;
            Scalar step = d1 / d2;
            if (front.field == Field::Real) step = step.real();
            t -= step;
            if (std::abs(t) > 4.0 * std::max(std::abs(t_lo), std::abs(t_hi))) break;
            if (std::abs(step) <= 1e-15 * (1.0 + std::abs(t))) break;
        }
        if (std::isfinite(t.real())) consider(t);
    }
    best.inside = best.residual_f <= tol * scale && best.residual_ft <= tol * scale;
    return best;
}

} // namespace wavefront
