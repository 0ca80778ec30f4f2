// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

#include "fd_oracle.hpp"
#include "fixtures.hpp"
#include "wavefront/cli.hpp"
#include "wavefront/morin.hpp"
#include "wavefront/oracle.hpp"
#include "wavefront/report.hpp"
#include "wavefront/zigzag.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

using namespace wavefront;
using Clock = std::chrono::steady_clock;

namespace {

constexpr double pi = std::numbers::pi;

struct Outcome {
    bool pass = true;
    std::string detail;
    std::vector<std::string> failures;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            if (failures.size() < 5) failures.push_back(what);
        }
    }
};

Point origin(int n) { return Point(static_cast<std::size_t>(n)); }

std::string str(double v) {
    std::ostringstream os;
    os.precision(3);
    os << v;
    return os.str();
}

// ---- scalar oracles built from symbolic derivatives, no jets ----

struct ScalarFront {
    const FrontInstance* f;
    std::vector<std::vector<Expr>> partials; // [row][col]

    explicit ScalarFront(const FrontInstance& front) : f(&front) {
        for (const auto& e : front.map) {
            std::vector<Expr> row;
            for (int c = 0; c < front.n; ++c) row.push_back(differentiate(e, c));
            partials.push_back(row);
        }
    }

    Eigen::MatrixXd jacobian(const std::vector<double>& x) const {
        std::vector<Scalar> p(x.begin(), x.end());
        Eigen::MatrixXd J(f->n + 1, f->n);
        for (int r = 0; r <= f->n; ++r)
            for (int c = 0; c < f->n; ++c) J(r, c) = evaluate(partials[r][c], p).real();
        return J;
    }

    double lambda(const std::vector<double>& x) const {
        std::vector<Scalar> p(x.begin(), x.end());
        Eigen::MatrixXd M(f->n + 1, f->n + 1);
        M.leftCols(f->n) = jacobian(x);
        for (int r = 0; r <= f->n; ++r) M(r, f->n) = evaluate(f->normal[r], p).real();
        return M.determinant();
    }

    // Signed (n-1)-minors of the chosen rows: the unnormalized null field.
    Eigen::VectorXd cofactors(const std::vector<double>& x, const std::vector<int>& rows) const {
        const int n = f->n;
        Eigen::VectorXd out(n);
        if (n == 1) {
            out(0) = 1.0;
            return out;
        }
        auto J = jacobian(x);
        for (int j = 0; j < n; ++j) {
            Eigen::MatrixXd M(n - 1, n - 1);
            for (int a = 0; a < n - 1; ++a)
                for (int c = 0, cc = 0; c < n; ++c)
                    if (c != j) M(a, cc++) = J(rows[static_cast<std::size_t>(a)], c);
            out(j) = (j % 2 == 0 ? 1.0 : -1.0) * M.determinant();
        }
        return out;
    }
};

// Flow of the extended null field by RK4, then lambda^{(i)}(p) = d^i/dtau^i lambda(phi_tau(p)) at 0.
double flow_derivative(const ScalarFront& sf, const std::vector<double>& p, const std::vector<int>& rows, double scale,
                       int order, double h) {
    std::map<long, double> memo;
    const double unit = h / 8;
    auto at = [&](double tau) {
        long key = std::lround(tau / unit);
        if (auto it = memo.find(key); it != memo.end()) return it->second;
        const int steps = std::max(1, static_cast<int>(std::ceil(std::abs(tau) / 5e-4)));
        const double dt = tau / steps;
        Eigen::Map<const Eigen::VectorXd> p0(p.data(), static_cast<Eigen::Index>(p.size()));
        Eigen::VectorXd y = p0;
        auto field = [&](const Eigen::VectorXd& x) {
            std::vector<double> v(x.data(), x.data() + x.size());
            return Eigen::VectorXd(sf.cofactors(v, rows) / scale);
        };
        for (int s = 0; s < steps; ++s) {
            Eigen::VectorXd k1 = field(y), k2 = field(y + dt / 2 * k1), k3 = field(y + dt / 2 * k2), k4 = field(y + dt * k3);
            y += dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
        }
        double v = sf.lambda(std::vector<double>(y.data(), y.data() + y.size()));
        memo[key] = v;
        return v;
    };
    if (order == 0) return at(0.0);
    return fd::derivative(at, 0.0, order, h);
}

// ---- criteria ----

Outcome criterion1() {
    Outcome o;
    double slowest = 0.0;
    for (int n = 1; n <= 4; ++n)
        for (int k = 1; k <= n; ++k) {
            auto f = ak_front_normal_form(k, n);
            auto t0 = Clock::now();
            auto r = classify_lambda_route(f, origin(n));
            double secs = std::chrono::duration<double>(Clock::now() - t0).count();
            slowest = std::max(slowest, secs);
            std::string tag = "(k=" + std::to_string(k) + ", n=" + std::to_string(n) + ")";
            o.require(r.cls.is_a(k + 1), tag + " class " + r.cls.label());
            o.require(secs < 1.0, tag + " took " + str(secs) + " s");
            if (!r.chain) {
                o.require(false, tag + " no chain");
                continue;
            }
            for (int i = 0; i < k; ++i)
                o.require(std::abs(r.chain->values[static_cast<std::size_t>(i)]) < 1e-8, tag + " lambda^(" + std::to_string(i) + ") not small");
            o.require(std::abs(r.chain->values[static_cast<std::size_t>(k)]) > 1e-2, tag + " lambda^(k) too small");
            o.require(r.rank.rank == k, tag + " rank " + std::to_string(r.rank.rank));
        }
    o.detail = "A_{k+1} for all 1 <= k <= n <= 4, slowest " + str(slowest) + " s";
    return o;
}

struct Sampled {
    std::string name;
    FrontInstance front;
    std::vector<double> lo, hi;
};

std::vector<Sampled> regular_point_fixtures() {
    std::vector<Sampled> out;
    for (int n = 1; n <= 3; ++n)
        for (int k = 1; k <= n; ++k)
            out.push_back({"ak(" + std::to_string(k) + "," + std::to_string(n) + ")", ak_front_normal_form(k, n),
                           std::vector<double>(static_cast<std::size_t>(n), -1.0),
                           std::vector<double>(static_cast<std::size_t>(n), 1.0)});
    for (std::string name : {"tangent_developable", "immersion"}) {
        auto f = fixture_front(name);
        out.push_back({name, f, std::vector<double>(static_cast<std::size_t>(f.n), -1.0),
                       std::vector<double>(static_cast<std::size_t>(f.n), 1.0)});
    }
    for (std::string name : {"astroid", "deltoid", "cusp_pair", "twelve_signs", "lips"})
        out.push_back({name, fixture_front(name), {0.0}, {2 * pi}});
    return out;
}

Outcome criterion2() {
    Outcome o;
    std::mt19937_64 rng(2024);
    int total = 0;
    auto fixtures = regular_point_fixtures();
    for (const auto& fx : fixtures) {
        int taken = 0, guard = 0;
        while (taken < 50 && guard++ < 5000) {
            Point p;
            for (std::size_t i = 0; i < fx.lo.size(); ++i)
                p.push_back(std::uniform_real_distribution<double>(fx.lo[i], fx.hi[i])(rng));
            if (std::abs(lambda(fx.front, p, 0)[0]) <= 0.01) continue;
            ++taken;
            auto r = classify(fx.front, p, Route::Both);
            o.require(r.cls == SingularityClass::regular(), fx.name + " at a regular point: " + r.cls.label());
        }
        o.require(taken == 50, fx.name + ": only " + std::to_string(taken) + " samples");
        total += taken;
    }
    o.detail = std::to_string(total) + " points on " + std::to_string(fixtures.size()) + " fixtures";
    return o;
}

Outcome criterion3() {
    Outcome o;
    Expr z = Expr::variable(0);
    auto f = tangent_developable_fixture({z, pow(z, 2), pow(z, 3), pow(z, 4)});
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> uni(-1, 1);
    double worst_lambda = 0.0, worst_angle = 0.0;
    for (int s = 0; s < 100; ++s) {
        const double zz = uni(rng), u = uni(rng);
        Point p{zz, u, 0.0};
        worst_lambda = std::max(worst_lambda, std::abs(lambda(f, p, 0)[0]));
        auto eta = extended_null_field(f, p, 0);
        Eigen::Vector3d e(eta[0].value().real(), eta[1].value().real(), eta[2].value().real());
        Eigen::Vector3d want(-1.0, 1.0, u);
        double angle = std::asin(std::min(1.0, e.cross(want).norm() / (e.norm() * want.norm())));
        worst_angle = std::max(worst_angle, angle);
    }
    o.require(worst_lambda < 1e-9, "max |lambda| on v = 0 is " + str(worst_lambda));
    o.require(worst_angle < 1e-6, "max angle to (-1, 1, u) is " + str(worst_angle));
    // off the plane v = 0 lambda does not vanish
    o.require(std::abs(lambda(f, {0.2, 0.1, 0.3}, 0)[0]) > 1e-3, "lambda vanishes off v = 0");
    auto a2 = classify(f, {0.5, 0.3, 0.0}, Route::Both);
    auto a3 = classify(f, {0.5, 0.0, 0.0}, Route::Both);
    o.require(a2.cls.is_a(2), "(0.5, 0.3, 0): " + a2.cls.label());
    o.require(a3.cls.is_a(3), "(0.5, 0, 0): " + a3.cls.label());
    o.detail = "max |lambda| " + str(worst_lambda) + ", max angle " + str(worst_angle) + ", " + a2.cls.label() + " / " +
               a3.cls.label();
    return o;
}

Outcome criterion4() {
    Outcome o;
    double worst = 0.0;
    for (int n = 1; n <= 4; ++n)
        for (int k = 1; k <= n; ++k) {
            auto r = classify_morin(morin_normal_form(k, n), origin(n));
            std::string tag = "(k=" + std::to_string(k) + ", n=" + std::to_string(n) + ")";
            o.require(r.cls.is_a(k), tag + " class " + r.cls.label());
            if (!r.chain || r.chain->values.size() <= static_cast<std::size_t>(k)) {
                o.require(false, tag + " no chain");
                continue;
            }
            const double want = fd::factorial(k + 1);
            const double err = std::abs(std::abs(r.chain->values[static_cast<std::size_t>(k)]) - want) / want;
            worst = std::max(worst, err);
            o.require(err < 1e-9, tag + " |lambda^(k)| relative error " + str(err));
        }
    o.detail = "A_k-Morin for all 1 <= k <= n <= 4, max relative error of |lambda^(k)| vs (k+1)! " + str(worst);
    return o;
}

Outcome criterion5() {
    Outcome o;
    int cases = 0;
    for (int n = 2; n <= 3; ++n)
        for (int k = 1; k <= n; ++k) {
            auto m = morin_normal_form(k, n);
            auto morin = classify_morin(m, origin(n));
            auto front = restrict_morin_to_front(m, origin(n));
            auto r = classify(front, origin(n - 1), Route::Both);
            o.require(r.cls == as_front_class(morin.cls),
                      "(k=" + std::to_string(k) + ", n=" + std::to_string(n) + ") Morin " + morin.cls.label() +
                          ", restriction " + r.cls.label());
            ++cases;
        }
    o.detail = std::to_string(cases) + " cases (n = 1 has a zero-dimensional S(f) and is skipped)";
    return o;
}

Outcome criterion6() {
    Outcome o;
    std::mt19937_64 rng(6);
    std::normal_distribution<double> g;
    int runs = 0, hits = 0;
    for (int n = 2; n <= 3; ++n)
        for (int k = 1; k <= 2; ++k) {
            auto f = ak_front_normal_form(k, n);
            auto local = front_local(f, origin(n), 1, {});
            Vector nu(n + 1);
            for (int r = 0; r <= n; ++r) nu[r] = local.nu[static_cast<std::size_t>(r)].value();
            for (int s = 0; s < 20;) {
                std::vector<double> d(static_cast<std::size_t>(n + 1));
                double dot = 0.0, nd = 0.0;
                for (int i = 0; i <= n; ++i) {
                    d[static_cast<std::size_t>(i)] = g(rng);
                    dot += nu[i].real() * d[static_cast<std::size_t>(i)];
                    nd += d[static_cast<std::size_t>(i)] * d[static_cast<std::size_t>(i)];
                }
                if (std::abs(dot) / (std::sqrt(nd) * nu.norm()) < 0.1) continue;
                ++s;
                ++runs;
                try {
                    auto res = project_and_classify(f, origin(n), d);
                    bool ok = res.report.cls == as_front_class(SingularityClass::a(k));
                    hits += ok;
                    o.require(ok, "(k=" + std::to_string(k) + ", n=" + std::to_string(n) + ") projected " +
                                      res.report.cls.label());
                } catch (const Error& e) {
                    o.require(false, e.what());
                }
            }
        }
    o.detail = std::to_string(hits) + "/" + std::to_string(runs) + " projections have the expected class";
    return o;
}

Outcome criterion7() {
    Outcome o;
    struct Case {
        std::string name;
        FrontInstance front;
        Point base;
    };
    std::vector<Case> cases;
    for (int n = 2; n <= 3; ++n)
        for (int k = 1; k <= n; ++k)
            cases.push_back({"ak(" + std::to_string(k) + "," + std::to_string(n) + ")", ak_front_normal_form(k, n), origin(n)});
    auto td = fixture_front("tangent_developable");
    cases.push_back({"tangent developable A2", td, {0.5, 0.3, 0.0}});
    cases.push_back({"tangent developable A3", td, {0.5, 0.0, 0.0}});
    int runs = 0;
    for (const auto& c : cases) {
        auto ref = classify(c.front, c.base, Route::Both);
        o.require(ref.cls.kind == SingularityClass::Kind::A, c.name + " unconjugated " + ref.cls.label());
        for (unsigned long long seed = 1; seed <= 100; ++seed) {
            ++runs;
            auto conj = random_conjugation(c.front.n, c.base, seed);
            auto g = conjugate_front(c.front, conj, c.base);
            auto l = classify(g, c.base, Route::Lambda);
            auto m = classify(g, c.base, Route::Mu);
            o.require(l.cls == m.cls && l.cls == ref.cls, c.name + " seed " + std::to_string(seed) + ": lambda " +
                                                              l.cls.label() + ", mu " + m.cls.label());
        }
    }
    o.detail = std::to_string(runs) + " conjugations over " + std::to_string(cases.size()) + " fixtures";
    return o;
}

Outcome criterion8() {
    Outcome o;
    std::vector<FrontInstance> fronts;
    for (auto [k, n] : std::vector<std::pair<int, int>>{{1, 1}, {1, 2}, {2, 2}, {2, 3}, {3, 3}})
        fronts.push_back(ak_front_normal_form(k, n));
    fronts.push_back(fixture_front("tangent_developable"));
    fronts.push_back(conjugate_front(fronts[2], random_conjugation(2, origin(2), 8), origin(2)));
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> uni(-0.7, 0.7);
    double worst = 0.0;
    int points = 0;
    for (int s = 0; s < 50; ++s) {
        const auto& f = fronts[static_cast<std::size_t>(s) % fronts.size()];
        ScalarFront sf(f);
        // Newton onto S(f) along grad lambda, then a small random offset.
        Point p;
        for (int i = 0; i < f.n; ++i) p.push_back(uni(rng));
        for (int it = 0; it < 30; ++it) {
            auto L = lambda(f, p, 1);
            double g2 = 0.0;
            for (int i = 0; i < f.n; ++i) g2 += std::norm(L[static_cast<std::size_t>(i + 1)]);
            if (g2 == 0.0) break;
            for (int i = 0; i < f.n; ++i) p[static_cast<std::size_t>(i)] -= L[0] * std::conj(L[static_cast<std::size_t>(i + 1)]) / g2;
        }
        for (auto& c : p) c += 1e-3 * uni(rng);
        std::vector<Scalar> values;
        std::vector<int> rows;
        try {
            auto L = front_local(f, p, 5);
            auto field = null_field(L.jac, L.m, L.n, Tolerances{}.tol_zero, L.scale);
            values = wavefront::values(chain_jets(L.lambda, field.eta, 3));
            rows = field.rows;
        } catch (const Error& e) {
            o.require(false, std::string("chain: ") + e.what());
            continue;
        }
        std::vector<double> x;
        for (const auto& c : p) x.push_back(c.real());
        const double scale = sf.cofactors(x, rows).norm();
        ++points;
        for (int i = 0; i <= 3; ++i) {
            const double want = flow_derivative(sf, x, rows, scale, i, 0.01);
            const double got = values[static_cast<std::size_t>(i)].real();
            const double err = std::abs(got - want) / std::max(std::abs(want), 1.0);
            worst = std::max(worst, err);
            o.require(err <= 1e-5, f.name + " lambda^(" + std::to_string(i) + "): jet " + str(got) + ", oracle " + str(want));
        }
    }
    o.detail = std::to_string(points) + " near-singular points, max relative error " + str(worst);
    return o;
}

Outcome criterion9() {
    Outcome o;
    struct LoopCase {
        std::string front, loop;
        bool plane;
    };
    std::vector<LoopCase> cases{{"circle", "circle", true},           {"astroid", "shifted", true},
                                {"hypocycloid6", "shifted", true},    {"cusp_pair", "circle", true},
                                {"ellipse_parallel", "circle", true}, {"lips", "shifted", true},
                                {"twelve_signs", "twelve_signs", true}, {"twelve_signs_cylinder", "twelve_signs_cylinder", false},
                                {"astroid_cylinder", "astroid_cylinder", false}};
    std::ostringstream detail;
    int consistent = 0, perturbed = 0;
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> amp(-0.01, 0.01);
    Expr s = Expr::variable(0);
    for (const auto& c : cases) {
        auto front = fixture_front(c.front);
        auto loop = fixture_loop(c.loop);
        ZigzagReport r;
        try {
            r = analyze_loop(front, loop);
        } catch (const Error& e) {
            o.require(false, c.front + ": " + e.what());
            continue;
        }
        if (!r.sequence || !r.maslov) {
            o.require(false, c.front + ": no sequence or rotation index");
            continue;
        }
        const int z = r.sequence->z;
        o.require(std::abs(*r.maslov) == z, c.front + ": |mu| = " + std::to_string(std::abs(*r.maslov)) + ", z = " + std::to_string(z));
        consistent += std::abs(*r.maslov) == z;
        if (c.front == "twelve_signs") {
            std::string norm;
            for (int e : r.sequence->normalized) norm += e > 0 ? '+' : '-';
            o.require(norm == "+-+-" && z == 2, "twelve-sign curve normalized to " + norm);
        }
        if (c.front == "circle") o.require(z == 0 && *r.maslov == 0, "circle: z or mu nonzero");
        if (c.front == "lips") o.require(z == 0 && *r.maslov == 0, "Morin front lips: z or mu nonzero");
        detail << c.front << " z=" << z << " ";
        // closed perturbations vanishing to first order at the base point
        Expr bump = pow(sin(Expr::constant(pi) * s), 2);
        for (int trial = 0; trial < 20; ++trial) {
            LoopSpec q = loop;
            const double a = amp(rng), b = amp(rng);
            const int k = 1 + trial % 3;
            Expr wave = Expr::constant(a) * bump * sin(Expr::constant(2 * pi * k) * s) + Expr::constant(b) * bump;
            q.map[0] = loop.map[0] + wave;
            if (!c.plane) q.map[1] = loop.map[1] + Expr::constant(b) * bump * cos(Expr::constant(2 * pi * k) * s);
            try {
                auto p = analyze_loop(front, q);
                o.require(p.sequence && p.sequence->z == z, c.front + " perturbation " + std::to_string(trial) + " changed z");
            } catch (const Error& e) {
                o.require(false, c.front + " perturbation " + std::to_string(trial) + ": " + e.what());
            }
            ++perturbed;
        }
    }
    // A second Morin front: the fold curve x^2/4 + 3y^2 = 1 of (x, y^3 + (x^2/4 - 1) y).
    auto morin_front = parse_front("front lips_wide\nvars t\n"
                                   "map (2*cos(t), (sin(t)/sqrt(3))^3 + (cos(t)^2 - 1)*sin(t)/sqrt(3))\n"
                                   "normal (-cos(t)*sin(t)/sqrt(3), 1)\n");
    auto wide = analyze_loop(morin_front, fixture_loop("shifted"));
    o.require(wide.sequence && wide.sequence->z == 0 && wide.maslov && *wide.maslov == 0, "Morin front lips_wide not trivial");
    o.detail = detail.str() + "| " + std::to_string(consistent) + "/" + std::to_string(cases.size()) +
               " with |mu| = z, " + std::to_string(perturbed) + " perturbed loops";
    return o;
}

Outcome criterion10() {
    Outcome o;
    auto f = ak_front_normal_form(2, 2);
    std::mt19937_64 rng(10);
    std::uniform_real_distribution<double> uni(-1, 1);
    double worst_in = 0.0, best_out = std::numeric_limits<double>::infinity();
    for (int s = 0; s < 200; ++s) {
        Point src{uni(rng), uni(rng)};
        Point X;
        for (const auto& e : f.map) X.push_back(evaluate(e, src));
        auto v = versal_membership(2, {X[0], X[1], X[2]});
        auto m = phi_membership(f, X, -2, 2);
        worst_in = std::max({worst_in, v.residual_f, v.residual_ft, m.residual_f, m.residual_ft});
        o.require(v.inside && m.inside, "image sample " + std::to_string(s) + " rejected");
    }
    int outside = 0;
    while (outside < 200) {
        const double t0 = uni(rng), x0 = uni(rng);
        if (x0 < -2 * t0 * t0) continue;
        Point src{t0, x0};
        Point X, nu;
        for (const auto& e : f.map) X.push_back(evaluate(e, src));
        double len = 0.0;
        for (const auto& e : f.normal) {
            nu.push_back(evaluate(e, src));
            len += std::norm(nu.back());
        }
        const double delta = 0.1 + 0.2 * (uni(rng) + 1) / 2;
        for (std::size_t i = 0; i < X.size(); ++i) X[i] += delta * nu[i] / std::sqrt(len);
        auto v = versal_membership(2, {X[0], X[1], X[2]});
        auto m = phi_membership(f, X, -2, 2);
        const double res = std::min(std::max(v.residual_f, v.residual_ft), std::max(m.residual_f, m.residual_ft));
        best_out = std::min(best_out, res);
        o.require(!v.inside && !m.inside, "offset point " + std::to_string(outside) + " accepted");
        ++outside;
    }
    o.require(worst_in <= 1e-6, "image residual " + str(worst_in));
    o.require(best_out >= 1e-3, "minimum offset residual " + str(best_out));
    o.detail = "max image residual " + str(worst_in) + ", min offset residual " + str(best_out);
    return o;
}

std::string run_cli_text(const std::vector<std::string>& args, int* code = nullptr) {
    std::ostringstream out, err;
    int c = run_cli(args, out, err);
    if (code) *code = c;
    return out.str();
}

Outcome criterion11() {
    Outcome o;
    auto fx = [](const std::string& f) { return std::string(FIXTURE_DIR) + "/" + f; };
    std::vector<std::vector<std::string>> commands{
        {"classify", fx("swallowtail.front"), "-p", "0,0"},
        {"classify", fx("tangent_developable.front"), "-p", "0.5,0,0"},
        {"scan", fx("swallowtail.front"), "-b", "-0.5,0.5", "--grid", "9"},
        {"zigzag", fx("twelve_signs.front"), fx("twelve_signs.loop")},
        {"zigzag", fx("astroid.front"), fx("shifted.loop"), "--format", "csv"},
        {"selfcheck"}};
    for (const auto& cmd : commands) {
        int c1 = 0, c2 = 0;
        auto a = run_cli_text(cmd, &c1), b = run_cli_text(cmd, &c2);
        o.require(a == b && c1 == c2 && !a.empty(), cmd[0] + " output differs between runs");
    }
    int emitted = 0;
    auto dir = std::filesystem::temp_directory_path() / "frontsing_acceptance";
    std::filesystem::create_directories(dir);
    for (int n = 1; n <= 4; ++n)
        for (int k = 1; k <= n; ++k) {
            std::string origin_text = "0";
            for (int i = 1; i < n; ++i) origin_text += ",0";
            for (std::string kind : {"ak-front", "morin"}) {
                auto text = run_cli_text({"fixture", kind, "-k", std::to_string(k), "-n", std::to_string(n)});
                ++emitted;
                auto path = (dir / (kind + ".def")).string();
                std::ofstream(path) << text;
                const std::string want = kind == "ak-front" ? "A" + std::to_string(k + 1) : "A" + std::to_string(k);
                if (kind == "ak-front") {
                    o.require(same_structure(parse_front(text), ak_front_normal_form(k, n)), kind + " does not round-trip");
                    o.require(to_text(parse_front(text)) == text, kind + " text is not a fixed point");
                } else {
                    o.require(to_text(parse_morin_map(text)) == text, kind + " text is not a fixed point");
                }
                auto report = Json::parse(run_cli_text({"classify", path, "-p", origin_text}));
                o.require(report["entries"][0]["class"]["label"] == want, kind + " reclassified as " +
                                                                             report["entries"][0]["class"]["label"].dump());
            }
        }
    auto td = run_cli_text({"fixture", "tangent-developable"});
    ++emitted;
    o.require(to_text(parse_front(td)) == td, "tangent developable text is not a fixed point");
    auto path = (dir / "td.front").string();
    std::ofstream(path) << td;
    auto r = Json::parse(run_cli_text({"classify", path, "-p", "0.5,0,0"}));
    o.require(r["entries"][0]["class"]["label"] == "A3", "tangent developable reclassified differently");
    o.detail = std::to_string(commands.size()) + " commands byte-identical, " + std::to_string(emitted) +
               " fixtures round-trip";
    return o;
}

} // namespace

int main() {
    std::vector<std::pair<std::string, Outcome (*)()>> criteria{
        {"normal-form recognition", criterion1},   {"regular-point soundness", criterion2},
        {"tangent developable example", criterion3}, {"Morin criterion", criterion4},
        {"Morin restriction correspondence", criterion5}, {"projection correspondence", criterion6},
        {"route agreement and invariance", criterion7}, {"jet correctness vs finite differences", criterion8},
        {"zig-zag numbers and rotation index", criterion9}, {"discriminant membership", criterion10},
        {"determinism and round-trip", criterion11}};
    // ACCEPTANCE_ONLY=<n> runs a single criterion.
    const char* only = std::getenv("ACCEPTANCE_ONLY");
    int failed = 0, ran = 0;
    const auto start = Clock::now();
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        if (only && std::atoi(only) != static_cast<int>(i + 1)) continue;
        auto t0 = Clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.pass = false;
            o.failures.push_back(std::string("uncaught: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
        std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << " (" << criteria[i].first << "): " << o.detail
                  << " [" << str(secs) << " s]\n";
        for (const auto& f : o.failures) std::cout << "    " << f << '\n';
        std::cout.flush();
        failed += !o.pass;
        ++ran;
    }
    std::cout << (failed ? "FAILED " : "ALL PASSED ") << ran - failed << "/" << ran << " in " << str(std::chrono::duration<double>(Clock::now() - start).count()) << " s\n";
    return failed ? 1 : 0;
}
