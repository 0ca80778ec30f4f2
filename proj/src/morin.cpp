#include "wavefront/morin.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <random>

namespace wavefront {

namespace {

using Clock = std::chrono::steady_clock;
using LambdaOf = std::function<Jet(const std::vector<Jet>&)>;

std::vector<Jet> variables(const JetSpacePtr& space) {
    std::vector<Jet> v;
    for (int i = 0; i < space->nvars(); ++i) v.push_back(Jet::variable(space, i));
    return v;
}

std::vector<std::vector<Expr>> jacobian_exprs(const std::vector<Expr>& map, int n) {
    std::vector<std::vector<Expr>> out(map.size());
    for (std::size_t r = 0; r < map.size(); ++r)
        for (int c = 0; c < n; ++c) out[r].push_back(differentiate(map[r], c));
    return out;
}

// Row-major jets of the Jacobian expressions evaluated on `x`.
std::vector<Jet> eval_matrix(const std::vector<std::vector<Expr>>& m, const std::vector<Jet>& x) {
    std::vector<Jet> out;
    for (const auto& row : m) {
        auto v = evaluate(row, x);
        out.insert(out.end(), v.begin(), v.end());
    }
    return out;
}

// Determinant of the square matrix made of the listed columns of a row-major rows x cols jet matrix,
// with row `skip` removed (skip < 0 keeps all rows). Extra columns are appended at the end.
Jet column_minor(const std::vector<Jet>& m, int rows, int cols, const std::vector<int>& pick, int skip,
                 const std::vector<const std::vector<Jet>*>& extra = {}) {
    std::vector<Jet> entries;
    for (int r = 0; r < rows; ++r) {
        if (r == skip) continue;
        for (int c : pick) entries.push_back(m[static_cast<std::size_t>(r * cols + c)]);
        for (const auto* e : extra) entries.push_back((*e)[static_cast<std::size_t>(r)]);
    }
    const int size = rows - (skip >= 0 ? 1 : 0);
    return determinant(entries, size);
}

SingularChart build_chart(const LambdaOf& lambda_of, const Point& p, Field field, int order, const Tolerances& tol) {
    const int n = static_cast<int>(p.size());
    auto sx = JetSpace::make(p, 1, field);
    Jet l1 = lambda_of(variables(sx));
    Vector g(n);
    for (int i = 0; i < n; ++i) g[i] = l1.partial(i);
    double scale = 1.0;
    for (int i = 0; i < n; ++i) scale = std::max(scale, std::abs(g[i]));
    if (g.norm() <= tol.tol_zero * scale)
        throw PreconditionError("d(lambda) vanishes at p: the point is not 1-nondegenerate, S(f) has no chart");

    SingularChart ch;
    ch.basis = null_space(g.transpose(), field, tol.tol_rank, 0.0);
    ch.w = g.conjugate() / g.squaredNorm();
    auto sy = JetSpace::make(Point(static_cast<std::size_t>(n - 1), Scalar{}), order, field);
    auto y = variables(sy);
    Jet h = Jet::constant(sy, Scalar{});
    auto chart = [&](const Jet& hh) {
        std::vector<Jet> x;
        for (int i = 0; i < n; ++i) {
            Jet xi = Jet::constant(sy, p[static_cast<std::size_t>(i)]) + hh * ch.w[i];
            for (int j = 0; j < n - 1; ++j) xi += y[static_cast<std::size_t>(j)] * ch.basis(i, j);
            x.push_back(std::move(xi));
        }
        return x;
    };
    // Chord iteration h <- h - lambda(x(y)): d(lambda)(w) = 1, so each pass fixes one more order.
    Jet residual;
    for (int it = 0; it <= order + 1; ++it) {
        residual = lambda_of(chart(h));
        h -= residual;
    }
    residual = lambda_of(chart(h));
    for (auto c : residual.coefficients())
        if (!std::isfinite(c.real()) || std::abs(c) > 1e-9 * scale)
            throw NumericError("S(f) chart: lambda does not vanish on the constructed parametrization");
    ch.x = chart(h);
    return ch;
}

FrontInstance polynomial_front(const std::string& name, int n, Field field, const std::vector<Jet>& map,
                               const std::vector<Jet>& normal) {
    FrontInstance f;
    f.name = name;
    f.n = n;
    f.vars = default_names("y", n);
    f.field = field;
    for (const auto& j : map) f.map.push_back(taylor_polynomial(j));
    for (const auto& j : normal) f.normal.push_back(taylor_polynomial(j));
    return f;
}

void combinations(int m, int k, int start, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
    if (static_cast<int>(cur.size()) == k) {
        out.push_back(cur);
        return;
    }
    for (int i = start; i < m; ++i) {
        cur.push_back(i);
        combinations(m, k, i + 1, cur, out);
        cur.pop_back();
    }
}

} // namespace

MorinReport classify_morin(const MorinMapInstance& map, const Point& p, const Tolerances& tol, int k_max) {
    auto t0 = Clock::now();
    const int n = map.n;
    if (k_max < 0) k_max = n;
    if (k_max > n) throw PreconditionError("k_max must lie in [0, n]");
    MorinReport rep;
    rep.point = p;
    rep.tol = tol;
    const int order = chain_order(std::max(k_max, 1), tol);
    auto local = map_local(map.map, n, map.field, p, order);
    auto done = [&](SingularityClass c) {
        rep.cls = std::move(c);
        rep.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
        return rep;
    };
    if (band(local.lambda.value(), tol.tol_zero, local.scale) == Band::Nonzero) {
        auto field = null_field(local.jac, n, n, tol.tol_zero, local.scale);
        rep.chain = make_chain(local, field, k_max);
        return done(SingularityClass::regular());
    }
    NullField field;
    try {
        field = null_field(local.jac, n, n, tol.tol_zero, local.scale);
    } catch (const CorankTooHigh& e) {
        rep.note = e.what();
        return done(SingularityClass::corank());
    }
    rep.chain = make_chain(local, field, k_max);
    return done(decide_chain(*rep.chain, k_max, tol, &rep.rank));
}

SingularityClass as_front_class(const SingularityClass& morin) {
    if (morin.is_a(1)) return SingularityClass::regular();
    return morin;
}

MorinMapInstance conjugate_map(const MorinMapInstance& map, const std::vector<Expr>& psi, const Matrix& affine,
                               const std::vector<Scalar>& shift, const Point& base) {
    const int n = map.n;
    if (static_cast<int>(psi.size()) != n) throw PreconditionError("source diffeomorphism needs n components");
    if (affine.rows() != n || affine.cols() != n || static_cast<int>(shift.size()) != n)
        throw PreconditionError("target affine map must be n x n with an n-vector shift");
    auto space = JetSpace::make(base, 1, map.field);
    auto ps = evaluate(psi, variables(space));
    Matrix dpsi(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) dpsi(i, j) = ps[i].partial(j);
    if (std::abs(dpsi.determinant()) <= 1e-12) throw PreconditionError("source diffeomorphism has a singular Jacobian at the base point");
    if (!Eigen::FullPivLU<Matrix>(affine).isInvertible()) throw PreconditionError("target affine map is not invertible");
    MorinMapInstance out = map;
    out.name = map.name + "_conj";
    out.map.clear();
    std::vector<Expr> composed;
    for (const auto& e : map.map) composed.push_back(substitute(e, psi));
    for (int r = 0; r < n; ++r) {
        Expr sum = Expr::constant(shift[static_cast<std::size_t>(r)]);
        for (int k = 0; k < n; ++k)
            if (affine(r, k) != Scalar{}) sum = sum + Expr::constant(affine(r, k)) * composed[static_cast<std::size_t>(k)];
        out.map.push_back(sum);
    }
    return out;
}

MapConjugation random_map_conjugation(int n, const Point& base, unsigned long long seed) {
    MapConjugation c;
    c.psi = random_conjugation(n, base, seed).source_diffeo;
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (;;) {
        Eigen::MatrixXd a(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) a(i, j) = unit(rng);
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
        const auto& s = svd.singularValues();
        if (s[n - 1] > 0 && s[0] / s[n - 1] <= 20.0) {
            c.affine = a.cast<Scalar>();
            break;
        }
    }
    for (int i = 0; i < n; ++i) c.shift.push_back(unit(rng));
    return c;
}

FrontInstance restrict_morin_to_front(const MorinMapInstance& map, const Point& p, const Tolerances& tol, int order) {
    const int n = map.n;
    if (n < 2) throw PreconditionError("restriction to S(f) needs n >= 2 (S(f) is a point for n = 1)");
    if (static_cast<int>(p.size()) != n) throw PreconditionError("point dimension does not match the map");
    if (order < 0) order = n + 3;
    auto jac = jacobian_exprs(map.map, n);
    LambdaOf lambda_of = [&](const std::vector<Jet>& x) { return determinant(eval_matrix(jac, x), n); };

    // Corank one at p, with a clear gap: sigma_{n-1} >= 10 sigma_n.
    auto local = map_local(map.map, n, map.field, p, 1);
    if (band(local.lambda.value(), tol.tol_zero, local.scale) != Band::Vanishes)
        throw PreconditionError("p is not a singular point of the map");
    Matrix J(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) J(r, c) = local.jac[static_cast<std::size_t>(r * n + c)].value();
    Eigen::JacobiSVD<Matrix> svd(J);
    const auto& s = svd.singularValues();
    if (s[n - 2] < 10.0 * s[n - 1] || s[n - 2] <= tol.tol_zero * local.scale)
        throw CorankTooHigh("normal direction is numerically ambiguous: sigma_{n-1} / sigma_n below 10");

    auto chart = build_chart(lambda_of, p, map.field, order, tol);
    auto g = evaluate(map.map, chart.x);
    auto Jy = eval_matrix(jac, chart.x);

    // Left kernel of df: column i of the cofactor matrix, i chosen with the largest norm at p.
    int best = 0;
    double best_norm = -1.0;
    std::vector<std::vector<Jet>> cof(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        std::vector<int> pick;
        for (int c = 0; c < n; ++c)
            if (c != i) pick.push_back(c);
        for (int k = 0; k < n; ++k) {
            Jet m = column_minor(Jy, n, n, pick, k);
            cof[static_cast<std::size_t>(i)].push_back((k + i) % 2 == 0 ? m : -m);
        }
        double nrm = norm(values(cof[static_cast<std::size_t>(i)]));
        if (nrm > best_norm) {
            best_norm = nrm;
            best = i;
        }
    }
    if (best_norm <= tol.tol_zero * std::pow(local.scale, n - 1))
        throw CorankTooHigh("adjugate of the Jacobian vanishes at p");
    return polynomial_front(map.name + "_on_S", n - 1, map.field, g, cof[static_cast<std::size_t>(best)]);
}

ProjectionResult project_and_classify(const FrontInstance& front, const Point& p, const std::vector<double>& direction,
                                      const Tolerances& tol, int order) {
    const int n = front.n;
    if (n != 2 && n != 3) throw PreconditionError("normal projection is supported for n in {2, 3}");
    if (front.field != Field::Real) throw PreconditionError("orthogonal projection needs the real field");
    if (!front.has_normal()) throw PreconditionError("normal projection needs a normal field");
    if (static_cast<int>(direction.size()) != n + 1) throw PreconditionError("direction must lie in R^{n+1}");
    if (order < 0) order = n + 3;

    auto local = front_local(front, p, 1, tol);
    if (band(local.lambda.value(), tol.tol_zero, local.scale) != Band::Vanishes)
        throw PreconditionError("p is not a singular point of the front");
    Vector d(n + 1), nu0(n + 1);
    for (int r = 0; r <= n; ++r) {
        d[r] = direction[static_cast<std::size_t>(r)];
        nu0[r] = local.nu[static_cast<std::size_t>(r)].value();
    }
    if (d.norm() == 0.0) throw PreconditionError("direction is zero");
    const double cosine = std::abs(d.dot(nu0).real()) / (d.norm() * nu0.norm());
    if (cosine < 0.1) throw PreconditionError("direction is too close to the tangent hyperplane nu(p)^perp");

    auto jac = jacobian_exprs(front.map, n);
    LambdaOf lambda_of = [&](const std::vector<Jet>& x) {
        auto J = eval_matrix(jac, x);
        auto nu = evaluate(front.normal, x);
        std::vector<Jet> entries;
        for (int r = 0; r <= n; ++r) {
            for (int c = 0; c < n; ++c) entries.push_back(J[static_cast<std::size_t>(r * n + c)]);
            entries.push_back(nu[static_cast<std::size_t>(r)]);
        }
        return determinant(entries, n + 1);
    };
    auto chart = build_chart(lambda_of, p, front.field, order, tol);
    auto f = evaluate(front.map, chart.x);
    auto J = eval_matrix(jac, chart.x);
    auto nu = evaluate(front.normal, chart.x);

    // zeta = (c_1, ..., c_{n-1}, nu) generalized cross product, using the n-1 columns of df that give
    // the largest value at p. zeta is orthogonal to df and independent of nu.
    std::vector<std::vector<int>> subsets;
    std::vector<int> cur;
    combinations(n, n - 1, 0, cur, subsets);
    std::vector<Jet> zeta;
    double best = -1.0;
    for (const auto& pick : subsets) {
        std::vector<Jet> z;
        for (int r = 0; r <= n; ++r) {
            Jet m = column_minor(J, n + 1, n, pick, r, {&nu});
            z.push_back(r % 2 == 0 ? m : -m);
        }
        double nrm = norm(values(z));
        if (nrm > best) {
            best = nrm;
            zeta = std::move(z);
        }
    }
    if (best <= tol.tol_zero * std::pow(local.scale, n - 1)) throw CorankTooHigh("df has rank below n-1 at p");

    // N = <zeta, d> nu - <nu, d> zeta is orthogonal to d and to df(T S(f)).
    auto space = f.front().space();
    Jet zd = Jet::constant(space, Scalar{}), nd = Jet::constant(space, Scalar{});
    for (int r = 0; r <= n; ++r) {
        zd += zeta[static_cast<std::size_t>(r)] * d[r];
        nd += nu[static_cast<std::size_t>(r)] * d[r];
    }
    std::vector<Jet> N;
    for (int r = 0; r <= n; ++r) N.push_back(zd * nu[static_cast<std::size_t>(r)] - nd * zeta[static_cast<std::size_t>(r)]);

    Matrix E = null_space(d.transpose(), Field::Real, tol.tol_rank, 0.0); // (n+1) x n, orthonormal
    std::vector<Jet> h, Nh;
    for (int i = 0; i < n; ++i) {
        Jet a = Jet::constant(space, Scalar{}), b = Jet::constant(space, Scalar{});
        for (int r = 0; r <= n; ++r) {
            a += f[static_cast<std::size_t>(r)] * E(r, i);
            b += N[static_cast<std::size_t>(r)] * E(r, i);
        }
        h.push_back(std::move(a));
        Nh.push_back(std::move(b));
    }
    ProjectionResult out;
    out.projected = polynomial_front(front.name + "_projected", n - 1, front.field, h, Nh);
    out.report = classify(out.projected, Point(static_cast<std::size_t>(n - 1), Scalar{}), Route::Both, tol);
    return out;
}

} // namespace wavefront
