#include "wavefront/classifier.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

namespace wavefront {

std::string SingularityClass::label() const {
    switch (kind) {
    case Kind::Regular: return "Regular";
    case Kind::A: return "A" + std::to_string(index);
    case Kind::DegenerateAtOrder: return "DegenerateAtOrder(" + std::to_string(index) + ")";
    case Kind::CorankTooHigh: return "CorankTooHigh";
    case Kind::Inconclusive: return "Inconclusive";
    }
    return "?";
}

std::string to_string(Route r) {
    switch (r) {
    case Route::Lambda: return "lambda";
    case Route::Mu: return "mu";
    case Route::Both: return "both";
    }
    return "?";
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

const char* band_reason(int order) {
    static const char* msgs[] = {"|lambda| lies between the vanishing and nonzero bands",
                                 "|lambda'| lies between the vanishing and nonzero bands",
                                 "|lambda''| lies between the vanishing and nonzero bands"};
    return order < 3 ? msgs[order] : "a lambda-chain value lies between the vanishing and nonzero bands";
}

} // namespace

SingularityClass decide_chain(const LambdaChain& chain, int k_max, const Tolerances& tol, RankReport* rank) {
    const double scale = chain.scale;
    switch (band(chain.values[0], tol.tol_zero, scale)) {
    case Band::Nonzero: return SingularityClass::regular();
    case Band::Ambiguous: return SingularityClass::inconclusive(band_reason(0));
    case Band::Vanishes: break;
    }
    for (int j = 1; j <= k_max; ++j) {
        RankReport r = numerical_rank(chain.jacobian.topRows(j), tol.tol_rank, tol.tol_zero * scale);
        if (rank) *rank = r;
        if (r.rank < j) return SingularityClass::degenerate(j);
        switch (band(chain.values[static_cast<std::size_t>(j)], tol.tol_zero, scale)) {
        case Band::Nonzero: return SingularityClass::a(j);
        case Band::Ambiguous: return SingularityClass::inconclusive(band_reason(j));
        case Band::Vanishes: break;
        }
    }
    return SingularityClass::degenerate(k_max + 1);
}

ClassificationReport classify_lambda_route(const FrontInstance& front, const Point& p, const Tolerances& tol, int k_max) {
    auto t0 = Clock::now();
    if (k_max < 0) k_max = front.n;
    ClassificationReport rep;
    rep.point = p;
    rep.route = Route::Lambda;
    rep.tol = tol;
    const int order = chain_order(std::max(k_max, 1), tol);
    auto local = front_local(front, p, order, tol);
    if (band(local.lambda.value(), tol.tol_zero, local.scale) == Band::Nonzero) {
        // Regular points short-circuit; the chain is still reported when eta exists.
        try {
            auto field = null_field(local.jac, local.m, local.n, tol.tol_zero, local.scale);
            rep.chain = make_chain(local, field, k_max);
        } catch (const CorankTooHigh&) {
        }
        rep.cls = SingularityClass::regular();
        rep.seconds = seconds_since(t0);
        return rep;
    }
    NullField field;
    try {
        field = null_field(local.jac, local.m, local.n, tol.tol_zero, local.scale);
    } catch (const CorankTooHigh& e) {
        rep.cls = SingularityClass::corank();
        rep.note = e.what();
        rep.seconds = seconds_since(t0);
        return rep;
    }
    rep.chain = make_chain(local, field, k_max);
    SingularityClass c = decide_chain(*rep.chain, k_max, tol, &rep.rank);
    if (c.kind == SingularityClass::Kind::A) c.index += 1; // first nonvanishing order k gives A_{k+1}
    rep.cls = c;
    rep.seconds = seconds_since(t0);
    return rep;
}

namespace {

struct MuSetup {
    FrontLocal local;
    NullField field;
    std::vector<Jet> lambda_chain; // lambda, lambda'
    Vector dlambda;
};

MuSetup mu_setup(const FrontInstance& front, const Point& p, const Tolerances& tol) {
    if (front.n < 2) throw PreconditionError("the mu-route needs n >= 2");
    const int order = chain_order(front.n, tol);
    MuSetup s{front_local(front, p, order, tol), {}, {}, {}};
    s.field = null_field(s.local.jac, s.local.m, s.local.n, tol.tol_zero, s.local.scale);
    s.lambda_chain = chain_jets(s.local.lambda, s.field.eta, 1);
    s.dlambda = to_vector(s.local.lambda.gradient());
    return s;
}

Matrix frame_at(const Vector& dlambda, Field field, const Tolerances& tol) {
    Matrix row = dlambda.transpose();
    Matrix basis = null_space(row, field, tol.tol_rank);
    if (basis.cols() != dlambda.size() - 1) throw NumericError("kernel of d(lambda) has unexpected dimension");
    return basis;
}

// Bilinear pairing (no conjugation) keeps everything holomorphic over C.
Jet dot(const std::vector<Jet>& a, const std::vector<Jet>& b) {
    Jet s = a[0] * b[0];
    for (std::size_t i = 1; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

} // namespace

Matrix singular_tangent_frame(const FrontInstance& front, const Point& p, const Tolerances& tol) {
    if (front.n == 1) return Matrix(1, 0);
    auto local = front_local(front, p, 2, tol);
    Vector g = to_vector(local.lambda.gradient());
    if (g.norm() <= tol.tol_zero * local.scale) throw PreconditionError("not 1-nondegenerate: d(lambda) vanishes at p");
    return frame_at(g, front.field, tol);
}

ClassificationReport classify_mu_route(const FrontInstance& front, const Point& p, const Tolerances& tol,
                                       const Matrix* frame_override) {
    auto t0 = Clock::now();
    ClassificationReport rep;
    rep.point = p;
    rep.route = Route::Mu;
    rep.tol = tol;
    const int n = front.n;
    if (n < 2) throw PreconditionError("the mu-route is undefined for n = 1");
    MuSetup s;
    try {
        s = mu_setup(front, p, tol);
    } catch (const CorankTooHigh& e) {
        rep.cls = SingularityClass::corank();
        rep.note = e.what();
        rep.seconds = seconds_since(t0);
        return rep;
    }
    const double scale = s.local.scale;
    switch (band(s.local.lambda.value(), tol.tol_zero, scale)) {
    case Band::Nonzero:
        rep.cls = SingularityClass::regular();
        rep.seconds = seconds_since(t0);
        return rep;
    case Band::Ambiguous:
        rep.cls = SingularityClass::inconclusive(band_reason(0));
        rep.seconds = seconds_since(t0);
        return rep;
    case Band::Vanishes: break;
    }
    if (s.dlambda.norm() <= tol.tol_zero * scale)
        throw PreconditionError("not 1-nondegenerate: d(lambda) vanishes at p, the mu-route does not apply");

    MuChain mc;
    mc.point = p;
    mc.frame = frame_override ? *frame_override : frame_at(s.dlambda, front.field, tol);
    if (mc.frame.rows() != n || mc.frame.cols() != n - 1) throw PreconditionError("frame must be n x (n-1)");

    // Frame field: project the base vectors onto ker d(lambda)(x), then Gram-Schmidt.
    std::vector<Jet> g;
    for (int c = 0; c < n; ++c) g.push_back(s.local.lambda.derivative(c));
    const auto& gspace = g.front().space();
    Jet gg_inv = reciprocal(dot(g, g));
    std::vector<std::vector<Jet>> frame;
    for (int i = 0; i < n - 1; ++i) {
        std::vector<Jet> b;
        for (int c = 0; c < n; ++c) b.push_back(Jet::constant(gspace, mc.frame(c, i)));
        Jet coef = dot(g, b) * gg_inv;
        for (int c = 0; c < n; ++c) b[c] -= coef * g[c];
        for (const auto& u : frame) {
            Jet proj = dot(u, b);
            for (int c = 0; c < n; ++c) b[c] -= proj * u[c];
        }
        Jet inv_len = reciprocal(sqrt(dot(b, b)));
        for (auto& bc : b) bc = bc * inv_len;
        frame.push_back(std::move(b));
    }
    const int mu_order = gspace->order();
    std::vector<Jet> entries;
    for (int r = 0; r < n; ++r) {
        for (int i = 0; i < n - 1; ++i) entries.push_back(frame[i][r]);
        entries.push_back(s.field.eta[r].truncated(mu_order));
    }
    Jet mu = determinant(entries, n);
    std::vector<Jet> mu_chain{mu};
    for (int j = 1; j <= n - 1 && mu_chain.back().order() >= 1; ++j)
        mu_chain.push_back(directional_derivative(mu_chain.back(), s.field.eta));
    mc.values = values(mu_chain);

    auto finish = [&](SingularityClass c) {
        rep.cls = std::move(c);
        rep.mu = std::move(mc);
        rep.seconds = seconds_since(t0);
        return rep;
    };

    switch (band(mc.values[0], tol.tol_zero, scale)) {
    case Band::Nonzero: return finish(SingularityClass::a(2));
    case Band::Ambiguous: return finish(SingularityClass::inconclusive("|mu| lies between the bands"));
    case Band::Vanishes: break;
    }
    // 2-nondegeneracy: d(mu) restricted to T_p S(f).
    Vector dmu = to_vector(mu.gradient());
    Vector on_frame = mc.frame.transpose() * dmu;
    for (Eigen::Index i = 0; i < on_frame.size(); ++i) mc.dmu_frame.push_back(on_frame[i]);
    switch (band(on_frame.norm(), tol.tol_zero, scale)) {
    case Band::Vanishes: return finish(SingularityClass::degenerate(2));
    case Band::Ambiguous: return finish(SingularityClass::inconclusive("d(mu) on T_pS(f) lies between the bands"));
    case Band::Nonzero: break;
    }
    // T_p S_2 = ker d(lambda) cap ker d(lambda').
    Matrix stacked(2, n);
    stacked.row(0) = s.dlambda.transpose();
    stacked.row(1) = to_vector(s.lambda_chain[1].gradient()).transpose();
    mc.tangent_s2 = null_space(stacked, front.field, tol.tol_rank, tol.tol_zero * scale);
    for (int k = 2; k <= n; ++k) {
        // here mu, ..., mu^{(k-2)} vanish at p
        if (k >= 3) {
            if (static_cast<int>(mu_chain.size()) < k - 1 || mu_chain[static_cast<std::size_t>(k - 2)].order() < 1)
                throw OrderExhausted("mu^(" + std::to_string(k - 2) + ") gradient needs a higher jet order");
            Matrix phi(k - 2, n);
            for (int i = 1; i <= k - 2; ++i)
                phi.row(i - 1) = to_vector(mu_chain[static_cast<std::size_t>(i)].gradient()).transpose();
            mc.restricted_jacobian = phi * mc.tangent_s2;
            mc.rank = numerical_rank(mc.restricted_jacobian, tol.tol_rank, tol.tol_zero * scale);
            if (mc.rank.rank < k - 2) return finish(SingularityClass::degenerate(k));
        }
        if (static_cast<int>(mc.values.size()) <= k - 1)
            throw OrderExhausted("mu^(" + std::to_string(k - 1) + ") needs a higher jet order");
        switch (band(mc.values[static_cast<std::size_t>(k - 1)], tol.tol_zero, scale)) {
        case Band::Nonzero: return finish(SingularityClass::a(k + 1));
        case Band::Ambiguous: return finish(SingularityClass::inconclusive("a mu-chain value lies between the bands"));
        case Band::Vanishes: break;
        }
    }
    return finish(SingularityClass::degenerate(n + 1));
}

ClassificationReport classify(const FrontInstance& front, const Point& p, Route route, const Tolerances& tol) {
    if (route == Route::Lambda) return classify_lambda_route(front, p, tol);
    if (route == Route::Mu) return classify_mu_route(front, p, tol);
    auto t0 = Clock::now();
    ClassificationReport rep = classify_lambda_route(front, p, tol);
    rep.route = Route::Both;
    rep.lambda_class = rep.cls;
    if (front.n < 2) {
        rep.note = "mu-route not applicable: n = 1";
        return rep;
    }
    if (rep.cls.kind == SingularityClass::Kind::Regular || rep.cls.kind == SingularityClass::Kind::CorankTooHigh) {
        rep.mu_class = rep.cls;
        return rep;
    }
    try {
        ClassificationReport mu = classify_mu_route(front, p, tol);
        rep.mu_class = mu.cls;
        rep.mu = mu.mu;
        if (!(mu.cls == rep.cls))
            rep.cls = SingularityClass::inconclusive("routes disagree: lambda gives " + rep.lambda_class->label() +
                                                     ", mu gives " + mu.cls.label());
    } catch (const PreconditionError& e) {
        rep.note = std::string("mu-route not applicable: ") + e.what();
    }
    rep.seconds = seconds_since(t0);
    return rep;
}

// ---------------------------------------------------------------------------
// Singular-set scan

namespace {

struct Residual {
    Vector value;
    Matrix jacobian;
    double scale = 1.0;
};

// (lambda, ..., lambda^{(level-1)}) and its Jacobian at x.
Residual stratum_residual(const FrontInstance& front, const Point& x, int level, const Tolerances& tol) {
    Residual r;
    if (front.n == 1 && !front.has_normal()) {
        // Plane curve without a normal: singular points are the zeros of the velocity.
        auto space = JetSpace::make(x, 2, front.field);
        auto f = evaluate(front.map, std::vector<Jet>{Jet::variable(space, 0)});
        r.value.resize(2);
        r.jacobian.resize(2, 1);
        for (int i = 0; i < 2; ++i) {
            Jet v = f[static_cast<std::size_t>(i)].derivative(0);
            r.value[i] = v.value();
            r.jacobian(i, 0) = v.partial(0);
        }
        r.scale = std::max({1.0, std::abs(r.value[0]), std::abs(r.value[1])});
        return r;
    }
    Tolerances t = tol;
    t.jet_order = std::max(t.jet_order, level + 1);
    const int order = chain_order(level, t);
    auto local = front_local(front, x, order, tol);
    r.scale = local.scale;
    std::vector<Jet> chain{local.lambda};
    if (level > 1) {
        auto field = null_field(local.jac, local.m, local.n, tol.tol_zero, local.scale);
        chain = chain_jets(local.lambda, field.eta, level - 1);
    }
    r.value.resize(level);
    r.jacobian.resize(level, front.n);
    for (int i = 0; i < level; ++i) {
        r.value[i] = chain[static_cast<std::size_t>(i)].value();
        for (int c = 0; c < front.n; ++c) r.jacobian(i, c) = chain[static_cast<std::size_t>(i)].partial(c);
    }
    return r;
}

bool inside(const Point& x, const Box& box, double factor) {
    for (std::size_t i = 0; i < x.size(); ++i) {
        double mid = 0.5 * (box.lo[i] + box.hi[i]);
        double half = 0.5 * (box.hi[i] - box.lo[i]) * factor;
        if (std::abs(x[i].real() - mid) > half + 1e-12 || x[i].imag() != 0.0) return false;
    }
    return true;
}

// Min-norm Gauss-Newton onto the stratum; nullopt when it does not converge.
std::optional<Point> newton(const FrontInstance& front, Point x, int level, const Box& box, const Tolerances& tol) {
    constexpr int max_iter = 25;
    for (int it = 0; it <= max_iter; ++it) {
        Residual r = stratum_residual(front, x, level, tol);
        const double res = r.value.norm();
        if (!std::isfinite(res)) return std::nullopt;
        if (res <= 1e-12 * r.scale) return x;
        if (it == max_iter) break;
        Vector step = r.jacobian.completeOrthogonalDecomposition().solve(r.value);
        if (!step.allFinite() || step.norm() == 0.0) return std::nullopt;
        for (int i = 0; i < front.n; ++i) x[i] -= step[i];
        if (front.field == Field::Real)
            for (auto& c : x) c = Scalar(c.real(), 0.0);
        if (!inside(x, box, 2.0)) return std::nullopt;
        if (step.norm() <= 1e-15 * (1.0 + to_vector(x).norm()) && res <= 1e-9 * r.scale) return x;
    }
    return std::nullopt;
}

struct Candidate {
    Point x;
    int level;
};

bool lex_less(const Point& a, const Point& b) {
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].real() != b[i].real()) return a[i].real() < b[i].real();
        if (a[i].imag() != b[i].imag()) return a[i].imag() < b[i].imag();
    }
    return false;
}

} // namespace

ScanResult scan_singular_set(const FrontInstance& front, const Box& box, int grid, Route route, const Tolerances& tol) {
    const int n = front.n;
    if (static_cast<int>(box.lo.size()) != n || static_cast<int>(box.hi.size()) != n)
        throw PreconditionError("box dimension does not match the front");
    if (grid < 2) throw PreconditionError("grid must be >= 2");
    for (int i = 0; i < n; ++i)
        if (!(box.hi[i] > box.lo[i])) throw PreconditionError("box must have positive extent");
    ScanResult out;
    double diag = 0.0;
    for (int i = 0; i < n; ++i) diag += std::pow((box.hi[i] - box.lo[i]) / (grid - 1), 2);
    diag = std::sqrt(diag);
    const bool derived = n == 1 && !front.has_normal();

    std::vector<Candidate> cands;
    std::vector<int> idx(static_cast<std::size_t>(n), 0);
    for (;;) {
        Point seed(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) seed[i] = box.lo[i] + (box.hi[i] - box.lo[i]) * idx[i] / (grid - 1);
        ++out.seeds;
        std::optional<Point> hit;
        try {
            hit = newton(front, seed, 1, box, tol);
        } catch (const Error&) {
            hit.reset();
        }
        if (!hit || !inside(*hit, box, 1.0)) {
            ++out.dropped;
        } else {
            cands.push_back({*hit, 1});
            // Descend into deeper strata S_2, S_3, ... from the converged point.
            Point cur = *hit;
            for (int level = 2; level <= n && !derived; ++level) {
                std::optional<Point> deeper;
                try {
                    deeper = newton(front, cur, level, box, tol);
                } catch (const Error&) {
                    deeper.reset();
                }
                if (!deeper || !inside(*deeper, box, 1.0)) break;
                cands.push_back({*deeper, level});
                cur = *deeper;
            }
        }
        int d = 0;
        while (d < n && ++idx[d] == grid) idx[d++] = 0;
        if (d == n) break;
    }

    std::stable_sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
        if (a.level != b.level) return a.level > b.level;
        return lex_less(a.x, b.x);
    });
    std::vector<Point> kept;
    const double radius = 0.5 * diag;
    for (const auto& c : cands) {
        bool near = false;
        for (const auto& k : kept)
            if ((to_vector(k) - to_vector(c.x)).norm() <= radius) {
                near = true;
                break;
            }
        if (!near) kept.push_back(c.x);
    }
    std::sort(kept.begin(), kept.end(), lex_less);
    for (const auto& x : kept) {
        try {
            out.points.push_back(classify(front, x, route, tol));
        } catch (const Error& e) {
            ClassificationReport rep;
            rep.point = x;
            rep.route = route;
            rep.cls = SingularityClass::inconclusive(e.what());
            rep.tol = tol;
            out.points.push_back(rep);
            ++out.errors;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Conjugation

FrontInstance conjugate_front(const FrontInstance& front, const Conjugation& c, const Point& base) {
    const int n = front.n;
    if (static_cast<int>(c.source_diffeo.size()) != n) throw PreconditionError("source diffeomorphism needs n components");
    if (c.affine.rows() != n + 1 || c.affine.cols() != n + 1 || static_cast<int>(c.shift.size()) != n + 1)
        throw PreconditionError("target affine map must be (n+1) x (n+1) with an (n+1)-vector shift");
    // psi must be a local diffeomorphism at the base point.
    auto space = JetSpace::make(base, 1, front.field);
    std::vector<Jet> vars;
    for (int v = 0; v < n; ++v) vars.push_back(Jet::variable(space, v));
    auto psi = evaluate(c.source_diffeo, vars);
    Matrix dpsi(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) dpsi(i, j) = psi[i].partial(j);
    if (n > 0 && std::abs(dpsi.determinant()) <= 1e-12) throw PreconditionError("source diffeomorphism has a singular Jacobian at the base point");
    Eigen::FullPivLU<Matrix> lu(c.affine);
    if (!lu.isInvertible()) throw PreconditionError("target affine map is not invertible");

    FrontInstance out;
    out.name = front.name + "_conj";
    out.n = n;
    out.vars = front.vars;
    out.field = front.field;
    std::vector<Expr> composed, composed_nu;
    for (const auto& e : front.map) composed.push_back(substitute(e, c.source_diffeo));
    for (int r = 0; r <= n; ++r) {
        Expr sum = Expr::constant(c.shift[static_cast<std::size_t>(r)]);
        for (int k = 0; k <= n; ++k)
            if (c.affine(r, k) != Scalar{}) sum = sum + Expr::constant(c.affine(r, k)) * composed[static_cast<std::size_t>(k)];
        out.map.push_back(sum);
    }
    if (front.has_normal()) {
        if (c.normal_scale.valid() && std::abs(evaluate(c.normal_scale, base, front.field)) == 0.0)
            throw PreconditionError("normal scale vanishes at the base point");
        Matrix inv_t = lu.inverse().transpose();
        for (const auto& e : front.normal) composed_nu.push_back(substitute(e, c.source_diffeo));
        for (int r = 0; r <= n; ++r) {
            Expr sum = Expr::constant(0.0);
            for (int k = 0; k <= n; ++k)
                if (inv_t(r, k) != Scalar{}) sum = sum + Expr::constant(inv_t(r, k)) * composed_nu[static_cast<std::size_t>(k)];
            out.normal.push_back(c.normal_scale.valid() ? c.normal_scale * sum : sum);
        }
    }
    return out;
}

Conjugation random_conjugation(int n, const Point& base, unsigned long long seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> small(-0.1, 0.1), unit(-1.0, 1.0);
    Conjugation c;
    std::vector<Expr> dx;
    for (int i = 0; i < n; ++i) {
        Expr x = Expr::variable(i);
        dx.push_back(base[i] == Scalar{} ? x : x - Expr::constant(base[i]));
    }
    for (int i = 0; i < n; ++i) {
        Expr psi = Expr::variable(i);
        for (int j = 0; j < n; ++j) psi = psi + Expr::constant(small(rng)) * dx[j];
        // a few quadratic and cubic terms
        for (int t = 0; t < 3; ++t) {
            int a = static_cast<int>(rng() % static_cast<unsigned>(n));
            int b = static_cast<int>(rng() % static_cast<unsigned>(n));
            Expr mono = dx[a] * dx[b];
            if (t == 2) mono = mono * dx[static_cast<std::size_t>(rng() % static_cast<unsigned>(n))];
            psi = psi + Expr::constant(small(rng)) * mono;
        }
        c.source_diffeo.push_back(psi);
    }
    for (;;) {
        Matrix a(n + 1, n + 1);
        for (int r = 0; r <= n; ++r)
            for (int k = 0; k <= n; ++k) a(r, k) = unit(rng);
        Eigen::JacobiSVD<Matrix> svd(a);
        const auto& s = svd.singularValues();
        if (s[n] > 0 && s[0] / s[n] <= 20.0) {
            c.affine = a;
            break;
        }
    }
    for (int r = 0; r <= n; ++r) c.shift.push_back(unit(rng));
    Expr lin = Expr::constant(0.0);
    for (int i = 0; i < n; ++i) lin = lin + Expr::constant(unit(rng)) * dx[i];
    c.normal_scale = exp(lin);
    return c;
}

} // namespace wavefront
