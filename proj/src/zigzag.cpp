#include "wavefront/zigzag.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace wavefront {

namespace {

constexpr double pi = std::numbers::pi;
constexpr int max_common_order = 4;
constexpr int max_samples = 1 << 18;

struct Composed {
    const FrontInstance* front;
    const LoopSpec* loop;
    int n;
    std::vector<Expr> curve;  // f o gamma, in s
    std::vector<Expr> normal; // nu o gamma, in s; empty when derived from the velocity
    FrontInstance curve_front; // plane curve s -> f(gamma(s)) for the derived normal
    Eigen::MatrixXd G, Ginv;
};

Composed compose_loop(const FrontInstance& front, const LoopSpec& loop) {
    if (front.field != Field::Real) throw PreconditionError("zig-zag numbers are defined for real fronts only");
    if (static_cast<int>(loop.map.size()) != front.n)
        throw PreconditionError("loop has " + std::to_string(loop.map.size()) + " components, the front domain has dimension " +
                                std::to_string(front.n));
    if (front.n >= 2 && !front.has_normal())
        throw PreconditionError("loops on fronts with n >= 2 need a normal field in the front definition");
    Composed c;
    c.front = &front;
    c.loop = &loop;
    c.n = front.n;
    for (const auto& e : front.map) c.curve.push_back(substitute(e, loop.map));
    if (front.has_normal())
        for (const auto& e : front.normal) c.normal.push_back(substitute(e, loop.map));
    c.curve_front.n = 1;
    c.curve_front.vars = {loop.param};
    c.curve_front.map = c.curve;
    const int m = front.n + 1;
    if (loop.metric.empty()) {
        c.G = Eigen::MatrixXd::Identity(m, m);
    } else {
        if (static_cast<int>(loop.metric.size()) != m * m)
            throw PreconditionError("metric must have (n+1)^2 entries");
        c.G = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(loop.metric.data(), m, m);
        if (!c.G.isApprox(c.G.transpose(), 1e-12)) throw PreconditionError("metric must be symmetric");
        Eigen::LLT<Eigen::MatrixXd> llt(c.G);
        if (llt.info() != Eigen::Success) throw PreconditionError("metric must be positive definite");
    }
    c.Ginv = c.G.inverse();
    return c;
}

JetSpacePtr s_space(double s, int order) { return JetSpace::make(Point{s}, order, Field::Real); }

// Raw (Euclidean) normal along the loop as jets in s.
std::vector<Jet> raw_normal(const Composed& c, double s, int order, const Tolerances& tol) {
    if (!c.normal.empty()) {
        auto sp = s_space(s, order);
        std::vector<Jet> v{Jet::variable(sp, 0)};
        return evaluate(c.normal, v);
    }
    return derive_plane_normal(c.curve_front, {s}, order, tol, nullptr);
}

std::vector<double> real_values(const std::vector<Jet>& j) {
    std::vector<double> out;
    for (const auto& x : j) out.push_back(x.value().real());
    return out;
}

// Unit normal for the metric: G^{-1} nu / |G^{-1} nu|_G.
std::vector<double> unit_normal(const Composed& c, const std::vector<double>& nu) {
    Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(nu.data(), static_cast<Eigen::Index>(nu.size()));
    Eigen::VectorXd N = c.Ginv * v;
    double len = std::sqrt(N.dot(c.G * N));
    if (!(len > 0.0)) throw NumericError("normal vanishes along the loop");
    N /= len;
    return {N.data(), N.data() + N.size()};
}

double gdot(const Composed& c, const std::vector<double>& a, const std::vector<double>& b) {
    Eigen::Map<const Eigen::VectorXd> x(a.data(), static_cast<Eigen::Index>(a.size())), y(b.data(), static_cast<Eigen::Index>(b.size()));
    return x.dot(c.G * y);
}

Point loop_point(const Composed& c, double s) {
    Point x;
    Scalar sv = s;
    for (const auto& e : c.loop->map) x.push_back(evaluate(e, std::span<const Scalar>(&sv, 1)));
    return x;
}

// Raw normal at s with its sign matched to the unit normal `ref`.
std::vector<double> matched_normal(const Composed& c, double s, const std::vector<double>& ref, const Tolerances& tol,
                                   int* sign = nullptr) {
    auto nu = real_values(raw_normal(c, s, 0, tol));
    auto N = unit_normal(c, nu);
    int sg = gdot(c, N, ref) < 0 ? -1 : 1;
    if (sign) *sign = sg;
    for (auto& v : nu) v *= sg;
    return nu;
}

struct LambdaSample {
    double value, scale;
};

// det(df(gamma(s)) columns, nu), nu a Euclidean normal with the caller's sign.
LambdaSample signed_area(const Composed& c, double s, const std::vector<double>& nu) {
    const int n = c.n;
    auto x = loop_point(c, s);
    auto space = JetSpace::make(x, 1, Field::Real);
    std::vector<Jet> vars;
    for (int v = 0; v < n; ++v) vars.push_back(Jet::variable(space, v));
    auto f = evaluate(c.front->map, vars);
    Eigen::MatrixXd M(n + 1, n + 1);
    double scale = 1.0;
    for (int r = 0; r <= n; ++r) {
        for (int k = 0; k < n; ++k) {
            M(r, k) = f[static_cast<std::size_t>(r)].partial(k).real();
            scale = std::max(scale, std::abs(M(r, k)));
        }
        M(r, n) = nu[static_cast<std::size_t>(r)];
    }
    double nn = 0.0;
    for (double v : nu) nn += v * v;
    return {M.determinant(), std::pow(scale, n) * std::sqrt(nn)};
}

// |(f o gamma)'(s)| relative to max(1, |df|) |gamma'(s)|.
double null_residual(const Composed& c, double s) {
    auto sp = s_space(s, 1);
    std::vector<Jet> v{Jet::variable(sp, 0)};
    auto g = evaluate(c.loop->map, v);
    auto fg = evaluate(c.curve, v);
    auto x = loop_point(c, s);
    auto space = JetSpace::make(x, 1, Field::Real);
    std::vector<Jet> vars;
    for (int k = 0; k < c.n; ++k) vars.push_back(Jet::variable(space, k));
    auto f = evaluate(c.front->map, vars);
    double dg = 0.0, dfg = 0.0, df = 0.0;
    for (const auto& e : g) dg += std::norm(e.partial(0));
    for (const auto& e : fg) dfg += std::norm(e.partial(0));
    for (const auto& e : f)
        for (int k = 0; k < c.n; ++k) df += std::norm(e.partial(k));
    const double denom = std::sqrt(dg) * std::max(1.0, std::sqrt(df));
    return denom > 0.0 ? std::sqrt(dfg) / denom : 0.0;
}

// <nu, D_eta D_eta f> at gamma(s) and the vector D_eta D_eta f.
std::pair<double, std::vector<double>> inward_pairing(const Composed& c, double s, const std::vector<double>& nu,
                                                      const Tolerances& tol) {
    const int n = c.n;
    auto x = loop_point(c, s);
    auto L = front_local(*c.front, x, 2, tol);
    auto field = null_field(L.jac, L.m, L.n, tol.tol_zero, L.scale);
    std::vector<double> second;
    double h = 0.0;
    for (int r = 0; r <= n; ++r) {
        Jet d1 = directional_derivative(L.f[static_cast<std::size_t>(r)], field.eta);
        double d2 = directional_derivative(d1, field.eta).value().real();
        second.push_back(d2);
        h += nu[static_cast<std::size_t>(r)] * d2;
    }
    return {h, second};
}

} // namespace

std::vector<int> normalize(const std::vector<int>& raw) {
    std::vector<int> st;
    for (int e : raw) {
        if (!st.empty() && st.back() == e)
            st.pop_back();
        else
            st.push_back(e);
    }
    return st;
}

SignSequence make_sign_sequence(const std::vector<int>& raw) {
    SignSequence seq;
    seq.raw = raw;
    seq.normalized = normalize(raw);
    for (int e : seq.normalized)
        if (e < 0) ++seq.z;
    return seq;
}

std::vector<int> raw_sequence(const std::vector<CrossingRecord>& crossings) {
    std::vector<int> eps{+1};
    int prev_plus = +1;
    for (const auto& c : crossings) {
        eps.push_back(eps.back() * prev_plus * c.s_minus);
        prev_plus = c.s_plus;
    }
    eps.push_back(eps.back() * prev_plus);
    return eps;
}

void check_loop_closed(const FrontInstance& front, const LoopSpec& loop, const Tolerances& tol) {
    auto c = compose_loop(front, loop);
    auto at = [&](double s) {
        auto sp = s_space(s, 1);
        std::vector<Jet> v{Jet::variable(sp, 0)};
        return evaluate(c.curve, v);
    };
    auto a = at(0.0), b = at(1.0);
    double scale = 1.0;
    for (const auto& j : a) scale = std::max({scale, std::abs(j[0]), std::abs(j[1])});
    for (std::size_t r = 0; r < a.size(); ++r)
        if (std::abs(a[r][0] - b[r][0]) > 1e-9 * scale || std::abs(a[r][1] - b[r][1]) > 1e-9 * scale)
            throw PreconditionError("loop is not closed: f o gamma or its derivative differs at s = 0 and s = 1");
    auto n0 = unit_normal(c, real_values(raw_normal(c, 0.0, 0, tol)));
    auto n1 = unit_normal(c, real_values(raw_normal(c, 1.0, 0, tol)));
    if (1.0 - std::abs(gdot(c, n0, n1)) > 1e-9)
        throw PreconditionError("loop is not closed: the normal lines differ at s = 0 and s = 1");
}

NormalTransport transport_normal(const FrontInstance& front, const LoopSpec& loop, int samples, const Tolerances& tol) {
    auto c = compose_loop(front, loop);
    NormalTransport t;
    t.samples = samples;
    std::vector<double> prev;
    for (int i = 0; i <= samples; ++i) {
        double s = static_cast<double>(i) / samples;
        auto N = unit_normal(c, real_values(raw_normal(c, s, 0, tol)));
        int sg = loop.base_normal < 0 ? -1 : 1;
        if (!prev.empty()) {
            double d = gdot(c, N, prev);
            sg = d < 0 ? -1 : 1;
            if (std::abs(d) < 0.5) throw SamplingTooCoarse("adjacent normals differ by more than 60 degrees");
        }
        for (auto& v : N) v *= sg;
        t.s.push_back(s);
        t.signs.push_back(sg);
        t.normals.push_back(N);
        prev = N;
    }
    t.coorientable = gdot(c, t.normals.front(), t.normals.back()) > 0;
    t.rho = t.coorientable ? 0 : 1;
    return t;
}

std::vector<CrossingRecord> detect_crossings(const FrontInstance& front, const LoopSpec& loop,
                                             const NormalTransport& t, const Tolerances& tol) {
    auto c = compose_loop(front, loop);
    const int N = t.samples;
    std::vector<LambdaSample> lam;
    for (int i = 0; i <= N; ++i) {
        auto nu = matched_normal(c, t.s[i], t.normals[i], tol);
        lam.push_back(signed_area(c, t.s[i], nu));
    }
    if (std::abs(lam[0].value) <= 10.0 * tol.tol_zero * lam[0].scale)
        throw PreconditionError("the loop's base point gamma(0) is a singular point of the front");
    auto sgn = [&](int i) {
        if (std::abs(lam[i].value) <= 1e-12 * lam[i].scale) return 0;
        return lam[i].value > 0 ? 1 : -1;
    };

    // Brackets (lo, hi) of sample indices with a sign change.
    std::vector<std::pair<int, int>> brackets;
    for (int i = 0; i < N; ++i) {
        int a = sgn(i), b = sgn(i + 1);
        if (a * b < 0) brackets.push_back({i, i + 1});
        if (b == 0 && i + 2 <= N) {
            int d = sgn(i + 2);
            if (a * d < 0)
                brackets.push_back({i, i + 2});
            else
                throw NumericError("tangential contact with the singular set near s = " + std::to_string(t.s[i + 1]) +
                                   "; perturb the loop");
        }
    }
    for (std::size_t k = 1; k < brackets.size(); ++k)
        if (brackets[k].first - brackets[k - 1].first < 4) throw SamplingTooCoarse("crossings closer than 4 samples");

    std::vector<CrossingRecord> out;
    const double spacing = 1.0 / N;
    for (auto [lo, hi] : brackets) {
        const auto& ref = t.normals[lo];
        auto value = [&](double s) { return signed_area(c, s, matched_normal(c, s, ref, tol)).value; };
        double a = t.s[lo], b = t.s[hi];
        double fa = value(a);
        for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
            double m = 0.5 * (a + b);
            double fm = value(m);
            if (fm == 0.0) {
                a = b = m;
                break;
            }
            if ((fm > 0) == (fa > 0)) {
                a = m;
                fa = fm;
            } else {
                b = m;
            }
        }
        CrossingRecord rec;
        rec.s = 0.5 * (a + b);
        rec.point = loop_point(c, rec.s);
        for (const auto& e : front.map) rec.image.push_back(evaluate(e, rec.point));
        auto here = signed_area(c, rec.s, matched_normal(c, rec.s, ref, tol));
        rec.lambda = here.value;
        const double h = 1e-6 * spacing;
        rec.slope = (value(rec.s + h) - value(rec.s - h)) / (2 * h);
        if (std::abs(rec.lambda) > 1e-10 * here.scale)
            throw NumericError("crossing refinement did not reach |lambda| <= 1e-10 scale at s = " + std::to_string(rec.s));

        auto cls = classify_lambda_route(front, rec.point, tol);
        rec.cls = cls.cls;
        if (!rec.cls.is_a(2))
            throw NumericError("loop crosses the singular set at a non-A2 point (" + rec.cls.label() +
                               ") at s = " + std::to_string(rec.s));

        const double delta = spacing / 8;
        auto minus = inward_pairing(c, rec.s - delta, matched_normal(c, rec.s - delta, ref, tol), tol);
        auto plus = inward_pairing(c, rec.s + delta, matched_normal(c, rec.s + delta, ref, tol), tol);
        rec.null_residual = null_residual(c, rec.s);
        rec.second = inward_pairing(c, rec.s, matched_normal(c, rec.s, ref, tol), tol).second;
        if (minus.first == 0.0 || plus.first == 0.0 || (minus.first > 0) == (plus.first > 0))
            throw NumericError("inward direction does not flip across the crossing at s = " + std::to_string(rec.s));
        // The transported normal is inward where <nu, D_eta D_eta f> < 0.
        rec.s_minus = minus.first < 0 ? +1 : -1;
        rec.s_plus = plus.first < 0 ? +1 : -1;
        out.push_back(std::move(rec));
    }
    return out;
}

std::vector<double> normal_curvature_map(const FrontInstance& front, const LoopSpec& loop, const NormalTransport& t,
                                         const Tolerances& tol) {
    auto c = compose_loop(front, loop);
    const int m = c.n + 1;
    const int R = max_common_order;
    std::vector<double> theta;
    double acc = 0.0, last = 0.0;
    for (int i = 0; i <= t.samples; ++i) {
        const double s = t.s[i];
        auto sp = s_space(s, R + 2);
        std::vector<Jet> sv{Jet::variable(sp, 0)};
        auto curve = evaluate(c.curve, sv);
        auto nu = raw_normal(c, s, R + 1, tol);
        const Scalar sign = double(t.signs[i]);
        // N = G^{-1} nu / |G^{-1} nu|_G as jets.
        auto low = nu.front().space();
        std::vector<Jet> N;
        for (int r = 0; r < m; ++r) {
            Jet acc_r = Jet::constant(low, Scalar{});
            for (int q = 0; q < m; ++q)
                if (c.Ginv(r, q) != 0.0) acc_r += nu[static_cast<std::size_t>(q)] * Scalar(c.Ginv(r, q));
            N.push_back(acc_r * sign);
        }
        Jet len2 = Jet::constant(low, Scalar{});
        for (int r = 0; r < m; ++r)
            for (int q = 0; q < m; ++q)
                if (c.G(r, q) != 0.0) len2 += N[static_cast<std::size_t>(r)] * N[static_cast<std::size_t>(q)] * Scalar(c.G(r, q));
        Jet inv = reciprocal(sqrt(len2));
        for (auto& x : N) x = x * inv;

        std::vector<Jet> dc, dN;
        for (const auto& x : curve) dc.push_back(x.derivative(0).truncated(R));
        for (const auto& x : N) dN.push_back(x.derivative(0).truncated(R));
        Jet a = Jet::constant(dc.front().space(), Scalar{}), b = a;
        for (int r = 0; r < m; ++r)
            for (int q = 0; q < m; ++q) {
                if (c.G(r, q) == 0.0) continue;
                a += dc[static_cast<std::size_t>(r)] * dc[static_cast<std::size_t>(q)] * Scalar(c.G(r, q));
                b += dN[static_cast<std::size_t>(r)] * dc[static_cast<std::size_t>(q)] * Scalar(c.G(r, q));
            }
        // Coefficient k is weighed by h^k (h = sample spacing), so the choice of order does not
        // depend on how fast the high-order Taylor coefficients grow.
        const double h = 1.0 / t.samples;
        auto weight = [&](int k) { return std::max(std::abs(a[k]), std::abs(b[k])) * std::pow(h, k); };
        double scale = 0.0;
        for (int k = 0; k <= R; ++k) scale = std::max(scale, weight(k));
        int r = 0;
        while (r <= R && weight(r) <= tol.tol_zero * scale) ++r;
        if (r > R)
            throw NumericError("normal curvature map cannot be extended at s = " + std::to_string(s) +
                               ": both components vanish beyond order " + std::to_string(R));
        double th = std::atan2(b[r].real(), a[r].real());
        if (i == 0) {
            acc = th;
        } else {
            double d = std::remainder(th - last, pi); // in [-pi/2, pi/2]
            if (std::abs(d) >= pi / 8) throw SamplingTooCoarse("normal curvature map jumps by more than pi/8");
            acc += d;
        }
        last = th;
        theta.push_back(acc);
    }
    return theta;
}

int maslov_index(const std::vector<double>& theta) {
    if (theta.size() < 2) throw PreconditionError("angle trace needs at least two samples");
    // One rotation is a full turn of theta: [g(c',c') : g(nu',c')] lifts to a nonvanishing plane
    // vector along the loop, so theta(1) - theta(0) is a multiple of 2 pi.
    const double diff = theta.back() - theta.front();
    const int mu = static_cast<int>(std::lround(diff / (2 * pi)));
    if (std::abs(diff - 2 * pi * mu) >= pi / 4)
        throw NumericError("rotation index rounding guard failed: (theta(1) - theta(0)) / 2pi = " +
                           std::to_string(diff / (2 * pi)));
    return mu;
}

ZigzagReport analyze_loop(const FrontInstance& front, const LoopSpec& loop, const Tolerances& tol) {
    check_loop_closed(front, loop, tol);
    ZigzagReport rep;
    rep.front = front.name;
    rep.loop = loop.name;
    std::string last_reason;
    for (int N = std::max(8, loop.samples); N <= max_samples; N *= 2) {
        try {
            auto t = transport_normal(front, loop, N, tol);
            rep.samples = N;
            rep.coorientable = t.coorientable;
            rep.rho = t.rho;
            rep.crossings = detect_crossings(front, loop, t, tol);
            if (!t.coorientable) {
                rep.sequence.reset();
                rep.maslov.reset();
                rep.consistent.reset();
                rep.angle_trace.clear();
                rep.note = "loop is not co-orientable (rho = 1); the sign sequence is undefined";
                return rep;
            }
            auto seq = make_sign_sequence(raw_sequence(rep.crossings));
            if (seq.raw.back() != +1)
                throw NumericError("internal consistency failure: eps_{m+1} = -1 on a co-orientable loop");
            rep.sequence = seq;
            rep.null_loop = std::all_of(rep.crossings.begin(), rep.crossings.end(),
                                        [](const CrossingRecord& r) { return r.null_residual <= null_loop_tol; });
            rep.angle_trace.clear();
            if (!rep.null_loop) {
                // The normal curvature map is only defined along null loops.
                rep.maslov.reset();
                rep.consistent.reset();
                rep.note = "loop is not a null loop (gamma' leaves ker df at a crossing); the rotation index is undefined";
                return rep;
            }
            auto theta = normal_curvature_map(front, loop, t, tol);
            rep.maslov = maslov_index(theta);
            rep.consistent = std::abs(*rep.maslov) == seq.z;
            for (int i = 0; i <= N; ++i) rep.angle_trace.push_back({t.s[i], theta[static_cast<std::size_t>(i)]});
            return rep;
        } catch (const SamplingTooCoarse& e) {
            last_reason = e.what();
        }
    }
    throw NumericError("sampling did not resolve the loop with " + std::to_string(max_samples) + " samples: " + last_reason);
}

std::string angle_trace_csv(const ZigzagReport& report) {
    std::ostringstream os;
    os << "s,theta\n";
    for (const auto& [s, th] : report.angle_trace) os << format_number(s) << ',' << format_number(th) << '\n';
    return os.str();
}

} // namespace wavefront
