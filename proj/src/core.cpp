#include "wavefront/core.hpp"

#include <algorithm>
#include <cmath>

namespace wavefront {

RankReport numerical_rank(const Matrix& m, double tol_rank, double floor) {
    RankReport r;
    r.rows = static_cast<int>(m.rows());
    r.cols = static_cast<int>(m.cols());
    r.tol_rank = tol_rank;
    r.floor = floor;
    if (!m.allFinite()) throw NumericError("numerical_rank: non-finite matrix entry");
    if (m.size() == 0) return r;
    Eigen::JacobiSVD<Matrix> svd(m);
    const auto& s = svd.singularValues();
    for (Eigen::Index i = 0; i < s.size(); ++i) r.singular_values.push_back(s[i]);
    const double cut = std::max(tol_rank * (s.size() ? s[0] : 0.0), floor);
    for (double sv : r.singular_values)
        if (sv > cut) ++r.rank;
    return r;
}

Matrix null_space(const Matrix& m, Field field, double tol_rank, double floor) {
    const Eigen::Index cols = m.cols();
    if (m.rows() == 0) return Matrix::Identity(cols, cols);
    int rank = numerical_rank(m, tol_rank, floor).rank;
    if (field == Field::Real) {
        Eigen::MatrixXd re = m.real();
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(re, Eigen::ComputeFullV);
        return svd.matrixV().rightCols(cols - rank).cast<Scalar>();
    }
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
    return svd.matrixV().rightCols(cols - rank);
}

Band band(Scalar v, double tol_zero, double scale) {
    const double a = std::abs(v);
    if (a <= tol_zero * scale) return Band::Vanishes;
    if (a >= 10.0 * tol_zero * scale) return Band::Nonzero;
    return Band::Ambiguous;
}

double norm(const std::vector<Scalar>& v) {
    double s = 0.0;
    for (const auto& c : v) s += std::norm(c);
    return std::sqrt(s);
}

Vector to_vector(const std::vector<Scalar>& v) {
    Vector out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[i];
    return out;
}

std::vector<Scalar> values(const std::vector<Jet>& jets) {
    std::vector<Scalar> out;
    out.reserve(jets.size());
    for (const auto& j : jets) out.push_back(j.value());
    return out;
}

namespace {

std::vector<Jet> variables(const JetSpacePtr& space) {
    std::vector<Jet> vars;
    for (int v = 0; v < space->nvars(); ++v) vars.push_back(Jet::variable(space, v));
    return vars;
}

void check_point(int n, const Point& p) {
    if (static_cast<int>(p.size()) != n)
        throw PreconditionError("point has dimension " + std::to_string(p.size()) + ", expected " + std::to_string(n));
}

double jacobian_scale(const std::vector<Jet>& jac) {
    double s = 1.0;
    for (const auto& j : jac) s = std::max(s, std::abs(j.value()));
    return s;
}

std::vector<Jet> jacobian(const std::vector<Jet>& f, int n) {
    std::vector<Jet> jac;
    jac.reserve(f.size() * static_cast<std::size_t>(n));
    for (const auto& fr : f)
        for (int c = 0; c < n; ++c) jac.push_back(fr.derivative(c));
    return jac;
}

// 1D jet with the first r coefficients removed, i.e. g / (t - t0)^r.
Jet shift_down(const Jet& g, int r, const JetSpacePtr& target) {
    Jet out(target);
    for (std::size_t i = 0; i < out.coefficients().size(); ++i) out[i] = g[i + static_cast<std::size_t>(r)];
    return out;
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

std::vector<Jet> derive_plane_normal(const FrontInstance& front, const Point& p, int order, const Tolerances& tol,
                                     int* shift) {
    if (front.n != 1) throw PreconditionError("a normal field is required for fronts with n >= 2");
    check_point(1, p);
    constexpr int max_shift = 4;
    auto space = JetSpace::make(p, order + 1 + max_shift, front.field);
    auto f = evaluate(front.map, variables(space));
    std::vector<Jet> vel{f[0].derivative(0), f[1].derivative(0)};
    double scale = std::max({1.0, std::abs(vel[0].value()), std::abs(vel[1].value())});
    int r = 0;
    while (r <= max_shift && std::abs(vel[0][static_cast<std::size_t>(r)]) <= tol.tol_zero * scale &&
           std::abs(vel[1][static_cast<std::size_t>(r)]) <= tol.tol_zero * scale)
        ++r;
    if (r > max_shift) throw NumericError("velocity vanishes to order > 4; normal cannot be derived");
    auto target = space->with_order(order);
    Jet g0 = shift_down(vel[0], r, target), g1 = shift_down(vel[1], r, target);
    if (shift) *shift = r;
    return {-g1, g0};
}

FrontLocal front_local(const FrontInstance& front, const Point& p, int order, const Tolerances& tol) {
    check_point(front.n, p);
    if (order < 1) throw OrderExhausted("front data needs jet order >= 1");
    if (static_cast<int>(front.map.size()) != front.n + 1) throw PreconditionError("front map must have n+1 components");
    FrontLocal L;
    L.n = front.n;
    L.m = front.n + 1;
    L.order = order;
    L.space = JetSpace::make(p, order, front.field);
    auto vars = variables(L.space);
    L.f = evaluate(front.map, vars);
    L.jac = jacobian(L.f, L.n);
    L.scale = jacobian_scale(L.jac);
    if (front.has_normal()) {
        auto low = L.space->with_order(order - 1);
        auto nu = evaluate(front.normal, variables(low));
        L.nu = std::move(nu);
    } else {
        L.nu = derive_plane_normal(front, p, order - 1, tol, &L.normal_shift);
        for (auto& c : L.nu) c = Jet(L.jac.front().space(), std::vector<Scalar>(c.coefficients().begin(), c.coefficients().end()));
    }
    if (norm(values(L.nu)) <= tol.tol_zero) throw NumericError("normal vanishes at the query point");
    const int size = L.m;
    std::vector<Jet> entries;
    entries.reserve(static_cast<std::size_t>(size * size));
    for (int r = 0; r < size; ++r) {
        for (int c = 0; c < L.n; ++c) entries.push_back(L.jac[static_cast<std::size_t>(r * L.n + c)]);
        entries.push_back(L.nu[static_cast<std::size_t>(r)]);
    }
    L.lambda = determinant(entries, size);
    return L;
}

FrontLocal map_local(const std::vector<Expr>& map, int n, Field field, const Point& p, int order) {
    check_point(n, p);
    if (order < 1) throw OrderExhausted("map data needs jet order >= 1");
    if (static_cast<int>(map.size()) != n) throw PreconditionError("equidimensional map must have n components");
    FrontLocal L;
    L.n = n;
    L.m = n;
    L.order = order;
    L.space = JetSpace::make(p, order, field);
    L.f = evaluate(map, variables(L.space));
    L.jac = jacobian(L.f, n);
    L.scale = jacobian_scale(L.jac);
    L.lambda = determinant(L.jac, n);
    return L;
}

Jet lambda(const FrontInstance& front, const Point& p, int d, const Tolerances& tol) {
    if (d < 0) throw PreconditionError("jet order must be >= 0");
    return front_local(front, p, d + 1, tol).lambda;
}

NullField null_field(const std::vector<Jet>& jac, int m, int n, double tol_zero, double scale) {
    NullField out;
    if (n == 1) {
        out.eta = {Jet::constant(jac.front().space(), Scalar{1.0})};
        out.raw_norm = 1.0;
        return out;
    }
    Matrix J(m, n);
    for (int r = 0; r < m; ++r)
        for (int c = 0; c < n; ++c) J(r, c) = jac[static_cast<std::size_t>(r * n + c)].value();

    std::vector<std::vector<int>> subsets;
    std::vector<int> cur;
    combinations(m, n - 1, 0, cur, subsets);
    double best = -1.0;
    const std::vector<int>* chosen = nullptr;
    for (const auto& rows : subsets) {
        double local = 0.0;
        for (int j = 0; j < n; ++j) {
            Matrix M(n - 1, n - 1);
            for (int a = 0; a < n - 1; ++a)
                for (int c = 0, cc = 0; c < n; ++c)
                    if (c != j) M(a, cc++) = J(rows[a], c);
            local = std::max(local, std::abs(M.determinant()));
        }
        if (local > best) {
            best = local;
            chosen = &rows;
        }
    }
    out.rows = *chosen;
    for (int j = 0; j < n; ++j) {
        std::vector<Jet> entries;
        for (int a = 0; a < n - 1; ++a)
            for (int c = 0; c < n; ++c)
                if (c != j) entries.push_back(jac[static_cast<std::size_t>(out.rows[a] * n + c)]);
        Jet minor = determinant(entries, n - 1);
        out.eta.push_back(j % 2 == 0 ? minor : -minor);
    }
    out.raw_norm = norm(values(out.eta));
    if (out.raw_norm <= tol_zero * std::pow(scale, n - 1))
        throw CorankTooHigh("corank >= 2: every (n-1)-minor of the Jacobian vanishes, the null direction is not unique");
    for (auto& e : out.eta) e *= Scalar{1.0 / out.raw_norm};
    return out;
}

std::vector<Jet> extended_null_field(const FrontInstance& front, const Point& p, int d, const Tolerances& tol) {
    auto L = front_local(front, p, d + 1, tol);
    return null_field(L.jac, L.m, L.n, tol.tol_zero, L.scale).eta;
}

std::vector<Jet> chain_jets(const Jet& lambda, const std::vector<Jet>& eta, int k_max) {
    std::vector<Jet> chain{lambda};
    for (int i = 1; i <= k_max; ++i) {
        if (chain.back().order() < 1)
            throw OrderExhausted("lambda^(" + std::to_string(i) + ") needs a higher jet order");
        chain.push_back(directional_derivative(chain.back(), eta));
    }
    return chain;
}

int chain_order(int k_max, const Tolerances& tol) {
    const int needed = k_max + 1;
    if (tol.jet_order < needed)
        throw OrderExhausted("jet order " + std::to_string(tol.jet_order) + " is below the " + std::to_string(needed) +
                             " required for " + std::to_string(k_max) + " derivatives along the null field");
    return std::min(tol.jet_order, k_max + 2);
}

LambdaChain make_chain(const FrontLocal& local, const NullField& field, int k_max) {
    LambdaChain ch;
    ch.point = local.space->point;
    ch.scale = local.scale;
    ch.jet_order = local.order;
    ch.rows = field.rows;
    ch.eta = values(field.eta);
    auto chain = chain_jets(local.lambda, field.eta, k_max);
    ch.values = values(chain);
    ch.jacobian = Matrix::Zero(k_max, local.n);
    for (int i = 0; i < k_max; ++i) {
        if (chain[static_cast<std::size_t>(i)].order() < 1)
            throw OrderExhausted("gradient of lambda^(" + std::to_string(i) + ") needs a higher jet order");
        for (int c = 0; c < local.n; ++c) ch.jacobian(i, c) = chain[static_cast<std::size_t>(i)].partial(c);
    }
    return ch;
}

LambdaChain lambda_chain(const FrontInstance& front, const Point& p, int k_max, const Tolerances& tol) {
    if (k_max < 0 || k_max > front.n) throw PreconditionError("k_max must lie in [0, n]");
    const int order = chain_order(k_max, tol);
    auto L = front_local(front, p, order, tol);
    auto field = null_field(L.jac, L.m, L.n, tol.tol_zero, L.scale);
    return make_chain(L, field, k_max);
}

} // namespace wavefront
