#include "wavefront/jet.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <mutex>
#include <numeric>

namespace wavefront {

namespace {

void enumerate_degree(int nvars, int degree, int v, std::vector<int>& current, std::vector<std::uint8_t>& out) {
    if (v == nvars - 1) {
        current[v] = degree;
        out.insert(out.end(), current.begin(), current.end());
        return;
    }
    for (int e = degree; e >= 0; --e) {
        current[v] = e;
        enumerate_degree(nvars, degree - e, v + 1, current, out);
    }
}

} // namespace

JetLayout::JetLayout(int nvars, int order) : nvars_(nvars), order_(order) {
    if (nvars < 0 || order < 0) throw PreconditionError("jet layout needs nvars >= 0 and order >= 0");
    if (nvars == 0) {
        degree_ = {0};
        prefix_.assign(static_cast<std::size_t>(order) + 1, 1);
        keys_ = {{0, 0}};
        products_ = {{0, 0, 0}};
        return;
    }
    std::vector<int> current(static_cast<std::size_t>(nvars), 0);
    for (int d = 0; d <= order; ++d) {
        std::vector<std::uint8_t> block;
        enumerate_degree(nvars, d, 0, current, block);
        exps_.insert(exps_.end(), block.begin(), block.end());
        prefix_.push_back(exps_.size() / static_cast<std::size_t>(nvars));
    }
    const std::size_t count = exps_.size() / static_cast<std::size_t>(nvars);
    degree_.resize(count);
    keys_.reserve(count);
    std::vector<int> alpha(static_cast<std::size_t>(nvars));
    for (std::size_t i = 0; i < count; ++i) {
        int deg = 0;
        for (int v = 0; v < nvars; ++v) {
            alpha[v] = exponent(i, v);
            deg += alpha[v];
        }
        degree_[i] = deg;
        keys_.emplace_back(key(alpha), static_cast<std::uint32_t>(i));
    }
    std::sort(keys_.begin(), keys_.end());

    std::vector<int> sum(static_cast<std::size_t>(nvars));
    for (std::size_t i = 0; i < count; ++i) {
        for (std::size_t j = 0; j < count && degree_[i] + degree_[j] <= order; ++j) {
            for (int v = 0; v < nvars; ++v) sum[v] = exponent(i, v) + exponent(j, v);
            auto k = position(sum);
            products_.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), static_cast<std::uint32_t>(k)});
        }
    }

    derivatives_.resize(static_cast<std::size_t>(nvars));
    for (int v = 0; v < nvars; ++v) {
        for (std::size_t i = 0; i < count; ++i) {
            int e = exponent(i, v);
            if (e == 0) continue;
            for (int w = 0; w < nvars; ++w) alpha[w] = exponent(i, w);
            alpha[v] -= 1;
            auto dst = position(alpha);
            derivatives_[v].push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(dst), double(e)});
        }
    }
}

std::int64_t JetLayout::key(std::span<const int> alpha) const {
    std::int64_t k = 0;
    for (int v = nvars_ - 1; v >= 0; --v) k = k * (order_ + 1) + alpha[v];
    return k;
}

std::ptrdiff_t JetLayout::position(std::span<const int> alpha) const {
    int deg = 0;
    for (int e : alpha) {
        if (e < 0) return -1;
        deg += e;
    }
    if (deg > order_) return -1;
    if (nvars_ == 0) return 0;
    auto k = key(alpha);
    auto it = std::lower_bound(keys_.begin(), keys_.end(), std::make_pair(k, std::uint32_t{0}));
    if (it == keys_.end() || it->first != k) return -1;
    return it->second;
}

std::size_t JetLayout::prefix_size(int d) const {
    if (d < 0) return 0;
    return prefix_[static_cast<std::size_t>(std::min(d, order_))];
}

std::shared_ptr<const JetLayout> JetLayout::get(int nvars, int order) {
    static std::mutex mutex;
    static std::map<std::pair<int, int>, std::shared_ptr<const JetLayout>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[{nvars, order}];
    if (!slot) slot = std::make_shared<const JetLayout>(nvars, order);
    return slot;
}

std::shared_ptr<const JetSpace> JetSpace::make(Point point, int order, Field field) {
    auto space = std::make_shared<JetSpace>();
    space->layout = JetLayout::get(static_cast<int>(point.size()), order);
    space->point = std::move(point);
    space->field = field;
    return space;
}

std::shared_ptr<const JetSpace> JetSpace::with_order(int order) const {
    if (order == layout->order()) {
        return std::make_shared<const JetSpace>(*this);
    }
    return make(point, order, field);
}

bool compatible(const JetSpace& a, const JetSpace& b) {
    if (&a == &b) return true;
    return a.layout == b.layout && a.field == b.field && a.point == b.point;
}

void require_compatible(const Jet& a, const Jet& b) {
    if (a.empty() || b.empty()) throw PreconditionError("arithmetic on an empty jet");
    if (a.space().get() == b.space().get()) return;
    if (!compatible(*a.space(), *b.space())) {
        if (a.order() != b.order())
            throw PreconditionError("jet arithmetic requires equal orders (" + std::to_string(a.order()) + " vs " +
                                    std::to_string(b.order()) + ")");
        throw PreconditionError("jet arithmetic requires equal base point, variables and field");
    }
}

Jet::Jet(JetSpacePtr space) : space_(std::move(space)), coeffs_(space_->layout->size(), Scalar{}) {}

Jet::Jet(JetSpacePtr space, std::vector<Scalar> coeffs) : space_(std::move(space)), coeffs_(std::move(coeffs)) {
    if (coeffs_.size() != space_->layout->size()) throw PreconditionError("coefficient table size mismatch");
}

Jet Jet::constant(const JetSpacePtr& space, Scalar c) {
    Jet j(space);
    j.coeffs_[0] = c;
    return j;
}

Jet Jet::variable(const JetSpacePtr& space, int v) {
    Jet j(space);
    j.coeffs_[0] = space->point.at(static_cast<std::size_t>(v));
    if (space->order() >= 1) {
        std::vector<int> alpha(static_cast<std::size_t>(space->nvars()), 0);
        alpha[v] = 1;
        j.coeffs_[static_cast<std::size_t>(space->layout->position(alpha))] = Scalar{1.0};
    }
    return j;
}

Scalar Jet::coefficient(std::span<const int> alpha) const {
    auto pos = space_->layout->position(alpha);
    if (pos < 0) throw OrderExhausted("coefficient beyond jet order " + std::to_string(order()));
    return coeffs_[static_cast<std::size_t>(pos)];
}

Scalar Jet::partial(int v) const {
    if (order() < 1) throw OrderExhausted("first partial of an order-0 jet");
    // Degree-1 block follows the constant term, x_1 first.
    return coeffs_[1 + static_cast<std::size_t>(v)];
}

std::vector<Scalar> Jet::gradient() const {
    std::vector<Scalar> g(static_cast<std::size_t>(nvars()));
    for (int v = 0; v < nvars(); ++v) g[v] = partial(v);
    return g;
}

Jet Jet::truncated(int d) const {
    if (d > order()) throw OrderExhausted("cannot raise jet order from " + std::to_string(order()) + " to " + std::to_string(d));
    if (d == order()) return *this;
    auto space = space_->with_order(d);
    std::vector<Scalar> c(coeffs_.begin(), coeffs_.begin() + static_cast<std::ptrdiff_t>(space->layout->size()));
    return Jet(std::move(space), std::move(c));
}

Jet Jet::derivative(int v) const {
    if (order() < 1) throw OrderExhausted("derivative of an order-0 jet");
    auto space = space_->with_order(order() - 1);
    Jet out(space);
    const std::size_t limit = space->layout->size();
    for (const auto& e : space_->layout->derivative_table(v)) {
        if (e.dst < limit) out.coeffs_[e.dst] += e.factor * coeffs_[e.src];
    }
    return out;
}

Jet Jet::operator-() const {
    Jet out = *this;
    for (auto& c : out.coeffs_) c = -c;
    return out;
}

Jet& Jet::operator+=(const Jet& o) {
    require_compatible(*this, o);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
    return *this;
}

Jet& Jet::operator-=(const Jet& o) {
    require_compatible(*this, o);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
    return *this;
}

Jet& Jet::operator*=(Scalar c) {
    for (auto& x : coeffs_) x *= c;
    return *this;
}

Jet operator*(const Jet& a, const Jet& b) {
    require_compatible(a, b);
    Jet out(a.space_);
    const auto& table = a.space_->layout->product_table();
    const Scalar* pa = a.coeffs_.data();
    const Scalar* pb = b.coeffs_.data();
    Scalar* po = out.coeffs_.data();
    // Triples are grouped by lhs; skip whole groups when the lhs coefficient is zero.
    std::size_t t = 0;
    while (t < table.size()) {
        const auto lhs = table[t].lhs;
        const Scalar x = pa[lhs];
        if (x == Scalar{}) {
            while (t < table.size() && table[t].lhs == lhs) ++t;
            continue;
        }
        for (; t < table.size() && table[t].lhs == lhs; ++t) po[table[t].out] += x * pb[table[t].rhs];
    }
    return out;
}

Jet apply_series(const Jet& a, std::span<const Scalar> coeffs) {
    Jet x = a;
    x[0] = Scalar{};
    const int d = std::min<int>(a.order(), static_cast<int>(coeffs.size()) - 1);
    Jet acc = Jet::constant(a.space(), coeffs[static_cast<std::size_t>(d)]);
    for (int m = d - 1; m >= 0; --m) {
        acc = acc * x;
        acc[0] += coeffs[static_cast<std::size_t>(m)];
    }
    return acc;
}

Jet reciprocal(const Jet& a) {
    const Scalar a0 = a.value();
    if (a0 == Scalar{}) throw DomainError({}, "division by zero");
    std::vector<Scalar> c(static_cast<std::size_t>(a.order()) + 1);
    Scalar inv = 1.0 / a0;
    Scalar term = inv;
    for (std::size_t m = 0; m < c.size(); ++m) {
        c[m] = term;
        term *= -inv;
    }
    return apply_series(a, c);
}

Jet operator/(const Jet& a, const Jet& b) {
    require_compatible(a, b);
    return a * reciprocal(b);
}

Jet exp(const Jet& a) {
    std::vector<Scalar> c(static_cast<std::size_t>(a.order()) + 1);
    Scalar e = std::exp(a.value());
    double fact = 1.0;
    for (std::size_t m = 0; m < c.size(); ++m) {
        if (m > 0) fact *= double(m);
        c[m] = e / fact;
    }
    return apply_series(a, c);
}

Jet log(const Jet& a) {
    const Scalar a0 = a.value();
    if (a0 == Scalar{}) throw DomainError({}, "log of zero");
    std::vector<Scalar> c(static_cast<std::size_t>(a.order()) + 1);
    c[0] = std::log(a0);
    Scalar inv = 1.0 / a0;
    Scalar pw = inv;
    for (std::size_t m = 1; m < c.size(); ++m) {
        c[m] = ((m % 2 == 1) ? 1.0 : -1.0) * pw / double(m);
        pw *= inv;
    }
    return apply_series(a, c);
}

Jet sqrt(const Jet& a) {
    const Scalar a0 = a.value();
    if (a0 == Scalar{} && a.order() > 0) throw DomainError({}, "sqrt is not differentiable at zero");
    std::vector<Scalar> c(static_cast<std::size_t>(a.order()) + 1);
    const Scalar root = std::sqrt(a0);
    c[0] = root;
    // binom(1/2, m) * a0^(1/2 - m)
    double binom = 1.0;
    Scalar pw = root;
    for (std::size_t m = 1; m < c.size(); ++m) {
        binom *= (0.5 - double(m - 1)) / double(m);
        pw /= a0;
        c[m] = binom * pw;
    }
    return apply_series(a, c);
}

Jet sin(const Jet& a) {
    std::vector<Scalar> c(static_cast<std::size_t>(a.order()) + 1);
    const Scalar s = std::sin(a.value());
    const Scalar co = std::cos(a.value());
    const Scalar cycle[4] = {s, co, -s, -co};
    double fact = 1.0;
    for (std::size_t m = 0; m < c.size(); ++m) {
        if (m > 0) fact *= double(m);
        c[m] = cycle[m % 4] / fact;
    }
    return apply_series(a, c);
}

Jet cos(const Jet& a) {
    std::vector<Scalar> c(static_cast<std::size_t>(a.order()) + 1);
    const Scalar s = std::sin(a.value());
    const Scalar co = std::cos(a.value());
    const Scalar cycle[4] = {co, -s, -co, s};
    double fact = 1.0;
    for (std::size_t m = 0; m < c.size(); ++m) {
        if (m > 0) fact *= double(m);
        c[m] = cycle[m % 4] / fact;
    }
    return apply_series(a, c);
}

Jet pow(const Jet& a, int exponent) {
    if (exponent < 0) return reciprocal(pow(a, -exponent));
    Jet result = Jet::constant(a.space(), Scalar{1.0});
    Jet base = a;
    int e = exponent;
    while (e > 0) {
        if (e & 1) result = result * base;
        e >>= 1;
        if (e) base = base * base;
    }
    return result;
}

Jet directional_derivative(const Jet& j, std::span<const Jet> field) {
    if (j.order() < 1) throw OrderExhausted("directional derivative needs a jet of order >= 1");
    if (static_cast<int>(field.size()) != j.nvars()) throw PreconditionError("vector field dimension mismatch");
    int order = j.order() - 1;
    for (const auto& v : field) order = std::min(order, v.order());
    Jet out;
    for (int i = 0; i < j.nvars(); ++i) {
        Jet term = j.derivative(i).truncated(order) * field[static_cast<std::size_t>(i)].truncated(order);
        if (out.empty())
            out = std::move(term);
        else
            out += term;
    }
    if (out.empty()) out = Jet::constant(j.space()->with_order(order), Scalar{});
    return out;
}

Jet compose(const Jet& outer, std::span<const Jet> inner) {
    if (static_cast<int>(inner.size()) != outer.nvars()) throw PreconditionError("compose: arity mismatch");
    if (inner.empty()) throw PreconditionError("compose: no inner jets");
    const auto& space = inner.front().space();
    std::vector<Jet> delta;
    delta.reserve(inner.size());
    for (std::size_t v = 0; v < inner.size(); ++v) {
        require_compatible(inner[v], inner.front());
        delta.push_back(inner[v] - outer.space()->point[v]);
        delta.back()[0] = Scalar{};
    }
    const auto& layout = *outer.space()->layout;
    const int max_degree = std::min(outer.order(), space->order());
    const std::size_t count = layout.prefix_size(max_degree);
    std::vector<Jet> powers(count);
    powers[0] = Jet::constant(space, Scalar{1.0});
    Jet result = Jet::constant(space, outer[0]);
    std::vector<int> alpha(static_cast<std::size_t>(outer.nvars()));
    for (std::size_t i = 1; i < count; ++i) {
        int v = 0;
        while (layout.exponent(i, v) == 0) ++v;
        for (int w = 0; w < outer.nvars(); ++w) alpha[w] = layout.exponent(i, w);
        alpha[v] -= 1;
        auto prev = static_cast<std::size_t>(layout.position(alpha));
        powers[i] = powers[prev] * delta[static_cast<std::size_t>(v)];
        if (outer[i] != Scalar{}) result += powers[i] * outer[i];
    }
    return result;
}

Jet determinant(std::span<const Jet> entries, int size) {
    if (static_cast<int>(entries.size()) != size * size) throw PreconditionError("determinant: not square");
    if (size == 0) throw PreconditionError("determinant of empty matrix needs a space");
    if (size > 12) throw PreconditionError("determinant: matrix too large for cofactor expansion");
    // minors[mask] = det(rows 0..popcount-1, columns in mask)
    std::vector<Jet> minors(std::size_t{1} << size);
    minors[0] = Jet::constant(entries[0].space(), Scalar{1.0});
    for (unsigned mask = 1; mask < (1u << size); ++mask) {
        const int k = std::popcount(mask);
        const int row = k - 1;
        Jet acc;
        int idx = 0;
        for (int c = 0; c < size; ++c) {
            if (!(mask & (1u << c))) continue;
            const Jet& a = entries[static_cast<std::size_t>(row * size + c)];
            Jet term = a * minors[mask & ~(1u << c)];
            if ((row + idx) % 2 == 1) term = -term;
            if (acc.empty())
                acc = std::move(term);
            else
                acc += term;
            ++idx;
        }
        minors[mask] = std::move(acc);
    }
    return minors[(1u << size) - 1];
}

} // namespace wavefront
