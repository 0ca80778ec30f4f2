#pragma once

// Truncated multivariate Taylor expansions ("jets").
//
// A jet of order d in n variables stores the coefficients c_a = D^a g(p) / a! for every
// multi-index a with |a| <= d, in graded-lexicographic order. Because lower total degrees
// come first, the order-d' truncation of an order-d jet is a prefix of its coefficient table.

#include "wavefront/error.hpp"
#include "wavefront/scalar.hpp"

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace wavefront {

/// Shared index tables for one (nvars, order) pair. Obtained through `JetLayout::get`.
class JetLayout {
public:
    static std::shared_ptr<const JetLayout> get(int nvars, int order);

    int nvars() const noexcept { return nvars_; }
    int order() const noexcept { return order_; }
    std::size_t size() const noexcept { return degree_.size(); }

    /// Exponent of variable v in the multi-index at position i.
    int exponent(std::size_t i, int v) const noexcept { return exps_[i * static_cast<std::size_t>(nvars_) + v]; }
    int degree(std::size_t i) const noexcept { return degree_[i]; }

    /// Position of a multi-index, or -1 when its total degree exceeds the order.
    std::ptrdiff_t position(std::span<const int> alpha) const;

    /// Number of coefficients of total degree <= d.
    std::size_t prefix_size(int d) const;

    struct Triple {
        std::uint32_t lhs, rhs, out;
    };
    const std::vector<Triple>& product_table() const noexcept { return products_; }

    struct DerivativeEntry {
        std::uint32_t src, dst;
        double factor;
    };
    /// Entries mapping coefficient src (order d layout) to dst (order d-1 layout) for d/dx_v.
    const std::vector<DerivativeEntry>& derivative_table(int v) const { return derivatives_[v]; }

    JetLayout(int nvars, int order);

private:
    std::int64_t key(std::span<const int> alpha) const;

    int nvars_;
    int order_;
    std::vector<std::uint8_t> exps_;
    std::vector<int> degree_;
    std::vector<std::size_t> prefix_;
    std::vector<std::pair<std::int64_t, std::uint32_t>> keys_; // sorted for lookup
    std::vector<Triple> products_;
    std::vector<std::vector<DerivativeEntry>> derivatives_;
};

/// Base point, order and field shared by all jets of one computation.
struct JetSpace {
    std::shared_ptr<const JetLayout> layout;
    Point point;
    Field field = Field::Real;

    static std::shared_ptr<const JetSpace> make(Point point, int order, Field field = Field::Real);
    std::shared_ptr<const JetSpace> with_order(int order) const;

    int order() const noexcept { return layout->order(); }
    int nvars() const noexcept { return layout->nvars(); }
};

using JetSpacePtr = std::shared_ptr<const JetSpace>;

bool compatible(const JetSpace& a, const JetSpace& b);

class Jet {
public:
    Jet() = default;
    explicit Jet(JetSpacePtr space);
    Jet(JetSpacePtr space, std::vector<Scalar> coeffs);

    static Jet constant(const JetSpacePtr& space, Scalar c);
    /// The coordinate function x_v, expanded at the space's base point.
    static Jet variable(const JetSpacePtr& space, int v);

    const JetSpacePtr& space() const noexcept { return space_; }
    int order() const noexcept { return space_->order(); }
    int nvars() const noexcept { return space_->nvars(); }
    Field field() const noexcept { return space_->field; }
    bool empty() const noexcept { return !space_; }

    Scalar value() const noexcept { return coeffs_[0]; }
    Scalar operator[](std::size_t i) const noexcept { return coeffs_[i]; }
    Scalar& operator[](std::size_t i) noexcept { return coeffs_[i]; }
    std::span<const Scalar> coefficients() const noexcept { return coeffs_; }
    Scalar coefficient(std::span<const int> alpha) const;
    /// First partial derivative d/dx_v at the base point (requires order >= 1).
    Scalar partial(int v) const;
    std::vector<Scalar> gradient() const;

    Jet truncated(int order) const;
    Jet derivative(int v) const;

    Jet operator-() const;
    Jet& operator+=(const Jet& o);
    Jet& operator-=(const Jet& o);
    Jet& operator*=(Scalar c);

    friend Jet operator+(Jet a, const Jet& b) { return a += b; }
    friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
    friend Jet operator*(const Jet& a, const Jet& b);
    friend Jet operator/(const Jet& a, const Jet& b);
    friend Jet operator*(Jet a, Scalar c) { return a *= c; }
    friend Jet operator*(Scalar c, Jet a) { return a *= c; }
    friend Jet operator+(Jet a, Scalar c) {
        a.coeffs_[0] += c;
        return a;
    }
    friend Jet operator-(Jet a, Scalar c) {
        a.coeffs_[0] -= c;
        return a;
    }

private:
    JetSpacePtr space_;
    std::vector<Scalar> coeffs_;
};

void require_compatible(const Jet& a, const Jet& b);

/// Coefficient sequence c_0..c_d of g(a0 + x) = sum c_m x^m, applied to the jet a.
Jet apply_series(const Jet& a, std::span<const Scalar> coeffs);

Jet reciprocal(const Jet& a);
Jet exp(const Jet& a);
Jet log(const Jet& a);
Jet sqrt(const Jet& a);
Jet sin(const Jet& a);
Jet cos(const Jet& a);
Jet pow(const Jet& a, int exponent);

/// Sum_i v_i * d/dx_i j. The result has order min(order(j) - 1, order(v)).
Jet directional_derivative(const Jet& j, std::span<const Jet> field);

/// Substitutes jets (all in one common space, constant terms equal to the base point of `outer`)
/// into the Taylor polynomial held by `outer`.
Jet compose(const Jet& outer, std::span<const Jet> inner);

/// Determinant of a square matrix of jets (row-major), by cofactor expansion with memoized minors.
Jet determinant(std::span<const Jet> entries, int size);

} // namespace wavefront
