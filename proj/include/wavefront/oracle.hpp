#pragma once

// Ground-truth fixtures from the normal forms, and discriminant membership tests.

#include "wavefront/front.hpp"

#include <vector>

namespace wavefront {

/// A_{k+1} front normal form in (t, x_2, ..., x_n) with normal (1, t, ..., t^k, 0, ..., 0).
/// Its image is the discriminant {F = F_t = 0} in coordinates (u_0, u_1, x_2, ..., x_n).
FrontInstance ak_front_normal_form(int k, int n);

/// A_k Morin normal form (z_1 z_n + ... + z_{k-1} z_n^{k-1} + z_n^{k+1}, z_1, ..., z_{n-1}).
MorinMapInstance morin_normal_form(int k, int n);

/// f(z,u,v) = gamma + u gamma' + v gamma'' with normal gamma' ^ gamma'' ^ gamma'''.
/// `gamma` holds four expressions in variable 0. Throws PreconditionError if gamma', ..., gamma''''
/// are dependent at one of 20 sample parameters in [-1, 1].
FrontInstance tangent_developable_fixture(const std::vector<Expr>& gamma, unsigned seed = 5);

struct MembershipVerdict {
    bool inside = false;
    Scalar witness{};        // t (when inside: the best root)
    double residual_f = 0.0; // |F| or |Phi| at the witness
    double residual_ft = 0.0;
    double tol = 0.0;
};

/// Coefficients (u_0, ..., u_k) of F = t^{k+2} + u_k t^k + ... + u_0. Finds all roots of F_t
/// (companion-matrix eigenvalues, two Newton polishing steps) and tests |F(t)| <= tol * scale.
/// For the real field only real roots count.
MembershipVerdict versal_membership(int k, const std::vector<Scalar>& u, double tol = 1e-6, Field field = Field::Real);

/// Phi(P, t) = <nu(t, Y), f(t, Y) - P> and its t-derivative, where Y are the last n-1 components
/// of the target point P and the source point is (t, Y) with t at position `null_index`.
struct PhiValue {
    Scalar phi, phi_t;
};
PhiValue phi_unfolding(const FrontInstance& front, const Point& target, Scalar t, int null_index = 0);

/// Throws PreconditionError unless the chart has the required shape: f's last n-1 components
/// equal Y, and the null coordinate direction is orthogonal to nu.
void check_phi_chart(const FrontInstance& front, int null_index = 0, unsigned seed = 9);

/// P in Im(f) locally iff Phi = Phi_t = 0 for some t in [t_lo, t_hi] (Newton from grid seeds).
MembershipVerdict phi_membership(const FrontInstance& front, const Point& target, double t_lo, double t_hi,
                                 double tol = 1e-6, int null_index = 0);

} // namespace wavefront
