#pragma once

// Equidimensional maps: Morin classification and the front <-> map correspondences.

#include "wavefront/classifier.hpp"

namespace wavefront {

struct MorinReport {
    Point point;
    SingularityClass cls; // A(k) is the A_k-Morin singularity; Regular is A_0
    std::optional<LambdaChain> chain;
    RankReport rank;
    std::string note;
    Tolerances tol;
    double seconds = 0.0;
};

MorinReport classify_morin(const MorinMapInstance& map, const Point& p, const Tolerances& tol = {}, int k_max = -1);

/// The front class matching a Morin class: A_1 (fold) corresponds to a regular front point.
SingularityClass as_front_class(const SingularityClass& morin);

/// x -> A f(psi(x)) + b for an equidimensional map; A is n x n.
MorinMapInstance conjugate_map(const MorinMapInstance& map, const std::vector<Expr>& psi, const Matrix& affine,
                               const std::vector<Scalar>& shift, const Point& base);

struct MapConjugation {
    std::vector<Expr> psi;
    Matrix affine;
    std::vector<Scalar> shift;
};
/// psi as in random_conjugation; A with condition number <= 20.
MapConjugation random_map_conjugation(int n, const Point& base, unsigned long long seed);

/// Local parametrization y -> x(y) = p + B y + h(y) w of {lambda = 0} near a 1-nondegenerate
/// point, as jets in y in K^{n-1} centred at 0. B spans ker d(lambda)(p); w = grad / |grad|^2.
struct SingularChart {
    Matrix basis;
    Vector w;
    std::vector<Jet> x;
};

/// The restriction f|_{S(f)} as a polynomial front in n-1 variables, expanded to `order` at p.
/// Its normal is a row of adj(df), the left kernel of df along S(f).
FrontInstance restrict_morin_to_front(const MorinMapInstance& map, const Point& p, const Tolerances& tol = {},
                                      int order = -1);

struct ProjectionResult {
    FrontInstance projected; // pi o f|_{S(f)} : K^{n-1} -> d^perp, coordinates in an orthonormal basis
    ClassificationReport report;
};

/// Orthogonal projection of f|_{S(f)} along `direction` onto its complement, classified at p as a
/// front in K^n. Requires n in {2, 3}, the real field, |cos(direction, nu(p))| >= 0.1.
ProjectionResult project_and_classify(const FrontInstance& front, const Point& p, const std::vector<double>& direction,
                                      const Tolerances& tol = {}, int order = -1);

} // namespace wavefront
