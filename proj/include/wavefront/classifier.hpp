#pragma once

#include "wavefront/core.hpp"

#include <optional>
#include <string>
#include <vector>

namespace wavefront {

struct SingularityClass {
    enum class Kind { Regular, A, DegenerateAtOrder, CorankTooHigh, Inconclusive };

    Kind kind = Kind::Inconclusive;
    int index = 0;      // k+1 for A_{k+1}; j for DegenerateAtOrder(j)
    std::string reason; // Inconclusive only

    static SingularityClass regular() { return {Kind::Regular, 0, {}}; }
    static SingularityClass a(int index) { return {Kind::A, index, {}}; }
    static SingularityClass degenerate(int j) { return {Kind::DegenerateAtOrder, j, {}}; }
    static SingularityClass corank() { return {Kind::CorankTooHigh, 0, {}}; }
    static SingularityClass inconclusive(std::string why) { return {Kind::Inconclusive, 0, std::move(why)}; }

    bool is_a(int i) const { return kind == Kind::A && index == i; }
    /// "Regular", "A3", "DegenerateAtOrder(2)", "CorankTooHigh", "Inconclusive".
    std::string label() const;
    friend bool operator==(const SingularityClass& a, const SingularityClass& b) {
        return a.kind == b.kind && a.index == b.index;
    }
};

enum class Route { Lambda, Mu, Both };
std::string to_string(Route r);

struct MuChain {
    Point point;
    Matrix frame;                 // n x (n-1), columns span ker d(lambda)(p)
    std::vector<Scalar> values;   // mu, mu', ..., mu^{(n-1)} at p
    std::vector<Scalar> dmu_frame; // d(mu)(v_i), i.e. d(mu) on T_p S(f)
    Matrix tangent_s2;            // n x (n-2) basis of ker d(lambda) cap ker d(lambda')
    Matrix restricted_jacobian;   // (k-2) x (n-2)
    RankReport rank;
};

struct ClassificationReport {
    Point point;
    SingularityClass cls;
    Route route = Route::Lambda;
    std::optional<LambdaChain> chain;
    RankReport rank; // rank of the Lambda Jacobian used for the decision
    std::optional<MuChain> mu;
    std::optional<SingularityClass> lambda_class, mu_class; // sub-results when route = Both
    std::string note;
    Tolerances tol;
    double seconds = 0.0;
};

/// Decision shared by fronts and equidimensional maps. Returns the first order k with
/// lambda^{(k)} nonzero as A(k) (callers shift the index), Regular, DegenerateAtOrder or Inconclusive.
SingularityClass decide_chain(const LambdaChain& chain, int k_max, const Tolerances& tol, RankReport* rank);

ClassificationReport classify_lambda_route(const FrontInstance& front, const Point& p, const Tolerances& tol = {},
                                           int k_max = -1);

/// Orthonormal basis of ker d(lambda)(p), as columns.
Matrix singular_tangent_frame(const FrontInstance& front, const Point& p, const Tolerances& tol = {});

/// `frame_override` replaces the base vectors b_i of the frame extension (n x (n-1), columns
/// spanning ker d(lambda)(p)); used to check that the decision does not depend on the frame.
ClassificationReport classify_mu_route(const FrontInstance& front, const Point& p, const Tolerances& tol = {},
                                       const Matrix* frame_override = nullptr);

/// Runs the selected route(s). With Route::Both, disagreement yields Inconclusive with both
/// sub-results attached; when the mu-route does not apply (n = 1, not 1-nondegenerate) the
/// lambda-route result stands and `note` says why.
ClassificationReport classify(const FrontInstance& front, const Point& p, Route route, const Tolerances& tol = {});

struct Box {
    std::vector<double> lo, hi;
};

struct ScanResult {
    std::vector<ClassificationReport> points;
    int seeds = 0;
    int dropped = 0; // seeds whose Newton iteration did not converge
    int errors = 0;  // converged points where classification raised an error
};

ScanResult scan_singular_set(const FrontInstance& front, const Box& box, int grid, Route route = Route::Lambda,
                             const Tolerances& tol = {});

/// psi(x) + affine target map + normal rescaling.
struct Conjugation {
    std::vector<Expr> source_diffeo; // n expressions in x
    Matrix affine;                   // (n+1) x (n+1), invertible
    std::vector<Scalar> shift;       // n+1
    Expr normal_scale;               // expression in x, nonvanishing at the base point
};

/// x -> A f(psi(x)) + b with normal s(x) * A^{-T} nu(psi(x)).
FrontInstance conjugate_front(const FrontInstance& front, const Conjugation& c, const Point& base);

/// Random conjugation fixing `base`: psi = x + polynomial terms in (x - base) of degree 2..3 with
/// coefficients in [-0.1, 0.1]; A random with condition number bounded; s = exp(random linear form).
Conjugation random_conjugation(int n, const Point& base, unsigned long long seed);

} // namespace wavefront
