#pragma once

// Geometric primitives of a front at a point: lambda, the extended null field, the
// lambda chain along it, and numerical rank.

#include "wavefront/front.hpp"
#include "wavefront/jet.hpp"

#include <Eigen/Dense>

#include <vector>

namespace wavefront {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

struct Tolerances {
    double tol_zero = 1e-8; // relative to the local scale
    double tol_rank = 1e-6; // relative to the largest singular value
    int jet_order = 10;     // cap; the engine uses what the criteria need, up to this
};

struct RankReport {
    int rows = 0, cols = 0;
    std::vector<double> singular_values; // descending
    int rank = 0;
    double tol_rank = 0.0;
    double floor = 0.0; // absolute cut-off below which a singular value never counts
};

/// Rank = #{sigma > max(tol_rank * sigma_max, floor)}.
RankReport numerical_rank(const Matrix& m, double tol_rank, double floor = 0.0);

/// Orthonormal basis (columns) of ker m. Real inputs give real bases.
Matrix null_space(const Matrix& m, Field field, double tol_rank, double floor = 0.0);

enum class Band { Vanishes, Nonzero, Ambiguous };

/// "vanishes" if |v| <= tol*scale, "nonzero" if |v| >= 10*tol*scale.
Band band(Scalar v, double tol_zero, double scale);

/// Jets of one evaluation point: f, its Jacobian, the normal and lambda.
struct FrontLocal {
    int n = 0;      // source dimension
    int m = 0;      // target dimension (n+1 for fronts, n for equidimensional maps)
    int order = 0;  // order of f
    JetSpacePtr space;
    std::vector<Jet> f;   // m jets of order `order`
    std::vector<Jet> jac; // row-major m x n, order `order`-1
    std::vector<Jet> nu;  // fronts only: m jets of order `order`-1
    Jet lambda;           // order `order`-1
    double scale = 1.0;   // max(1, max |d_c f_r(p)|)
    int normal_shift = 0; // common vanishing order removed from a derived plane-curve normal
};

/// Evaluates a front to jet order `order` at p. Without a supplied normal, n must be 1 and the
/// normal is derived from the velocity (see derive_plane_normal).
FrontLocal front_local(const FrontInstance& front, const Point& p, int order, const Tolerances& tol = {});

/// lambda = det of the Jacobian for an equidimensional map.
FrontLocal map_local(const std::vector<Expr>& map, int n, Field field, const Point& p, int order);

/// Jet (order d) of det(f_{x_1}, ..., f_{x_n}, nu) at p.
Jet lambda(const FrontInstance& front, const Point& p, int d, const Tolerances& tol = {});

/// Normal of a plane curve from its velocity: J * (f' / (t - t0)^r) with r the common vanishing
/// order of f' at t0 (J = rotation by +90 degrees). Returns jets of order `order`.
std::vector<Jet> derive_plane_normal(const FrontInstance& front, const Point& p, int order, const Tolerances& tol,
                                     int* shift = nullptr);

struct NullField {
    std::vector<Jet> eta;  // n jets, scaled so that |eta(p)| = 1
    std::vector<int> rows; // rows of the Jacobian used for the minors
    double raw_norm = 0.0; // |eta(p)| before scaling
};

/// Extended null field from the (n-1)-minors of an m x n Jacobian of jets.
/// Throws CorankTooHigh when every row selection gives |eta(p)| <= tol_zero * scale^(n-1).
NullField null_field(const std::vector<Jet>& jac, int m, int n, double tol_zero, double scale);

/// eta jets for a front at p (order d).
std::vector<Jet> extended_null_field(const FrontInstance& front, const Point& p, int d, const Tolerances& tol = {});

/// lambda^{(0..k_max)} as jets: entry i has order order(lambda) - i.
std::vector<Jet> chain_jets(const Jet& lambda, const std::vector<Jet>& eta, int k_max);

struct LambdaChain {
    Point point;
    std::vector<Scalar> values; // lambda^{(0..k_max)}(p)
    std::vector<Scalar> eta;    // eta(p), unit length
    Matrix jacobian;            // k_max x n: gradients of lambda^{(i)}, i < k_max
    std::vector<int> rows;
    double scale = 1.0;
    int jet_order = 0;
};

/// Jet order needed to evaluate the chain through lambda^{(k_max)} with its Jacobian.
int chain_order(int k_max, const Tolerances& tol);

LambdaChain make_chain(const FrontLocal& local, const NullField& field, int k_max);
LambdaChain lambda_chain(const FrontInstance& front, const Point& p, int k_max, const Tolerances& tol = {});

/// Euclidean norm with complex modulus.
double norm(const std::vector<Scalar>& v);
Vector to_vector(const std::vector<Scalar>& v);
std::vector<Scalar> values(const std::vector<Jet>& jets);

} // namespace wavefront
