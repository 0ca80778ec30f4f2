#pragma once

// Loops on real fronts: co-orientability, zig-zag numbers and the normal curvature map.

#include "wavefront/classifier.hpp"

#include <optional>

namespace wavefront {

/// Sampling too coarse for the loop; analyze_loop retries with twice the samples.
class SamplingTooCoarse : public NumericError {
public:
    using NumericError::NumericError;
};

/// The continuous unit normal along a loop. `normals` has samples + 1 rows (s_i = i / samples).
struct NormalTransport {
    int samples = 0;
    std::vector<double> s;
    std::vector<std::vector<double>> normals;
    std::vector<int> signs; // sign applied to the raw normal at each sample
    bool coorientable = true;
    int rho = 0; // 0 if co-orientable, 1 otherwise
};

struct CrossingRecord {
    double s = 0.0;             // loop parameter
    Point point;                // source point gamma(s)
    Point image;                // f(gamma(s))
    SingularityClass cls;       // always A2 for accepted crossings
    int s_minus = 0, s_plus = 0; // +1 when the transported normal is inward on that side
    double lambda = 0.0;        // residual of the signed area function at the refined crossing
    double slope = 0.0;         // d(lambda o gamma)/ds at the crossing
    std::vector<double> second; // second derivative of f along the null direction, used for the inward test
    double null_residual = 0.0; // |(f o gamma)'| / (max(1, |df|) |gamma'|); ~0 when gamma' lies in ker df
};

struct SignSequence {
    std::vector<int> raw;        // eps_0, ..., eps_{m+1}
    std::vector<int> normalized; // no two adjacent equal signs
    int z = 0;
};

struct ZigzagReport {
    std::string front, loop;
    int samples = 0;
    bool coorientable = true;
    int rho = 0;
    std::vector<CrossingRecord> crossings;
    std::optional<SignSequence> sequence; // co-orientable loops only
    bool null_loop = true;                // gamma' in ker df at every crossing
    std::optional<int> maslov;            // signed rotation index of the normal curvature map; null loops only
    std::optional<bool> consistent;       // |maslov| == z
    std::vector<std::pair<double, double>> angle_trace; // (s, theta), theta unwrapped; null loops only
    std::string note;
};

/// Removes adjacent equal pairs until none remain.
std::vector<int> normalize(const std::vector<int>& raw);
SignSequence make_sign_sequence(const std::vector<int>& raw);
/// eps_0 = +1, eps_j = eps_{j-1} s^+_{j-1} s^-_j (s^+_0 = +1), eps_{m+1} = eps_m s^+_m.
std::vector<int> raw_sequence(const std::vector<CrossingRecord>& crossings);

/// Loop closedness: f o gamma, its first derivative and the line of nu agree at s = 0 and s = 1.
void check_loop_closed(const FrontInstance& front, const LoopSpec& loop, const Tolerances& tol = {});

NormalTransport transport_normal(const FrontInstance& front, const LoopSpec& loop, int samples,
                                 const Tolerances& tol = {});
std::vector<CrossingRecord> detect_crossings(const FrontInstance& front, const LoopSpec& loop,
                                             const NormalTransport& transport, const Tolerances& tol = {});
/// Unwrapped angles of [g(c', c') : g(nu', c')] in R / pi Z at the transport samples.
std::vector<double> normal_curvature_map(const FrontInstance& front, const LoopSpec& loop,
                                         const NormalTransport& transport, const Tolerances& tol = {});
/// round((theta(1) - theta(0)) / 2pi); throws NumericError when the rounding guard pi/4 fails.
int maslov_index(const std::vector<double>& theta);

/// Crossings with null_residual above this are treated as transverse to ker df.
inline constexpr double null_loop_tol = 1e-6;

/// Full pipeline with adaptive sampling: doubles the sample count from loop.samples until adjacent
/// normals are within 60 degrees, crossings are isolated by >= 4 samples and angle jumps are < pi/8.
/// The normal curvature map and the rotation index are computed for null loops only.
ZigzagReport analyze_loop(const FrontInstance& front, const LoopSpec& loop, const Tolerances& tol = {});

/// "s,theta" lines with a header.
std::string angle_trace_csv(const ZigzagReport& report);

} // namespace wavefront
