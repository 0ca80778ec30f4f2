#pragma once

#include <complex>
#include <string_view>
#include <vector>

namespace wavefront {

/// All arithmetic runs over complex scalars; real fronts simply keep zero imaginary parts.
using Scalar = std::complex<double>;
using Point = std::vector<Scalar>;

enum class Field { Real, Complex };

inline std::string_view to_string(Field f) { return f == Field::Real ? "real" : "complex"; }

inline Point real_point(std::initializer_list<double> xs) {
    Point p;
    p.reserve(xs.size());
    for (double x : xs) p.emplace_back(x, 0.0);
    return p;
}

inline Point to_point(const std::vector<double>& xs) {
    Point p;
    p.reserve(xs.size());
    for (double x : xs) p.emplace_back(x, 0.0);
    return p;
}

} // namespace wavefront
