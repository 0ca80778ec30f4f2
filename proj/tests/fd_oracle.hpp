#pragma once

// Central finite differences with Richardson extrapolation. Independent of the jet code.

#include <cmath>
#include <functional>
#include <vector>

namespace fd {

using Fn = std::function<double(const std::vector<double>&)>;

inline double stencil(const Fn& f, std::vector<double> x, int v, int order, double h) {
    auto at = [&](double k) {
        auto y = x;
        y[v] += k * h;
        return f(y);
    };
    switch (order) {
    case 0: return f(x);
    case 1: return (at(1) - at(-1)) / (2 * h);
    case 2: return (at(1) - 2 * at(0) + at(-1)) / (h * h);
    case 3: return (at(2) - 2 * at(1) + 2 * at(-1) - at(-2)) / (2 * h * h * h);
    case 4: return (at(2) - 4 * at(1) + 6 * at(0) - 4 * at(-1) + at(-2)) / (h * h * h * h);
    default: return NAN;
    }
}

// Mixed partial d^alpha f at x using a tensor stencil with step h.
inline double mixed(const Fn& f, const std::vector<double>& x, std::vector<int> alpha, double h) {
    for (std::size_t v = 0; v < alpha.size(); ++v) {
        if (alpha[v] == 0) continue;
        int a = alpha[v];
        alpha[v] = 0;
        Fn inner = [&, alpha](const std::vector<double>& y) { return mixed(f, y, alpha, h); };
        return stencil(inner, x, static_cast<int>(v), a, h);
    }
    return f(x);
}

// Two Richardson levels on top of the O(h^2) stencil.
inline double richardson(const Fn& f, const std::vector<double>& x, const std::vector<int>& alpha, double h) {
    auto r0 = [&](double s) { return mixed(f, x, alpha, s); };
    auto r1 = [&](double s) { return (4 * r0(s / 2) - r0(s)) / 3; };
    return (16 * r1(h / 2) - r1(h)) / 15;
}

inline double factorial(int k) {
    double r = 1;
    for (int i = 2; i <= k; ++i) r *= i;
    return r;
}

// 1D derivative of order m by central differences of a scalar function.
inline double derivative(const std::function<double(double)>& g, double x, int m, double h) {
    Fn f = [&](const std::vector<double>& y) { return g(y[0]); };
    return richardson(f, {x}, {m}, h);
}

} // namespace fd
