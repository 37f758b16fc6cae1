#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

namespace qot {

inline std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
        v[static_cast<size_t>(i)] = a + (b - a) * static_cast<double>(i) / (n - 1);
    v.back() = b;
    return v;
}

/// Piecewise-linear function sampled on a uniform grid over [a,b].
/// Outside [a,b] the boundary segment is continued linearly.
struct GridFn {
    double a = 0, b = 1;
    std::vector<double> v;

    int n() const { return static_cast<int>(v.size()); }
    double h() const { return (b - a) / (n() - 1); }
    double node(int i) const { return a + (b - a) * static_cast<double>(i) / (n() - 1); }

    double operator()(double x) const {
        double t = (x - a) / (b - a) * (n() - 1);
        int i = static_cast<int>(std::floor(t));
        if (i < 0) i = 0;
        if (i > n() - 2) i = n() - 2;
        double w = t - i;
        return v[static_cast<size_t>(i)] * (1.0 - w) + v[static_cast<size_t>(i + 1)] * w;
    }
};

/// 5-point Gauss-Legendre on [lo,hi]; exact for polynomials up to degree 9.
inline double integrate_gl5(const std::function<double(double)>& f, double lo, double hi) {
    static const double xs[5] = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                 0.5384693101056831, 0.9061798459386640};
    static const double ws[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                 0.4786286704993665, 0.2369268850561891};
    double c = 0.5 * (lo + hi), r = 0.5 * (hi - lo);
    double s = 0;
    for (int k = 0; k < 5; ++k) s += ws[k] * f(c + r * xs[k]);
    return s * r;
}

/// Trapezoid rule for values sampled on a uniform grid with spacing h.
inline double trapz(const std::vector<double>& v, double h) {
    double s = 0;
    for (size_t i = 0; i + 1 < v.size(); ++i) s += 0.5 * (v[i] + v[i + 1]);
    return s * h;
}

}  // namespace qot
