#pragma once

// Test-only reference computations. Nothing here calls into the library's
// numerical routines; each helper recomputes its quantity by a different route.

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

namespace oracle {

/// Composite Simpson rule on [a, b] with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, std::size_t n = 2000) {
    if (n % 2) ++n;
    const double h = (b - a) / static_cast<double>(n);
    double s = f(a) + f(b);
    for (std::size_t i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + h * static_cast<double>(i));
    return s * h / 3.0;
}

/// sum_{k=1..n} k^-1/2 in long double, largest terms first.
inline long double inverse_sqrt_sum(std::size_t n) {
    long double s = 0.0L;
    for (std::size_t k = 1; k <= n; ++k) s += 1.0L / std::sqrt(static_cast<long double>(k));
    return s;
}

inline double critical_force(std::size_t n, double length) {
    const long double s = inverse_sqrt_sum(n) / length;
    return static_cast<double>(s * s);
}

/// Renormalized energy with the field term integrated by Simpson quadrature,
/// split at `kinks` so each panel sees a smooth integrand.
inline double energy(const std::vector<double>& x, const std::function<double(double)>& force, double length,
                     const std::vector<double>& kinks = {}) {
    double u = 0.0;
    for (std::size_t k = 1; k < x.size(); ++k) u += 1.0 / (x[k - 1] - x[k]);
    for (double xi : x) {
        double a = -length;
        for (double kink : kinks) {
            if (kink <= a || kink >= xi) continue;
            u -= simpson(force, a, kink, 400);
            a = kink;
        }
        u -= simpson(force, a, xi, 400);
    }
    return u;
}

/// Central-difference gradient of f at x with step h.
inline std::vector<double> central_gradient(const std::function<double(const std::vector<double>&)>& f,
                                            std::vector<double> x, double h) {
    std::vector<double> g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double xi = x[i];
        x[i] = xi + h;
        const double up = f(x);
        x[i] = xi - h;
        const double down = f(x);
        x[i] = xi;
        g[i] = (up - down) / (2.0 * h);
    }
    return g;
}

/// Closed-form root of the phase-2 normalization 2b / (1 + sqrt(1 - c L^2 b^2)) = 1.
inline double phase2_b(double c, double length) { return 4.0 / (4.0 + c * length * length); }

/// Half-line chain extent -x_N = (sum k^-1/2) / sqrt(F).
inline double half_line_extent(double force, std::size_t n) {
    return static_cast<double>(inverse_sqrt_sum(n) / std::sqrt(static_cast<long double>(force)));
}

} // namespace oracle
