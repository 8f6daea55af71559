#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>

// Shared test-only numerics: these oracles stay independent of the library
// implementation paths they check.
namespace testutil {

// Central difference d/dx f at x.
inline double central_diff(const std::function<double(double)>& f, double x,
                           double h = 1e-6) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

inline double rel_err(double got, double want) {
    const double denom = std::max(std::abs(got), std::abs(want));
    if (denom < 1e-12) return std::abs(got - want);
    return std::abs(got - want) / denom;
}

namespace detail {
inline double simpson(const std::function<double(double)>& f, double a, double fa,
                      double b, double fb, double m, double fm) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adaptive_step(const std::function<double(double)>& f, double a,
                            double fa, double b, double fb, double m, double fm,
                            double whole, double tol, int depth) {
    const double lm = (a + m) / 2.0, rm = (m + b) / 2.0;
    const double flm = f(lm), frm = f(rm);
    const double left = simpson(f, a, fa, m, fm, lm, flm);
    const double right = simpson(f, m, fm, b, fb, rm, frm);
    if (depth <= 0) return left + right;
    if (std::abs(left + right - whole) <= 15.0 * tol) {
        return left + right + (left + right - whole) / 15.0;
    }
    return adaptive_step(f, a, fa, m, fm, lm, flm, left, tol / 2.0, depth - 1) +
           adaptive_step(f, m, fm, b, fb, rm, frm, right, tol / 2.0, depth - 1);
}
}  // namespace detail

// Adaptive Simpson quadrature of f over [a, b].
inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-10, int max_depth = 40) {
    const double m = (a + b) / 2.0;
    const double fa = f(a), fb = f(b), fm = f(m);
    const double whole = detail::simpson(f, a, fa, b, fb, m, fm);
    return detail::adaptive_step(f, a, fa, b, fb, m, fm, whole, tol, max_depth);
}

}  // namespace testutil
