#pragma once

#include <cmath>
#include <cstdint>

#include "ats/errors.hpp"

namespace ats::quadrature {

namespace detail {

inline double simpson(double a, double fa, double b, double fb, double fm) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

template <class F>
double adaptive_step(const F& f, double a, double fa, double b, double fb, double fm,
                     double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = simpson(a, fa, m, fm, flm);
    const double right = simpson(m, fm, b, fb, frm);
    const double delta = left + right - whole;
    if (depth <= 0) throw SolverError("adaptive quadrature: depth exhausted", m);
    // Richardson: |delta|/15 estimates the error of left+right.
    if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return adaptive_step(f, a, fa, m, fm, flm, left, 0.5 * tol, depth - 1) +
           adaptive_step(f, m, fm, b, fb, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

// Adaptive Simpson on [a,b] with absolute tolerance. Intended for smooth
// integrands; throws SolverError if the recursion cannot meet the tolerance.
template <class F>
double integrate(const F& f, double a, double b, double abs_tol, int max_depth = 60) {
    if (a == b) return 0.0;
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(0.5 * (a + b));
    const double whole = detail::simpson(a, fa, b, fb, fm);
    return detail::adaptive_step(f, a, fa, b, fb, fm, whole, abs_tol, max_depth);
}

}  // namespace ats::quadrature
