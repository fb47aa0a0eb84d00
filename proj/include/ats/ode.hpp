#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "ats/errors.hpp"

namespace ats::ode {

struct Options {
    double rel_tol = 1e-10;
    double abs_tol = 1e-13;
};

// Adaptive Dormand-Prince 5(4) integrator. Steps are clamped so that every
// requested output node is an exact step endpoint; the observer is invoked at
// each node with the state and the RHS value there, so callers can tabulate
// derivatives straight from the equation instead of differencing.
//
// rhs:      void(Scalar v, const Array& y, Array& dydv)
// observer: void(Eigen::Index node, Scalar v, const Array& y, const Array& dydv)
template <typename Scalar, int N, class RHS, class Observer>
void integrate_grid(const RHS& rhs, Eigen::Array<Scalar, N, 1> y,
                    const std::vector<Scalar>& nodes, const Options& opt,
                    Observer&& observer) {
    using Array = Eigen::Array<Scalar, N, 1>;
    if (nodes.size() < 2) {
        if (nodes.size() == 1) {
            Array d;
            rhs(nodes[0], y, d);
            observer(0, nodes[0], y, d);
        }
        return;
    }

    // Butcher tableau, classic DOPRI5 coefficients.
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                     a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                     a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                     b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    constexpr double e1 = b1 - 5179.0 / 57600, e3 = b3 - 7571.0 / 16695, e4 = b4 - 393.0 / 640,
                     e5 = b5 + 92097.0 / 339200, e6 = b6 - 187.0 / 2100, e7 = -1.0 / 40;

    Scalar v = nodes.front();
    Array k1, k2, k3, k4, k5, k6, k7, ynew, yerr, ytmp;
    rhs(v, y, k1);
    observer(0, v, y, k1);

    const Scalar span = nodes.back() - nodes.front();
    Scalar h = span / Scalar(100);
    const Scalar h_floor = Scalar(64) * std::numeric_limits<Scalar>::epsilon() *
                           std::max<Scalar>(Scalar(1), std::abs(nodes.back()));

    for (std::size_t node = 1; node < nodes.size(); ++node) {
        const Scalar v_target = nodes[node];
        while (v < v_target) {
            bool hit_node = false;
            Scalar hs = h;
            if (v + hs >= v_target) {
                hs = v_target - v;
                hit_node = true;
            }
            ytmp = y + hs * (a21 * k1);
            rhs(v + hs * Scalar(0.2), ytmp, k2);
            ytmp = y + hs * (a31 * k1 + a32 * k2);
            rhs(v + hs * Scalar(0.3), ytmp, k3);
            ytmp = y + hs * (a41 * k1 + a42 * k2 + a43 * k3);
            rhs(v + hs * Scalar(0.8), ytmp, k4);
            ytmp = y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
            rhs(v + hs * Scalar(8.0 / 9), ytmp, k5);
            ytmp = y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
            rhs(v + hs, ytmp, k6);
            ynew = y + hs * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
            rhs(v + hs, ynew, k7);
            yerr = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

            Scalar err = 0;
            for (int i = 0; i < N; ++i) {
                const Scalar scale =
                    Scalar(opt.abs_tol) +
                    Scalar(opt.rel_tol) * std::max(std::abs(y[i]), std::abs(ynew[i]));
                const Scalar r = yerr[i] / scale;
                err += r * r;
            }
            err = std::sqrt(err / Scalar(N));
            // Overflowing stages make the error NaN; treat that as a hard
            // rejection so the step shrinks instead of poisoning the control.
            if (!std::isfinite(err)) err = std::numeric_limits<Scalar>::infinity();

            const bool accept = err <= Scalar(1);
            if (accept) {
                v = hit_node ? v_target : v + hs;
                y = ynew;
                k1 = k7;
            }
            if (!(accept && hit_node)) {
                // Free-running step update; a node-clamped accepted step keeps
                // the previous step size.
                const Scalar grow =
                    Scalar(0.9) * std::pow(std::max(err, Scalar(1e-30)), Scalar(-0.2));
                h = hs * std::clamp(grow, Scalar(0.2), Scalar(5));
                if (h < h_floor)
                    throw SolverError("ode: step size underflow", static_cast<double>(v));
            }
        }
        observer(static_cast<Eigen::Index>(node), v, y, k1);
    }
}

}  // namespace ats::ode
