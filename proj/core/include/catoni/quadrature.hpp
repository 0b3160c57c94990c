#pragma once

#include <cmath>
#include <cstdlib>

namespace catoni {

/// Adaptive Simpson integration of f over [a, b] to an absolute tolerance.
/// Panels are split until the Richardson error estimate drops below the
/// per-panel budget; depth is capped to keep mildly singular integrands
/// (after a smoothing substitution) from recursing forever.
template <class F>
double adaptive_simpson(const F& f, double a, double b, double abs_tol, int max_depth = 52) {
    struct Impl {
        const F& f;
        int max_depth;

        double simpson(double x0, double x2, double f0, double f1, double f2) const {
            return (x2 - x0) / 6.0 * (f0 + 4.0 * f1 + f2);
        }

        double recurse(double x0, double x2, double f0, double f1, double f2, double whole,
                       double tol, int depth) const {
            const double xm = 0.5 * (x0 + x2);
            const double xl = 0.5 * (x0 + xm);
            const double xr = 0.5 * (xm + x2);
            const double fl = f(xl);
            const double fr = f(xr);
            const double left = simpson(x0, xm, f0, fl, f1);
            const double right = simpson(xm, x2, f1, fr, f2);
            const double err = left + right - whole;
            if (depth >= max_depth || std::abs(err) <= 15.0 * tol) {
                return left + right + err / 15.0;
            }
            return recurse(x0, xm, f0, fl, f1, left, 0.5 * tol, depth + 1) +
                   recurse(xm, x2, f1, fr, f2, right, 0.5 * tol, depth + 1);
        }
    };

    const double fa = f(a);
    const double fm = f(0.5 * (a + b));
    const double fb = f(b);
    Impl impl{f, max_depth};
    const double whole = impl.simpson(a, b, fa, fm, fb);
    return impl.recurse(a, b, fa, fm, fb, whole, abs_tol, 0);
}

}  // namespace catoni
