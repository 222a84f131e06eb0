#pragma once
// Small deterministic quadrature helpers: adaptive Simpson in 1D (with
// user-supplied breakpoints for piecewise integrands) and a recursive
// cell-refinement rule in 2D that copes with indicator-type integrands.
#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace gshift {

namespace detail {
inline double simpson(double a, double fa, double b, double fb, double fm) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adapt(const std::function<double(double)>& f, double a, double fa, double b,
                    double fb, double m, double fm, double whole, double tol, int depth) {
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = simpson(a, fa, m, fm, flm);
    double right = simpson(m, fm, b, fb, frm);
    if (!std::isfinite(left + right)) return whole;
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adapt(f, a, fa, m, fm, lm, flm, left, tol * 0.5, depth - 1) +
           adapt(f, m, fm, b, fb, rm, frm, right, tol * 0.5, depth - 1);
}
}  // namespace detail

// Adaptive Simpson on [a, b]; splits at the supplied breakpoints first.
inline double integrate(const std::function<double(double)>& f, double a, double b, double tol,
                        std::vector<double> breaks = {}) {
    if (!(b > a)) return 0.0;
    breaks.push_back(a);
    breaks.push_back(b);
    std::sort(breaks.begin(), breaks.end());
    double total = 0.0;
    double prev = a;
    for (double x : breaks) {
        if (x <= prev || x > b) continue;
        double lo = prev, hi = std::min(x, b);
        double m = 0.5 * (lo + hi);
        double flo = f(lo), fhi = f(hi), fm = f(m);
        double whole = detail::simpson(lo, flo, hi, fhi, fm);
        total += detail::adapt(f, lo, flo, hi, fhi, m, fm, whole,
                               std::max(tol * (hi - lo) / (b - a), 1e-300), 42);
        prev = hi;
    }
    return total;
}

// 2D integral of f over [x0,x1]x[y0,y1] by recursive cell refinement: cells
// where the 3x3 probe disagrees are split until the area scale falls below
// tol_area; suitable for indicators times smooth weights.
inline double integrate2d(const std::function<double(double, double)>& f, double x0, double x1,
                          double y0, double y1, double tol_area) {
    struct Rec {
        const std::function<double(double, double)>& f;
        double tol;
        double run(double ax, double bx, double ay, double by, int depth) {
            double dx = bx - ax, dy = by - ay;
            double vals[9], mn = 1e300, mx = -1e300;
            int k = 0;
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) {
                    double v = f(ax + 0.5 * i * dx, ay + 0.5 * j * dy);
                    vals[k++] = v;
                    mn = std::min(mn, v);
                    mx = std::max(mx, v);
                }
            double area = dx * dy;
            bool smooth = (mx - mn) * area < tol * 0.1;
            if (depth <= 0 || (smooth && depth < 14)) {
                // tensor Simpson on the 3x3 probe
                double wx[3] = {1, 4, 1}, s = 0;
                for (int i = 0; i < 3; ++i)
                    for (int j = 0; j < 3; ++j) s += wx[i] * wx[j] * vals[i * 3 + j];
                return s / 36.0 * area;
            }
            double mxm = 0.5 * (ax + bx), mym = 0.5 * (ay + by);
            return run(ax, mxm, ay, mym, depth - 1) + run(mxm, bx, ay, mym, depth - 1) +
                   run(ax, mxm, mym, by, depth - 1) + run(mxm, bx, mym, by, depth - 1);
        }
    } rec{f, tol_area, };
    return rec.run(x0, x1, y0, y1, 16);
}

}  // namespace gshift
