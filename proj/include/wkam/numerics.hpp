#ifndef WKAM_NUMERICS_HPP
#define WKAM_NUMERICS_HPP

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>

namespace wkam {

inline constexpr double pi = 3.14159265358979323846;

inline double sqr(double x) { return x * x; }

/// Reduce x into [0, period).
inline double reduce_mod(double x, double period) {
    double y = std::fmod(x, period);
    if (y < 0.0) y += period;
    if (y >= period) y -= period;  // fmod can round up to period
    return y;
}

/// Signed displacement from a to b along the shorter arc, in (-period/2, period/2].
inline double shorter_arc(double a, double b, double period) {
    double d = reduce_mod(b - a, period);
    if (d > 0.5 * period) d -= period;
    return d;
}

/// Unsigned circle distance.
inline double circle_dist(double a, double b, double period) {
    return std::fabs(shorter_arc(a, b, period));
}

/// Golden-section minimization of f on [a, b]. f is evaluated ~2+iters times.
/// Returns the abscissa of the minimum; *fmin receives the value if non-null.
inline double golden_min(const std::function<double(double)>& f, double a, double b,
                         int iters, double* fmin = nullptr) {
    static const double invphi = 0.6180339887498949;
    double x1 = b - invphi * (b - a);
    double x2 = a + invphi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int k = 0; k < iters; ++k) {
        if (f1 <= f2) {
            b = x2; x2 = x1; f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = f(x1);
        } else {
            a = x1; x1 = x2; f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = f(x2);
        }
    }
    double xm = (f1 <= f2) ? x1 : x2;
    if (fmin) *fmin = (f1 <= f2) ? f1 : f2;
    return xm;
}

/// Bisection for a root of f on a bracket [a,b] with f(a), f(b) of opposite sign.
inline double bisect_root(const std::function<double(double)>& f, double a, double b,
                          double tol, int max_iter = 200) {
    double fa = f(a), fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if ((fa > 0) == (fb > 0))
        throw std::runtime_error("bisect_root: endpoints do not bracket a sign change");
    for (int k = 0; k < max_iter && (b - a) > tol; ++k) {
        double m = 0.5 * (a + b), fm = f(m);
        if (fm == 0.0) return m;
        if ((fm > 0) == (fa > 0)) { a = m; fa = fm; } else { b = m; fb = fm; }
    }
    return 0.5 * (a + b);
}

/// Composite Simpson rule on n (even) intervals.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
    if (n % 2) ++n;
    double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + i * h) * ((i % 2) ? 4.0 : 2.0);
    return s * h / 3.0;
}

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw std::runtime_error(msg);
}

inline bool finite(double x) { return std::isfinite(x); }

}  // namespace wkam

#endif
