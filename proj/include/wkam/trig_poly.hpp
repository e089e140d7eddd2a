#ifndef WKAM_TRIG_POLY_HPP
#define WKAM_TRIG_POLY_HPP

#include <cmath>
#include <stdexcept>
#include <vector>

#include "wkam/numerics.hpp"

namespace wkam {

/// Real trigonometric polynomial on a circle of given circumference:
///   c0 + sum_k a_k cos(2 pi k x / period) + b_k sin(2 pi k x / period).
/// Coefficient lists are 1-based in the harmonic index.
struct TrigPoly {
    double period = 2.0 * pi;
    double c0 = 0.0;
    std::vector<double> a;  // cos coefficients
    std::vector<double> b;  // sin coefficients

    double omega() const { return 2.0 * pi / period; }

    double eval(double x) const {
        double w = omega(), s = c0;
        for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * std::cos(w * (k + 1) * x);
        for (std::size_t k = 0; k < b.size(); ++k) s += b[k] * std::sin(w * (k + 1) * x);
        return s;
    }

    double deriv(double x) const {
        double w = omega(), s = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k) s -= a[k] * w * (k + 1) * std::sin(w * (k + 1) * x);
        for (std::size_t k = 0; k < b.size(); ++k) s += b[k] * w * (k + 1) * std::cos(w * (k + 1) * x);
        return s;
    }

    /// Primitive F with F(0) = 0.
    double antideriv(double x) const {
        double w = omega(), s = c0 * x;
        for (std::size_t k = 0; k < a.size(); ++k) s += a[k] / (w * (k + 1)) * std::sin(w * (k + 1) * x);
        for (std::size_t k = 0; k < b.size(); ++k) s += b[k] / (w * (k + 1)) * (1.0 - std::cos(w * (k + 1) * x));
        return s;
    }

    double max_abs(int scan = 4096) const {
        double m = 0.0;
        for (int i = 0; i < scan; ++i) m = std::max(m, std::fabs(eval(i * period / scan)));
        return m;
    }

    double max_val(int scan = 4096) const {
        double m = eval(0.0);
        for (int i = 1; i < scan; ++i) m = std::max(m, eval(i * period / scan));
        return m;
    }

    double min_val(int scan = 4096) const {
        double m = eval(0.0);
        for (int i = 1; i < scan; ++i) m = std::min(m, eval(i * period / scan));
        return m;
    }

    /// Zeros located by sign changes on a scan grid, refined by bisection.
    /// Tangential zeros (no sign change) are not reported.
    std::vector<double> simple_zeros(int scan = 4096, double tol = 1e-13) const {
        std::vector<double> zs;
        double prev = eval(0.0);
        for (int i = 1; i <= scan; ++i) {
            double x = i * period / scan;
            double cur = eval(x);
            if (prev == 0.0) zs.push_back(reduce_mod((i - 1) * period / scan, period));
            else if ((prev > 0) != (cur > 0)) {
                double lo = (i - 1) * period / scan, hi = x;
                double z = bisect_root([this](double t) { return eval(t); }, lo, hi, tol);
                zs.push_back(reduce_mod(z, period));
            }
            prev = cur;
        }
        return zs;
    }

    static TrigPoly constant(double c, double period) {
        TrigPoly t; t.period = period; t.c0 = c; return t;
    }
    /// sin(2 pi x / period); with period = 2 pi this is sin(x).
    static TrigPoly sin_wave(double period) {
        TrigPoly t; t.period = period; t.b = {1.0}; return t;
    }
    /// 1 - cos(2 pi x / period); vanishes only at x = 0.
    static TrigPoly one_minus_cos(double period) {
        TrigPoly t; t.period = period; t.c0 = 1.0; t.a = {-1.0}; return t;
    }
};

}  // namespace wkam

#endif
