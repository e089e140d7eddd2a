#ifndef WKAM_TEST_ORACLES_HPP
#define WKAM_TEST_ORACLES_HPP

// Test-side reference computations, kept independent of the library's DP path:
// a brute-force dynamic program on a full transition matrix, closed forms for
// the quadratic families, and the scalar drift ODE.

#include <cmath>
#include <vector>

#include "wkam/model.hpp"

namespace oracle {

// Closed form for H = p^2/2 on the circle (straight-arc transport).
inline double hopf_lax(double u0, double dist, double t) { return u0 + dist * dist / (2.0 * t); }

// Closed form for H = lambda u + p^2/2: value of the implicit relation along the
// exponential-speed minimizer.
inline double discounted_value(double lambda, double u0, double dist, double t) {
    double e = std::exp(-lambda * t);
    return e * u0 + lambda * dist * dist * e / (2.0 * (1.0 - e));
}

// Drift ODE xdot = sin(x): explicit solution through x0 at t=0.
inline double sin_drift(double x0, double t) {
    return 2.0 * std::atan(std::exp(t) * std::tan(0.5 * x0));
}

// Full-matrix value iteration for the forward implicit action from (x0,u0):
// every node is a candidate predecessor, straight arcs, midpoint-implicit cost,
// fixed-point solved by plain iteration. No windows, no refinement.
struct BruteForce {
    const wkam::ModelSpec& m;
    int n;
    double dt;

    double kernel(double z, double w, double x) const {
        double d = wkam::shorter_arc(z, x, m.period);
        double v = d / dt;
        double xm = m.reduce(z + 0.5 * d);
        double h = w;
        for (int it = 0; it < 200; ++it) {
            double hn = w + dt * m.L(xm, 0.5 * (w + h), v);
            if (std::fabs(hn - h) < 1e-15) { h = hn; break; }
            h = hn;
        }
        return h;
    }

    // layers[k][i] = value at node i, time (k+1) dt
    std::vector<std::vector<double>> table(double x0, double u0, int n_layers) const {
        double dx = m.period / n;
        std::vector<std::vector<double>> layers;
        std::vector<double> cur(n);
        for (int i = 0; i < n; ++i) cur[i] = kernel(x0, u0, i * dx);
        layers.push_back(cur);
        for (int k = 1; k < n_layers; ++k) {
            std::vector<double> next(n);
            for (int i = 0; i < n; ++i) {
                double best = 1e300;
                for (int j = 0; j < n; ++j)
                    best = std::min(best, kernel(j * dx, cur[j], i * dx));
                next[i] = best;
            }
            cur = next;
            layers.push_back(cur);
        }
        return layers;
    }
};

}  // namespace oracle

#endif
