#ifndef WKAM_SCALAR_FIELD_HPP
#define WKAM_SCALAR_FIELD_HPP

#include <cmath>
#include <string>
#include <vector>

#include "wkam/numerics.hpp"

namespace wkam {

/// Uniform periodic grid, node i at i * period / n.
struct Grid {
    int n = 0;
    double period = 2.0 * pi;

    Grid() = default;
    Grid(int n_, double period_) : n(n_), period(period_) {
        require(n >= 16, "grid: need n >= 16");
        require(period > 0.0, "grid: period must be positive");
    }
    double dx() const { return period / n; }
    double node(int i) const { return wrap(i) * dx(); }
    int wrap(int i) const {
        int r = i % n;
        return r < 0 ? r + n : r;
    }
    int nearest(double x) const {
        return wrap(static_cast<int>(std::lround(reduce_mod(x, period) / dx())));
    }
    bool operator==(const Grid& o) const { return n == o.n && period == o.period; }
};

/// A function sampled on a Grid, with periodic linear interpolation.
struct ScalarField {
    Grid grid;
    std::vector<double> values;
    std::string meta;

    ScalarField() = default;
    ScalarField(Grid g, double fill = 0.0, std::string m = {})
        : grid(g), values(static_cast<std::size_t>(g.n), fill), meta(std::move(m)) {}

    double operator[](int i) const { return values[grid.wrap(i)]; }
    double& operator[](int i) { return values[grid.wrap(i)]; }

    double interp(double x) const {
        double dx = grid.dx();
        double y = reduce_mod(x, grid.period) / dx;
        int i = static_cast<int>(y);
        if (i >= grid.n) i -= grid.n;
        double frac = y - i;
        return (1.0 - frac) * values[i] + frac * values[grid.wrap(i + 1)];
    }

    double max_abs() const {
        double m = 0.0;
        for (double v : values) m = std::max(m, std::fabs(v));
        return m;
    }

    double max_abs_diff(const ScalarField& o) const {
        require(grid == o.grid, "field diff: grid mismatch");
        double m = 0.0;
        for (int i = 0; i < grid.n; ++i) m = std::max(m, std::fabs(values[i] - o.values[i]));
        return m;
    }

    bool all_finite() const {
        for (double v : values)
            if (!finite(v)) return false;
        return true;
    }

    static ScalarField constant(Grid g, double c, std::string meta = {}) {
        return ScalarField(g, c, std::move(meta));
    }

    template <class F>
    static ScalarField sample(Grid g, F&& fn, std::string meta = {}) {
        ScalarField out(g, 0.0, std::move(meta));
        for (int i = 0; i < g.n; ++i) out.values[i] = fn(g.node(i));
        return out;
    }

    static ScalarField pointwise_min(const ScalarField& a, const ScalarField& b) {
        require(a.grid == b.grid, "pointwise_min: grid mismatch");
        ScalarField out = a;
        for (int i = 0; i < a.grid.n; ++i) out.values[i] = std::min(a.values[i], b.values[i]);
        return out;
    }
};

}  // namespace wkam

#endif
